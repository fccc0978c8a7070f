#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adopt/date.hpp"
#include "adopt/registry.hpp"

namespace adopt {

struct EloObservation {
  std::string model_id;
  Region region = Region::Other;
  Date observed_at{};
  double elo = 0;
  bool adjusted = false;  // set once the recalibration shift step has run
};

Date default_elo_cutover();              // 2025-05-19
inline constexpr double kEloShift = 59.2;  // style-control recalibration

// Ratings observed strictly before the cutover are raised by `shift`. Marks
// the observation adjusted; adjusting twice throws Validation.
EloObservation adjust_elo(EloObservation obs, Date cutover = default_elo_cutover(), double shift = kEloShift);

struct FrontierPoint {
  Date date{};
  double elo = 0;
  std::string model_id;  // holder of the frontier value on that date
};

// Running maximum of the region's best rating on each observation date, so
// the frontier never moves down. Observations must already be adjusted.
std::vector<FrontierPoint> elo_frontier(std::span<const EloObservation> observations, Region region);

struct IndexObservation {
  std::string model_id;
  Region region = Region::Other;
  Date observed_at{};
  double score = 0;
};

Date index_trend_start();  // 2024-04-01

struct LinearFit {
  double slope = 0;      // points per day
  double intercept = 0;  // value at the epoch
  double residual_rms = 0;
  Date epoch{};          // first fitted date; x is days since epoch
  std::size_t points = 0;
};

// Least squares over (days since the region's first date, best score on that
// date) for observations on or after 2024-04-01. Throws InsufficientData with
// fewer than two dates.
LinearFit fit_linear_trend(std::span<const IndexObservation> observations, Region region);

// Plain OLS over explicit (x, y) pairs, centered for conditioning. Throws
// InsufficientData below two points and Domain when all x coincide.
LinearFit fit_ols(std::span<const double> x, std::span<const double> y);

struct TokenShareRecord {
  Date month{};  // first-of-month label
  std::string model_id;
  std::string organization;
  Region region = Region::Other;
  std::int64_t tokens = 0;
};

enum class TokenGrouping { Region, Organization };

struct TokenShare {
  std::map<std::string, double> shares;
  std::map<std::string, std::int64_t> tokens;
  // Inputs list only each month's top 10 models, so spread-out usage is undercounted.
  bool truncated_top10 = true;
};

// Group tokens / total tokens among records of `month`. Empty on zero total.
TokenShare token_share(std::span<const TokenShareRecord> records, TokenGrouping group_by, Date month);

// Region and organization come from the registry when the model is tracked,
// otherwise from the hub namespace via the alias table.
struct Attribution {
  std::string organization;
  Region region = Region::Other;
};
Attribution attribute_model(std::string_view model_id, const Registry* registry, const OrgDirectory& directory);

// CSV loaders: "date,model_id,elo", "date,model_id,score", "month,model_id,tokens".
// Token months may be written "YYYY-MM" or as any date inside the month.
std::vector<EloObservation> load_arena(std::string_view content, const Registry* registry,
                                       const OrgDirectory& directory = OrgDirectory::builtin());
std::vector<IndexObservation> load_index(std::string_view content, const Registry* registry,
                                         const OrgDirectory& directory = OrgDirectory::builtin());
// Throws Validation when a month lists more than 10 models.
std::vector<TokenShareRecord> load_tokens(std::string_view content, const Registry* registry,
                                          const OrgDirectory& directory = OrgDirectory::builtin());

}  // namespace adopt
