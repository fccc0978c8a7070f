#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "adopt/date.hpp"
#include "adopt/registry.hpp"
#include "adopt/timeseries.hpp"

namespace adopt {

inline constexpr std::size_t kReferenceSize = 10;

using SeriesMap = std::map<std::string, DownloadSeries, std::less<>>;

struct MilestoneStats {
  int t = 0;
  double median = 0;
  double q1 = 0;
  double q3 = 0;
  std::size_t support = 0;  // members contributing a value at t

  bool reduced_support() const { return support < kReferenceSize; }
};

// Top-10 reference for one size bucket, frozen at the snapshot date the
// members were selected on. Scores always cite the curve they were computed
// against.
struct ReferenceCurve {
  SizeBucket bucket = SizeBucket::Sub1B;
  Date reference_date{};
  std::vector<std::string> members;
  std::vector<MilestoneStats> milestones;  // ascending t

  const MilestoneStats* at(int t) const;
  // Throws Validation unless there are exactly 10 members and q1 <= median <= q3 everywhere.
  void validate() const;
};

struct RamScore {
  std::string model_id;  // model id or variant group key
  SizeBucket bucket = SizeBucket::Sub1B;
  int t = 0;
  double downloads = 0;
  double score = 0;
  Date reference_date{};
  bool reduced_support = false;
};

// The 10 models of the bucket with the most cumulative downloads as of
// reference_date (last observation on or before it); ties go to the
// lexicographically smaller id. Throws InsufficientData with fewer than 10.
std::vector<std::string> select_top10(SizeBucket bucket, const Registry& registry, const SeriesMap& series,
                                      Date reference_date);

// Median and quartiles (type 7) of the member values available at t. With
// all 10 present the median is the mean of the 5th and 6th order statistics.
MilestoneStats reference_stats(std::span<const double> values, int t);

// Members contribute only at milestones they had reached by reference_date;
// milestones nobody reached are omitted.
ReferenceCurve build_reference_curve(SizeBucket bucket, const Registry& registry, const SeriesMap& series,
                                     Date reference_date);

// downloads / median. Throws Domain unless median > 0.
double ram_score(double downloads, double median);

// Scores at each milestone the model (or variant group, whose member series
// are summed first) has reached, stopping at the first milestone without a
// value or without reference support. Throws Unavailable when the curve is
// for a different bucket.
std::vector<RamScore> ram_trajectory(std::string_view model_or_group, const Registry& registry,
                                     const SeriesMap& series, const ReferenceCurve& reference);

// Sum of member series on the union of their dates (carried forward, 0 before
// a member's first point), truncated at the earliest member end.
DownloadSeries sum_series(std::string id, std::span<const DownloadSeries* const> members);

nlohmann::json to_json(const ReferenceCurve& curve);
ReferenceCurve curve_from_json(const nlohmann::json& json);

// "model,bucket,t,downloads,score,reference_date"; downloads as integers,
// scores with two decimals.
std::string scores_csv(std::span<const RamScore> scores);

}  // namespace adopt
