#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adopt/date.hpp"
#include "adopt/registry.hpp"

namespace adopt {

struct DerivativeRecord {
  std::string child_id;
  std::vector<std::string> base_tags;  // raw tags; merges and adapters may list several
  std::int64_t lifetime_downloads = 0;
  std::set<std::string> format_tags;
  Date created_at{};
};

// "base_model:ORG/MODEL" (also the prefixless "ORG/MODEL" and the hub's
// relation forms such as "base_model:finetune:ORG/MODEL") -> "ORG/MODEL".
std::optional<std::string> parse_base_model_tag(std::string_view tag);

struct DerivativeRules {
  std::int64_t min_downloads_exclusive = 5;  // accepted iff downloads > this
  // Matched case-insensitively as a substring of any format tag or of the child id.
  std::vector<std::string> excluded_formats{"gguf", "mlx"};
};

enum class RejectionCause { UntrackedBase, TooFewDownloads, LocalReupload };

std::string_view to_string(RejectionCause cause);

struct AcceptedDerivative {
  DerivativeRecord record;
  std::vector<std::string> tracked_bases;  // distinct, sorted, all in the registry
};

struct DerivativeFilterResult {
  std::vector<AcceptedDerivative> accepted;
  std::map<RejectionCause, std::size_t> rejected;  // one cause per rejected record

  std::size_t rejected_total() const;
};

// Keeps records whose base is tracked, with more than five lifetime downloads
// and no local-inference re-upload marker. Causes are checked in that order.
DerivativeFilterResult filter_derivatives(std::span<const DerivativeRecord> records, const Registry& registry,
                                          const DerivativeRules& rules = {});

enum class DerivativeGrouping { Organization, Region };

struct GroupShare {
  double share = 0;
  std::size_t count = 0;
};

// Share of new derivatives per base organization or region in one calendar
// month (created_at within the month of `month`). A record with several
// tracked bases counts once per base. Empty when nothing was accepted.
std::map<std::string, GroupShare> derivative_share(std::span<const AcceptedDerivative> accepted,
                                                   const Registry& registry, DerivativeGrouping group_by,
                                                   Date month);

struct DerivativeLoad {
  std::vector<DerivativeRecord> records;
  ValidationReport report;
};

// CSV "child_id,base_tag,lifetime_downloads,format_tags,created_at";
// base_tag and format_tags are ';'-joined lists.
DerivativeLoad load_derivatives(std::string_view content);

}  // namespace adopt
