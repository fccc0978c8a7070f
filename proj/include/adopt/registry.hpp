#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "adopt/date.hpp"

namespace adopt {

enum class Region { USA, China, Europe, Other };

inline constexpr std::array<Region, 4> kAllRegions{Region::USA, Region::China, Region::Europe,
                                                   Region::Other};

std::string_view to_string(Region region);
std::optional<Region> parse_region(std::string_view text);

enum class SizeBucket { Sub1B, B1to5, B7to9, B10to50, B50to100, B100to250, B250plus };

inline constexpr std::array<SizeBucket, 7> kAllBuckets{
    SizeBucket::Sub1B,    SizeBucket::B1to5,     SizeBucket::B7to9,   SizeBucket::B10to50,
    SizeBucket::B50to100, SizeBucket::B100to250, SizeBucket::B250plus};

// Half-open [lower, next lower) intervals over total parameter count. The
// published labels leave 5-7B and 9-10B uncovered; the cut points at 6.5B and
// 9.5B put marketing-rounded 7B/8B/9B models in 7-9B and 6B models in 1-5B.
struct BucketBound {
  SizeBucket bucket;
  std::int64_t lower;
};

inline constexpr std::array<BucketBound, 7> kBucketBounds{{
    {SizeBucket::Sub1B, 0},
    {SizeBucket::B1to5, 1'000'000'000},
    {SizeBucket::B7to9, 6'500'000'000},
    {SizeBucket::B10to50, 9'500'000'000},
    {SizeBucket::B50to100, 50'000'000'000},
    {SizeBucket::B100to250, 100'000'000'000},
    {SizeBucket::B250plus, 250'000'000'000},
}};

// Display label, e.g. "1-5B" or "250B+".
std::string_view to_string(SizeBucket bucket);
// Accepts display labels and enum names ("B1to5").
std::optional<SizeBucket> parse_size_bucket(std::string_view text);

// MoE models are classified by total parameters, never active ones.
SizeBucket classify_size_bucket(std::int64_t total_params);

// Exact integer parse of "671000000000", "4B", "0.6B", "135M", "1T", "1.5e9".
// Suffixes are decimal SI (K=1e3, M=1e6, B/G=1e9, T=1e12). Returns nullopt for
// anything that is not a non-negative whole number of parameters.
std::optional<std::int64_t> parse_param_count(std::string_view text);

// Organization alias table: hub namespaces and company names mapped to a
// canonical organization and its headquarters region.
class OrgDirectory {
 public:
  struct Entry {
    std::string organization;
    Region region = Region::Other;
  };

  // The table shipped in data/org_regions.csv, embedded at build time.
  static const OrgDirectory& builtin();
  static OrgDirectory parse(std::string_view csv_content);
  static OrgDirectory load(const std::filesystem::path& path);

  const Entry* find(std::string_view alias) const;
  // Unknown organizations map to Other.
  Region region_of(std::string_view organization) const;
  // Canonical organization name, or the trimmed input when unknown.
  std::string canonical(std::string_view organization) const;

  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, Entry> entries_;
};

// Case-insensitive, punctuation-insensitive alias key ("Z.ai" -> "zai").
std::string normalize_org_key(std::string_view organization);

Region classify_region(std::string_view organization,
                       const OrgDirectory& directory = OrgDirectory::builtin());

inline constexpr std::string_view kRegistryModule = "registry";

// Tracked models must post-date ChatGPT's release.
Date earliest_release_date();

struct ModelRecord {
  std::string model_id;
  std::string organization;
  Region region = Region::Other;
  std::int64_t total_params = 0;
  std::optional<std::int64_t> active_params;
  Date release_date{};
  // Declared variant group; empty means the model stands alone.
  std::string variant_group;

  SizeBucket bucket() const { return classify_size_bucket(total_params); }
  const std::string& group_key() const { return variant_group.empty() ? model_id : variant_group; }
};

// "org/name" with exactly one slash and both halves non-empty.
bool is_valid_model_id(std::string_view id);
std::string model_namespace(std::string_view id);

struct RowIssue {
  std::size_t line = 0;
  std::string id;
  std::string message;
};

struct ValidationReport {
  std::vector<RowIssue> errors;
  std::vector<RowIssue> warnings;
  bool ok() const { return errors.empty(); }
};

struct RegistryLoad {
  std::vector<ModelRecord> records;
  ValidationReport report;
};

// Header must carry model_id, organization, total_params and release_date;
// region_hint, active_params and variant_group are optional. A malformed
// header throws; bad rows are collected in the report and skipped.
RegistryLoad load_registry(std::string_view content,
                           const OrgDirectory& directory = OrgDirectory::builtin());

using VariantGroups = std::map<std::string, std::vector<std::string>>;

// Partition of model ids by group key. Throws Duplicate on repeated ids.
VariantGroups resolve_variant_group(std::span<const ModelRecord> records);

// Immutable, validated registry. Safe to share read-only across threads.
class Registry {
 public:
  Registry() = default;
  explicit Registry(std::vector<ModelRecord> records);

  const ModelRecord* find(std::string_view model_id) const;
  bool contains(std::string_view model_id) const { return find(model_id) != nullptr; }
  const std::vector<ModelRecord>& records() const { return records_; }
  const VariantGroups& variant_groups() const { return groups_; }
  // Members of a group key, or nullptr when no such group exists.
  const std::vector<std::string>* group_members(std::string_view group_key) const;

 private:
  std::vector<ModelRecord> records_;
  std::map<std::string, std::size_t, std::less<>> index_;
  VariantGroups groups_;
};

Registry load_registry_file(const std::filesystem::path& path, ValidationReport* report = nullptr,
                            const OrgDirectory& directory = OrgDirectory::builtin());

}  // namespace adopt
