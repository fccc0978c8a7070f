#include "adopt/registry.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <set>

#include <fmt/format.h>

#include "adopt/csv.hpp"
#include "adopt/error.hpp"
#include "org_regions_data.hpp"

namespace adopt {

namespace {

const std::string kModule{kRegistryModule};

}  // namespace

std::string_view to_string(Region region) {
  switch (region) {
    case Region::USA: return "USA";
    case Region::China: return "China";
    case Region::Europe: return "Europe";
    case Region::Other: return "Other";
  }
  return "Other";
}

std::optional<Region> parse_region(std::string_view text) {
  const std::string key = normalize_org_key(text);
  if (key == "usa" || key == "us" || key == "unitedstates") return Region::USA;
  if (key == "china" || key == "cn") return Region::China;
  if (key == "europe" || key == "eu") return Region::Europe;
  if (key == "other") return Region::Other;
  return std::nullopt;
}

std::string_view to_string(SizeBucket bucket) {
  switch (bucket) {
    case SizeBucket::Sub1B: return "<1B";
    case SizeBucket::B1to5: return "1-5B";
    case SizeBucket::B7to9: return "7-9B";
    case SizeBucket::B10to50: return "10-50B";
    case SizeBucket::B50to100: return "50-100B";
    case SizeBucket::B100to250: return "100-250B";
    case SizeBucket::B250plus: return "250B+";
  }
  return "?";
}

std::optional<SizeBucket> parse_size_bucket(std::string_view text) {
  static constexpr std::array<std::string_view, 7> kEnumNames{
      "Sub1B", "B1to5", "B7to9", "B10to50", "B50to100", "B100to250", "B250plus"};
  const std::string t = trim(text);
  for (std::size_t i = 0; i < kAllBuckets.size(); ++i) {
    if (t == to_string(kAllBuckets[i]) || t == kEnumNames[i]) return kAllBuckets[i];
  }
  return std::nullopt;
}

SizeBucket classify_size_bucket(std::int64_t total_params) {
  if (total_params <= 0) {
    throw Error(ErrorKind::Domain, kModule,
                fmt::format("parameter count must be positive, got {}", total_params));
  }
  SizeBucket result = SizeBucket::Sub1B;
  for (const auto& bound : kBucketBounds) {
    if (total_params >= bound.lower) result = bound.bucket;
  }
  return result;
}

std::optional<std::int64_t> parse_param_count(std::string_view raw) {
  std::string text = trim(raw);
  text.erase(std::remove(text.begin(), text.end(), '_'), text.end());
  if (text.empty()) return std::nullopt;

  int suffix_exp = 0;
  switch (std::toupper(static_cast<unsigned char>(text.back()))) {
    case 'K': suffix_exp = 3; break;
    case 'M': suffix_exp = 6; break;
    case 'B':
    case 'G': suffix_exp = 9; break;
    case 'T': suffix_exp = 12; break;
    default: break;
  }
  if (suffix_exp != 0) text.pop_back();

  int exp10 = suffix_exp;
  const auto e_pos = text.find_first_of("eE");
  if (e_pos != std::string::npos) {
    const std::string exp_text = text.substr(e_pos + 1);
    text.resize(e_pos);
    std::size_t i = (!exp_text.empty() && exp_text[0] == '+') ? 1 : 0;
    if (i >= exp_text.size()) return std::nullopt;
    int e = 0;
    for (; i < exp_text.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(exp_text[i])) || e > 100) return std::nullopt;
      e = e * 10 + (exp_text[i] - '0');
    }
    exp10 += e;
  }

  std::string digits;
  bool seen_dot = false;
  for (char c : text) {
    if (c == '.') {
      if (seen_dot) return std::nullopt;
      seen_dot = true;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      if (seen_dot) --exp10;
    } else {
      return std::nullopt;
    }
  }
  if (digits.empty()) return std::nullopt;

  // Drop fractional digits only when they are zeros; otherwise not a whole count.
  while (exp10 < 0) {
    if (digits.back() != '0') return std::nullopt;
    digits.pop_back();
    ++exp10;
    if (digits.empty()) digits = "0";
  }

  constexpr auto kMax = std::numeric_limits<std::int64_t>::max();
  std::int64_t value = 0;
  for (char c : digits) {
    const int d = c - '0';
    if (value > (kMax - d) / 10) return std::nullopt;
    value = value * 10 + d;
  }
  for (int i = 0; i < exp10; ++i) {
    if (value > kMax / 10) return std::nullopt;
    value *= 10;
  }
  return value;
}

std::string normalize_org_key(std::string_view organization) {
  std::string key;
  for (unsigned char c : organization) {
    if (std::isalnum(c) != 0) key.push_back(static_cast<char>(std::tolower(c)));
  }
  return key;
}

const OrgDirectory& OrgDirectory::builtin() {
  static const OrgDirectory directory = OrgDirectory::parse(detail::kOrgRegionsCsv);
  return directory;
}

OrgDirectory OrgDirectory::parse(std::string_view csv_content) {
  const CsvTable table = parse_csv(csv_content);
  const auto alias_col = table.column("alias");
  const auto org_col = table.column("organization");
  const auto region_col = table.column("region");
  if (!alias_col || !org_col || !region_col) {
    throw Error(ErrorKind::Format, kModule,
                "alias table header must contain alias,organization,region");
  }
  OrgDirectory directory;
  for (const auto& row : table.rows) {
    const auto region = parse_region(table.cell(row, region_col));
    const std::string key = normalize_org_key(table.cell(row, alias_col));
    const std::string org{table.cell(row, org_col)};
    if (!region || key.empty() || org.empty()) {
      throw Error(ErrorKind::Format, kModule, fmt::format("alias table line {}: malformed entry", row.line));
    }
    Entry entry{org, *region};
    auto [it, inserted] = directory.entries_.emplace(key, entry);
    if (!inserted && (it->second.organization != org || it->second.region != *region)) {
      throw Error(ErrorKind::Duplicate, kModule,
                  fmt::format("alias table line {}: alias '{}' mapped twice", row.line,
                              table.cell(row, alias_col)));
    }
  }
  // Canonical names resolve to themselves.
  std::vector<std::pair<std::string, Entry>> canon;
  for (const auto& [key, entry] : directory.entries_) {
    canon.emplace_back(normalize_org_key(entry.organization), entry);
  }
  for (auto& [key, entry] : canon) directory.entries_.emplace(key, entry);
  return directory;
}

OrgDirectory OrgDirectory::load(const std::filesystem::path& path) { return parse(read_file(path)); }

const OrgDirectory::Entry* OrgDirectory::find(std::string_view alias) const {
  const auto it = entries_.find(normalize_org_key(alias));
  return it == entries_.end() ? nullptr : &it->second;
}

Region OrgDirectory::region_of(std::string_view organization) const {
  const Entry* entry = find(organization);
  return entry ? entry->region : Region::Other;
}

std::string OrgDirectory::canonical(std::string_view organization) const {
  const Entry* entry = find(organization);
  return entry ? entry->organization : trim(organization);
}

Region classify_region(std::string_view organization, const OrgDirectory& directory) {
  return directory.region_of(organization);
}

Date earliest_release_date() { return make_date(2022, 11, 30); }

bool is_valid_model_id(std::string_view id) {
  const auto slash = id.find('/');
  if (slash == std::string_view::npos || slash == 0 || slash + 1 >= id.size()) return false;
  if (id.find('/', slash + 1) != std::string_view::npos) return false;
  return std::all_of(id.begin(), id.end(), [](unsigned char c) {
    return std::isalnum(c) != 0 || c == '-' || c == '_' || c == '.' || c == '/';
  });
}

std::string model_namespace(std::string_view id) {
  const auto slash = id.find('/');
  return std::string(slash == std::string_view::npos ? id : id.substr(0, slash));
}

RegistryLoad load_registry(std::string_view content, const OrgDirectory& directory) {
  const CsvTable table = parse_csv(content);
  const auto id_col = table.column("model_id");
  const auto org_col = table.column("organization");
  const auto hint_col = table.column("region_hint");
  const auto total_col = table.column("total_params");
  const auto active_col = table.column("active_params");
  const auto date_col = table.column("release_date");
  const auto group_col = table.column("variant_group");
  if (!id_col || !org_col || !total_col || !date_col) {
    throw Error(ErrorKind::Format, kModule,
                "registry header must contain model_id, organization, total_params, release_date");
  }

  RegistryLoad load;
  for (const auto& row : table.rows) {
    const std::string id{table.cell(row, id_col)};
    auto fail = [&](std::string message) {
      load.report.errors.push_back({row.line, id, std::move(message)});
    };
    if (row.fields.size() > table.header.size()) {
      fail("too many fields");
      continue;
    }
    if (!is_valid_model_id(id)) {
      fail("invalid model id");
      continue;
    }
    const std::string org{table.cell(row, org_col)};
    if (org.empty()) {
      fail("missing organization");
      continue;
    }
    const auto total = parse_param_count(table.cell(row, total_col));
    if (!total || *total <= 0) {
      fail(fmt::format("unparsable parameter count '{}'", table.cell(row, total_col)));
      continue;
    }
    std::optional<std::int64_t> active;
    if (const auto text = table.cell(row, active_col); !text.empty()) {
      active = parse_param_count(text);
      if (!active || *active <= 0) {
        fail(fmt::format("unparsable active parameter count '{}'", text));
        continue;
      }
      if (*active > *total) {
        fail("active parameters exceed total parameters");
        continue;
      }
    }
    const auto release = parse_date(table.cell(row, date_col));
    if (!release) {
      fail(fmt::format("unparsable release date '{}'", table.cell(row, date_col)));
      continue;
    }
    if (*release < earliest_release_date()) {
      fail(fmt::format("release date {} precedes 2022-11-30", format_date(*release)));
      continue;
    }
    Region region = directory.region_of(org);
    if (const auto hint = table.cell(row, hint_col); !hint.empty()) {
      const auto parsed = parse_region(hint);
      if (!parsed) {
        fail(fmt::format("unknown region hint '{}'", hint));
        continue;
      }
      region = *parsed;
    }
    ModelRecord record;
    record.model_id = id;
    record.organization = directory.canonical(org);
    record.region = region;
    record.total_params = *total;
    record.active_params = active;
    record.release_date = *release;
    record.variant_group = std::string(table.cell(row, group_col));
    load.records.push_back(std::move(record));
  }
  return load;
}

VariantGroups resolve_variant_group(std::span<const ModelRecord> records) {
  std::set<std::string_view> seen;
  VariantGroups groups;
  for (const auto& record : records) {
    if (!seen.insert(record.model_id).second) {
      throw Error(ErrorKind::Duplicate, kModule, fmt::format("duplicate model id '{}'", record.model_id));
    }
    groups[record.group_key()].push_back(record.model_id);
  }
  for (auto& [key, members] : groups) std::sort(members.begin(), members.end());
  return groups;
}

Registry::Registry(std::vector<ModelRecord> records) : records_(std::move(records)) {
  groups_ = resolve_variant_group(records_);
  for (std::size_t i = 0; i < records_.size(); ++i) index_.emplace(records_[i].model_id, i);
}

const ModelRecord* Registry::find(std::string_view model_id) const {
  const auto it = index_.find(model_id);
  return it == index_.end() ? nullptr : &records_[it->second];
}

const std::vector<std::string>* Registry::group_members(std::string_view group_key) const {
  const auto it = groups_.find(std::string(group_key));
  return it == groups_.end() ? nullptr : &it->second;
}

Registry load_registry_file(const std::filesystem::path& path, ValidationReport* report,
                            const OrgDirectory& directory) {
  RegistryLoad load = load_registry(read_file(path), directory);
  if (report) *report = std::move(load.report);
  return Registry(std::move(load.records));
}

}  // namespace adopt
