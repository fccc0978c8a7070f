#include "adopt/derivatives.hpp"

#include <algorithm>
#include <charconv>

#include <fmt/format.h>

#include "adopt/csv.hpp"
#include "adopt/error.hpp"

namespace adopt {

namespace {

constexpr std::string_view kModule = "derivatives";

bool is_relation(std::string_view word) {
  return word == "finetune" || word == "adapter" || word == "merge" || word == "quantized";
}

}  // namespace

std::optional<std::string> parse_base_model_tag(std::string_view raw) {
  std::string tag = trim(raw);
  std::string_view rest = tag;
  constexpr std::string_view kPrefix = "base_model:";
  if (rest.substr(0, kPrefix.size()) == kPrefix) {
    rest.remove_prefix(kPrefix.size());
    const auto colon = rest.find(':');
    if (colon != std::string_view::npos) {
      if (!is_relation(rest.substr(0, colon))) return std::nullopt;
      rest.remove_prefix(colon + 1);
    }
  }
  if (!is_valid_model_id(rest)) return std::nullopt;
  return std::string(rest);
}

std::string_view to_string(RejectionCause cause) {
  switch (cause) {
    case RejectionCause::UntrackedBase: return "untracked_base";
    case RejectionCause::TooFewDownloads: return "too_few_downloads";
    case RejectionCause::LocalReupload: return "local_reupload";
  }
  return "unknown";
}

std::size_t DerivativeFilterResult::rejected_total() const {
  std::size_t total = 0;
  for (const auto& [cause, n] : rejected) total += n;
  return total;
}

DerivativeFilterResult filter_derivatives(std::span<const DerivativeRecord> records, const Registry& registry,
                                          const DerivativeRules& rules) {
  std::vector<std::string> excluded;
  for (const auto& f : rules.excluded_formats) excluded.push_back(to_lower(f));

  DerivativeFilterResult result;
  for (const auto& record : records) {
    std::set<std::string> bases;
    for (const auto& tag : record.base_tags) {
      if (auto base = parse_base_model_tag(tag); base && registry.contains(*base)) bases.insert(*base);
    }
    if (bases.empty()) {
      ++result.rejected[RejectionCause::UntrackedBase];
      continue;
    }
    if (record.lifetime_downloads <= rules.min_downloads_exclusive) {
      ++result.rejected[RejectionCause::TooFewDownloads];
      continue;
    }
    const std::string child = to_lower(record.child_id);
    const bool reupload = std::any_of(excluded.begin(), excluded.end(), [&](const std::string& marker) {
      if (child.find(marker) != std::string::npos) return true;
      return std::any_of(record.format_tags.begin(), record.format_tags.end(),
                         [&](const std::string& tag) { return to_lower(tag).find(marker) != std::string::npos; });
    });
    if (reupload) {
      ++result.rejected[RejectionCause::LocalReupload];
      continue;
    }
    result.accepted.push_back({record, {bases.begin(), bases.end()}});
  }
  return result;
}

std::map<std::string, GroupShare> derivative_share(std::span<const AcceptedDerivative> accepted,
                                                   const Registry& registry, DerivativeGrouping group_by,
                                                   Date month) {
  const Date from = month_start(month);
  const Date to = next_month_start(month);
  std::map<std::string, GroupShare> shares;
  std::size_t total = 0;
  for (const auto& item : accepted) {
    if (item.record.created_at < from || item.record.created_at >= to) continue;
    for (const auto& base : item.tracked_bases) {
      const ModelRecord* model = registry.find(base);
      if (model == nullptr) continue;
      const std::string group =
          group_by == DerivativeGrouping::Region ? std::string(to_string(model->region)) : model->organization;
      ++shares[group].count;
      ++total;
    }
  }
  for (auto& [group, share] : shares) {
    share.share = static_cast<double>(share.count) / static_cast<double>(total);
  }
  return shares;
}

DerivativeLoad load_derivatives(std::string_view content) {
  const CsvTable table = parse_csv(content);
  const auto child_col = table.column("child_id");
  const auto base_col = table.column("base_tag");
  const auto dl_col = table.column("lifetime_downloads");
  const auto fmt_col = table.column("format_tags");
  const auto created_col = table.column("created_at");
  if (!child_col || !base_col || !dl_col || !created_col) {
    throw Error(ErrorKind::Format, std::string(kModule),
                "derivative header must be child_id,base_tag,lifetime_downloads,format_tags,created_at");
  }
  DerivativeLoad load;
  for (const auto& row : table.rows) {
    const std::string child{table.cell(row, child_col)};
    auto fail = [&](std::string message) { load.report.errors.push_back({row.line, child, std::move(message)}); };
    if (!is_valid_model_id(child)) {
      fail("invalid child id");
      continue;
    }
    const auto dl_text = table.cell(row, dl_col);
    std::int64_t downloads = -1;
    const auto [ptr, ec] = std::from_chars(dl_text.data(), dl_text.data() + dl_text.size(), downloads);
    if (ec != std::errc{} || ptr != dl_text.data() + dl_text.size() || downloads < 0) {
      fail(fmt::format("invalid lifetime_downloads '{}'", dl_text));
      continue;
    }
    const auto created = parse_date(table.cell(row, created_col));
    if (!created) {
      fail(fmt::format("invalid created_at '{}'", table.cell(row, created_col)));
      continue;
    }
    DerivativeRecord record{child, {}, downloads, {}, *created};
    for (auto& tag : split(table.cell(row, base_col), ';')) {
      if (auto t = trim(tag); !t.empty()) record.base_tags.push_back(std::move(t));
    }
    for (auto& tag : split(table.cell(row, fmt_col), ';')) {
      if (auto t = trim(tag); !t.empty()) record.format_tags.insert(std::move(t));
    }
    load.records.push_back(std::move(record));
  }
  return load;
}

}  // namespace adopt
