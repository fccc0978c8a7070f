#include "adopt/ram.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include <fmt/format.h>

#include "adopt/csv.hpp"
#include "adopt/error.hpp"
#include "adopt/series.hpp"
#include "adopt/stats.hpp"

namespace adopt {

namespace {

constexpr std::string_view kModule = "ram";

[[noreturn]] void fail(ErrorKind kind, const std::string& message) { throw Error(kind, std::string(kModule), message); }

DownloadSeries truncate_at(const DownloadSeries& series, Date last) {
  DownloadSeries out{series.model_id, {}};
  for (const auto& p : series.points) {
    if (p.date > last) break;
    out.points.push_back(p);
  }
  return out;
}

}  // namespace

const MilestoneStats* ReferenceCurve::at(int t) const {
  for (const auto& m : milestones) {
    if (m.t == t) return &m;
  }
  return nullptr;
}

void ReferenceCurve::validate() const {
  if (members.size() != kReferenceSize) {
    fail(ErrorKind::Validation, fmt::format("reference curve for {} has {} members, expected {}",
                                            to_string(bucket), members.size(), kReferenceSize));
  }
  for (const auto& m : milestones) {
    if (!is_milestone(m.t)) fail(ErrorKind::Validation, fmt::format("{} is not a milestone", m.t));
    if (!(m.q1 <= m.median && m.median <= m.q3)) {
      fail(ErrorKind::Validation, fmt::format("reference curve for {} violates q1 <= median <= q3 at t={}",
                                              to_string(bucket), m.t));
    }
  }
}

std::vector<std::string> select_top10(SizeBucket bucket, const Registry& registry, const SeriesMap& series,
                                      Date reference_date) {
  std::vector<std::pair<std::int64_t, std::string>> ranked;
  for (const auto& record : registry.records()) {
    if (record.bucket() != bucket) continue;
    const auto it = series.find(record.model_id);
    if (it == series.end()) continue;
    const auto& points = it->second.points;
    const auto last = std::upper_bound(points.begin(), points.end(), reference_date,
                                       [](Date d, const SeriesPoint& p) { return d < p.date; });
    if (last == points.begin()) continue;
    ranked.emplace_back(std::prev(last)->value, record.model_id);
  }
  if (ranked.size() < kReferenceSize) {
    fail(ErrorKind::InsufficientData,
         fmt::format("bucket {} has {} models with data as of {}, need {}", to_string(bucket), ranked.size(),
                     format_date(reference_date), kReferenceSize));
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::vector<std::string> top;
  for (std::size_t i = 0; i < kReferenceSize; ++i) top.push_back(ranked[i].second);
  return top;
}

MilestoneStats reference_stats(std::span<const double> values, int t) {
  if (values.empty()) {
    fail(ErrorKind::InsufficientData, fmt::format("no reference values at t={}", t));
  }
  const Quartiles q = quartiles(std::vector<double>(values.begin(), values.end()));
  return {t, q.median, q.q1, q.q3, values.size()};
}

ReferenceCurve build_reference_curve(SizeBucket bucket, const Registry& registry, const SeriesMap& series,
                                     Date reference_date) {
  ReferenceCurve curve;
  curve.bucket = bucket;
  curve.reference_date = reference_date;
  curve.members = select_top10(bucket, registry, series, reference_date);

  std::vector<std::pair<Date, DownloadSeries>> member_series;
  for (const auto& id : curve.members) {
    member_series.emplace_back(registry.find(id)->release_date, truncate_at(series.find(id)->second, reference_date));
  }
  for (int t : kMilestones) {
    std::vector<double> values;
    for (const auto& [release, s] : member_series) {
      if (s.empty()) continue;
      if (auto v = milestone_value(s, release, t)) values.push_back(*v);
    }
    if (values.empty()) continue;
    curve.milestones.push_back(reference_stats(values, t));
  }
  return curve;
}

double ram_score(double downloads, double median) {
  if (!(median > 0)) fail(ErrorKind::Domain, fmt::format("reference median must be positive, got {}", median));
  return downloads / median;
}

DownloadSeries sum_series(std::string id, std::span<const DownloadSeries* const> members) {
  DownloadSeries out{std::move(id), {}};
  if (members.empty()) return out;
  std::optional<Date> end;
  std::set<Date> dates;
  for (const auto* m : members) {
    if (m->empty()) return out;
    end = end ? std::min(*end, m->points.back().date) : m->points.back().date;
    for (const auto& p : m->points) dates.insert(p.date);
  }
  std::vector<std::size_t> cursor(members.size(), 0);
  std::vector<std::int64_t> carried(members.size(), 0);
  for (Date d : dates) {
    if (d > *end) break;
    std::int64_t total = 0;
    for (std::size_t k = 0; k < members.size(); ++k) {
      const auto& pts = members[k]->points;
      while (cursor[k] < pts.size() && pts[cursor[k]].date <= d) carried[k] = pts[cursor[k]++].value;
      total += carried[k];
    }
    out.points.push_back({d, total});
  }
  return out;
}

std::vector<RamScore> ram_trajectory(std::string_view model_or_group, const Registry& registry,
                                     const SeriesMap& series, const ReferenceCurve& reference) {
  std::vector<std::string> ids;
  if (const auto* members = registry.group_members(model_or_group)) {
    ids = *members;
  } else if (const auto* record = registry.find(model_or_group)) {
    ids.push_back(record->model_id);
  } else {
    fail(ErrorKind::Validation, fmt::format("'{}' is neither a tracked model nor a variant group", model_or_group));
  }

  const ModelRecord* lead = registry.find(model_or_group);
  if (lead == nullptr) lead = registry.find(ids.front());
  Date release = lead->release_date;
  std::vector<const DownloadSeries*> member_series;
  static const DownloadSeries kEmpty;
  for (const auto& id : ids) {
    release = std::min(release, registry.find(id)->release_date);
    const auto it = series.find(id);
    member_series.push_back(it == series.end() ? &kEmpty : &it->second);
  }
  if (lead->bucket() != reference.bucket) {
    fail(ErrorKind::Unavailable, fmt::format("no reference curve for bucket {} (curve is {})", to_string(lead->bucket()),
                                             to_string(reference.bucket)));
  }

  const DownloadSeries combined = member_series.size() == 1 ? *member_series.front()
                                                            : sum_series(std::string(model_or_group), member_series);
  std::vector<RamScore> out;
  if (combined.empty()) return out;
  for (int t : kMilestones) {
    const auto downloads = milestone_value(combined, release, t);
    const MilestoneStats* stats = reference.at(t);
    if (!downloads || stats == nullptr) break;
    out.push_back({std::string(model_or_group), reference.bucket, t, *downloads, ram_score(*downloads, stats->median),
                   reference.reference_date, stats->reduced_support()});
  }
  return out;
}

nlohmann::json to_json(const ReferenceCurve& curve) {
  nlohmann::json milestones = nlohmann::json::array();
  for (const auto& m : curve.milestones) {
    milestones.push_back({{"t", m.t}, {"median", m.median}, {"q1", m.q1}, {"q3", m.q3}, {"support", m.support}});
  }
  return {{"bucket", std::string(to_string(curve.bucket))},
          {"reference_date", format_date(curve.reference_date)},
          {"milestones", milestones},
          {"members", curve.members}};
}

ReferenceCurve curve_from_json(const nlohmann::json& json) {
  try {
    ReferenceCurve curve;
    const auto bucket = parse_size_bucket(json.at("bucket").get<std::string>());
    const auto date = parse_date(json.at("reference_date").get<std::string>());
    if (!bucket || !date) fail(ErrorKind::Format, "reference curve has an invalid bucket or reference_date");
    curve.bucket = *bucket;
    curve.reference_date = *date;
    curve.members = json.at("members").get<std::vector<std::string>>();
    for (const auto& m : json.at("milestones")) {
      MilestoneStats stats{m.at("t").get<int>(), m.at("median").get<double>(), m.at("q1").get<double>(),
                           m.at("q3").get<double>(), m.value("support", kReferenceSize)};
      curve.milestones.push_back(stats);
    }
    std::sort(curve.milestones.begin(), curve.milestones.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
    curve.validate();
    return curve;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Format, fmt::format("malformed reference curve: {}", e.what()));
  }
}

std::string scores_csv(std::span<const RamScore> scores) {
  std::string out = "model,bucket,t,downloads,score,reference_date\n";
  for (const auto& s : scores) {
    out += fmt::format("{},{},{},{},{:.2f},{}\n", csv_escape(s.model_id), to_string(s.bucket), s.t,
                       std::llround(s.downloads), s.score, format_date(s.reference_date));
  }
  return out;
}

}  // namespace adopt
