#include "adopt/series.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "adopt/csv.hpp"
#include "adopt/error.hpp"
#include "adopt/stats.hpp"

namespace adopt {

namespace {

const std::string kModule{kSeriesModule};

// Repeated detection stops here even if the fences still catch something.
constexpr int kMaxFilterPasses = 64;

const SeriesPoint* last_before(const DownloadSeries& series, Date date) {
  const auto it = std::lower_bound(series.points.begin(), series.points.end(), date,
                                   [](const SeriesPoint& p, Date d) { return p.date < d; });
  return it == series.points.begin() ? nullptr : &*std::prev(it);
}

bool has_point_in(const DownloadSeries& series, Date from, Date to) {
  const auto it = std::lower_bound(series.points.begin(), series.points.end(), from,
                                   [](const SeriesPoint& p, Date d) { return p.date < d; });
  return it != series.points.end() && it->date < to;
}

}  // namespace

std::vector<DailyDelta> daily_deltas(const DownloadSeries& series) {
  series.validate();
  if (series.points.size() < 2) {
    throw Error(ErrorKind::InsufficientData, kModule,
                fmt::format("{}: daily deltas need at least 2 points", series.model_id));
  }
  std::vector<DailyDelta> out;
  for (std::size_t i = 1; i < series.points.size(); ++i) {
    const auto& prev = series.points[i - 1];
    const auto& cur = series.points[i];
    const int gap = days_between(prev.date, cur.date);
    const double rate = static_cast<double>(cur.value - prev.value) / gap;
    for (int d = 1; d <= gap; ++d) out.push_back({add_days(prev.date, d), rate, rate < 0});
  }
  return out;
}

void FilterConfig::validate() const {
  if (!(iqr_multiplier > 0) || !std::isfinite(iqr_multiplier)) {
    throw Error(ErrorKind::Validation, kModule, "iqr_multiplier must be positive");
  }
}

FilterResult iqr_filter(const DownloadSeries& series, const FilterConfig& config) {
  config.validate();
  series.validate();
  FilterResult result{series, {}, false, 0};
  if (series.points.size() < 4) {
    result.too_short = true;
    return result;
  }

  const double k = config.iqr_multiplier;
  std::set<Date> flagged;
  std::vector<double> daily;
  std::vector<char> outlier;
  for (int pass = 0; pass < kMaxFilterPasses; ++pass) {
    const auto& points = result.series.points;
    daily.clear();
    for (std::size_t i = 1; i < points.size(); ++i) {
      const int gap = days_between(points[i - 1].date, points[i].date);
      const double rate = static_cast<double>(points[i].value - points[i - 1].value) / gap;
      daily.insert(daily.end(), static_cast<std::size_t>(gap), rate);
    }
    const Quartiles q = quartiles(daily);
    const double lo = q.q1 - k * q.iqr();
    const double hi = q.q3 + k * q.iqr();

    outlier.assign(points.size(), 0);
    bool any = false;
    for (std::size_t i = 1; i < points.size(); ++i) {
      const int gap = days_between(points[i - 1].date, points[i].date);
      const double rate = static_cast<double>(points[i].value - points[i - 1].value) / gap;
      if (rate < lo || rate > hi) {
        outlier[i] = 1;
        any = true;
      }
    }
    if (!any) break;
    ++result.passes;

    std::vector<SeriesPoint> rebuilt;
    rebuilt.reserve(points.size());
    rebuilt.push_back(points.front());
    for (std::size_t i = 1; i < points.size(); ++i) {
      const int gap = days_between(points[i - 1].date, points[i].date);
      std::int64_t step = points[i].value - points[i - 1].value;
      if (outlier[i] != 0) {
        step = std::llround(q.median * gap);
        for (int d = 1; d <= gap; ++d) flagged.insert(add_days(points[i - 1].date, d));
      }
      rebuilt.push_back({points[i].date, std::max<std::int64_t>(0, rebuilt.back().value + step)});
    }
    result.series.points = std::move(rebuilt);
  }
  result.flagged_dates.assign(flagged.begin(), flagged.end());
  return result;
}

MonthlySeries monthly_rollup(const DownloadSeries& series) {
  series.validate();
  if (series.empty()) {
    throw Error(ErrorKind::InsufficientData, kModule,
                fmt::format("{}: cannot roll up an empty series", series.model_id));
  }
  MonthlySeries out{series.model_id, {}};
  const Date last_label = next_month_start(series.points.back().date);
  std::size_t j = 0;
  for (Date label = next_month_start(series.points.front().date); label <= last_label;
       label = next_month_start(label)) {
    while (j < series.points.size() && series.points[j].date < label) ++j;
    MonthlyPoint point{label, series.points[j - 1].value, kFlagNone};
    if (!out.points.empty() && point.value < out.points.back().value) point.flags |= kFlagDecrease;
    out.points.push_back(point);
  }
  return out;
}

MonthlySeries splice(const MonthlySeries& filtered_history, const DownloadSeries& scraper, Date splice_date) {
  filtered_history.validate_labels();
  scraper.validate();
  const MonthlyPoint* baseline = filtered_history.at(splice_date);
  if (baseline == nullptr) {
    throw Error(ErrorKind::Splice, kModule,
                fmt::format("{}: no baseline value at splice date {}", filtered_history.id,
                            format_date(splice_date)));
  }

  MonthlySeries out{filtered_history.id, {}};
  for (const auto& p : filtered_history.points) {
    if (p.label <= splice_date) out.points.push_back(p);
  }
  if (scraper.empty() || scraper.points.back().date < splice_date) return out;

  const SeriesPoint* anchor = last_before(scraper, splice_date);
  if (anchor == nullptr) {
    throw Error(ErrorKind::Splice, kModule,
                fmt::format("{}: scraper has no observation before splice date {}", filtered_history.id,
                            format_date(splice_date)));
  }

  const MonthlySeries raw = monthly_rollup(scraper);
  Date prev_label = splice_date;
  std::int64_t prev_raw = anchor->value;
  std::int64_t running = baseline->value;
  for (const auto& p : raw.points) {
    if (p.label <= splice_date) continue;
    if (!has_point_in(scraper, prev_label, p.label)) {
      throw Error(ErrorKind::Gap, kModule,
                  fmt::format("{}: scraper has no observation in month {}", filtered_history.id,
                              format_month(prev_label)));
    }
    std::int64_t delta = p.value - prev_raw;
    std::uint8_t flags = kFlagNone;
    if (delta < 0) {
      delta = 0;
      flags |= kFlagClamped;
    }
    running += delta;
    out.points.push_back({p.label, running, flags});
    prev_label = p.label;
    prev_raw = p.value;
  }
  return out;
}

MonthlySeries make_non_decreasing(MonthlySeries series) {
  std::int64_t prev_raw = 0;
  std::int64_t running = 0;
  for (std::size_t i = 0; i < series.points.size(); ++i) {
    auto& p = series.points[i];
    const std::int64_t raw = p.value;
    if (i == 0) {
      running = raw;
    } else {
      std::int64_t delta = raw - prev_raw;
      if (delta < 0) {
        delta = 0;
        p.flags |= kFlagClamped;
      }
      running += delta;
    }
    p.flags &= static_cast<std::uint8_t>(~kFlagDecrease);
    p.value = running;
    prev_raw = raw;
  }
  return series;
}

MonthlySeries build_monthly(const std::string& id, const MonthlySeries* history, const DownloadSeries* scraper,
                            std::optional<Date> splice_date) {
  const bool has_history = history != nullptr && !history->points.empty();
  const bool has_scraper = scraper != nullptr && !scraper->empty();
  MonthlySeries out{id, {}};
  if (has_history && has_scraper) {
    out = splice(*history, *scraper, splice_date.value_or(history->points.back().label));
  } else if (has_history) {
    history->validate_labels();
    out = *history;
  } else if (has_scraper) {
    out = make_non_decreasing(monthly_rollup(*scraper));
  }
  out.id = id;
  return out;
}

MonthlySeries history_as_monthly(const DownloadSeries& history_points) {
  MonthlySeries out{history_points.model_id, {}};
  out.points.reserve(history_points.points.size());
  for (const auto& p : history_points.points) out.points.push_back({p.date, p.value, kFlagNone});
  out.validate_labels();
  return out;
}

DownloadSeries merge_history_into_daily(const DownloadSeries& history_points, const DownloadSeries& snapshots) {
  DownloadSeries out{snapshots.model_id.empty() ? history_points.model_id : snapshots.model_id, {}};
  const std::optional<Date> first_snapshot =
      snapshots.empty() ? std::nullopt : std::optional<Date>(snapshots.points.front().date);
  for (const auto& p : history_points.points) {
    const Date day = add_days(p.date, -1);
    if (first_snapshot && day >= *first_snapshot) break;
    out.points.push_back({day, p.value});
  }
  out.points.insert(out.points.end(), snapshots.points.begin(), snapshots.points.end());
  return out;
}

std::map<std::string, MonthlySeries> aggregate_group(std::span<const MonthlySeries> series_list,
                                                     const std::map<std::string, std::string>& group_map) {
  std::set<Date> label_set;
  for (const auto& s : series_list) {
    s.validate_labels();
    for (const auto& p : s.points) label_set.insert(p.label);
  }
  const std::vector<Date> labels(label_set.begin(), label_set.end());

  std::map<std::string, std::vector<std::int64_t>> sums;
  for (const auto& s : series_list) {
    const auto it = group_map.find(s.id);
    auto& totals = sums[it == group_map.end() ? std::string("Other") : it->second];
    totals.resize(labels.size(), 0);
    std::size_t j = 0;
    std::int64_t carried = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      while (j < s.points.size() && s.points[j].label <= labels[i]) carried = s.points[j++].value;
      totals[i] += carried;
    }
  }

  std::map<std::string, MonthlySeries> out;
  for (auto& [group, totals] : sums) {
    MonthlySeries series{group, {}};
    for (std::size_t i = 0; i < labels.size(); ++i) series.points.push_back({labels[i], totals[i], kFlagNone});
    out.emplace(group, std::move(series));
  }
  return out;
}

bool is_milestone(int t) { return std::find(kMilestones.begin(), kMilestones.end(), t) != kMilestones.end(); }

std::optional<double> milestone_value(const DownloadSeries& series, Date release_date, int t) {
  if (!is_milestone(t)) {
    throw Error(ErrorKind::Domain, kModule, fmt::format("{} days is not a milestone", t));
  }
  if (series.empty()) {
    throw Error(ErrorKind::InsufficientData, kModule, fmt::format("{}: empty series", series.model_id));
  }
  const Date target = add_days(release_date, t);
  if (target > series.points.back().date) return std::nullopt;

  const auto it = std::lower_bound(series.points.begin(), series.points.end(), target,
                                   [](const SeriesPoint& p, Date d) { return p.date < d; });
  if (it->date == target) return static_cast<double>(it->value);

  Date d0 = release_date;
  double v0 = 0.0;
  if (it != series.points.begin()) {
    d0 = std::prev(it)->date;
    v0 = static_cast<double>(std::prev(it)->value);
  }
  const double span = days_between(d0, it->date);
  const double offset = days_between(d0, target);
  return v0 + (static_cast<double>(it->value) - v0) * (offset / span);
}

double growth_ratio(const MonthlySeries& series, Date from_label, Date to_label) {
  const MonthlyPoint* from = series.at(from_label);
  const MonthlyPoint* to = series.at(to_label);
  if (from == nullptr || to == nullptr) {
    throw Error(ErrorKind::Domain, kModule,
                fmt::format("{}: no value at {}", series.id, format_date(from == nullptr ? from_label : to_label)));
  }
  if (from->value <= 0) {
    throw Error(ErrorKind::Domain, kModule,
                fmt::format("{}: growth ratio undefined from a zero value at {}", series.id,
                            format_date(from_label)));
  }
  return static_cast<double>(to->value) / static_cast<double>(from->value);
}

std::string series_csv(const DownloadSeries& series, std::span<const Date> flagged_dates) {
  std::string out = "id,date,cumulative_downloads,flags\n";
  const std::set<Date> flagged(flagged_dates.begin(), flagged_dates.end());
  const std::string id = csv_escape(series.model_id);
  for (std::size_t i = 0; i < series.points.size(); ++i) {
    const auto& p = series.points[i];
    // A point carries the outlier flag when any day of its interval was replaced.
    bool hit = false;
    if (i > 0) {
      const auto it = flagged.upper_bound(series.points[i - 1].date);
      hit = it != flagged.end() && *it <= p.date;
    }
    out += fmt::format("{},{},{},{}\n", id, format_date(p.date), p.value, hit ? "outlier" : "");
  }
  return out;
}

std::string series_csv(std::span<const MonthlySeries> series) {
  std::string out = "id,date,cumulative_downloads,flags\n";
  for (const auto& s : series) {
    const std::string id = csv_escape(s.id);
    for (const auto& p : s.points) {
      out += fmt::format("{},{},{},{}\n", id, format_date(p.label), p.value, flag_tokens(p.flags));
    }
  }
  return out;
}

}  // namespace adopt
