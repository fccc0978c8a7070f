#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adopt/date.hpp"
#include "adopt/timeseries.hpp"

namespace adopt {

inline constexpr std::string_view kSeriesModule = "series";

struct DailyDelta {
  Date date{};
  double delta = 0;  // downloads per day
  bool negative = false;
};

// One entry per calendar day after the first observation. A gap of g days
// between observations is attributed uniformly: each of those g days gets
// (cum_i - cum_{i-1}) / g. Counter decreases are kept and flagged.
std::vector<DailyDelta> daily_deltas(const DownloadSeries& series);

enum class FilterWindow { Global };

struct FilterConfig {
  double iqr_multiplier = 2.5;
  FilterWindow window = FilterWindow::Global;

  void validate() const;
};

struct FilterResult {
  DownloadSeries series;
  std::vector<Date> flagged_dates;  // ascending, each day whose delta was replaced
  bool too_short = false;
  int passes = 0;  // detection passes that found outliers
};

// Spike filter over the daily-delta distribution. Deltas outside
// [Q1 - k*IQR, Q3 + k*IQR] are replaced by the median delta and the
// cumulative series is rebuilt from the first point. Detection repeats on the
// rebuilt series until no delta falls outside the fences, so the result is a
// fixed point of the filter. A series with no outliers comes back
// bit-identical; fewer than 4 points come back unchanged with too_short set.
FilterResult iqr_filter(const DownloadSeries& series, const FilterConfig& config = {});

// Calendar-month view of a daily series: for every label L from the month
// after the first observation through the month after the last, the value of
// the last observation strictly before L. Decreases are flagged, not fixed.
MonthlySeries monthly_rollup(const DownloadSeries& series);

// Hands a filtered monthly history over to raw scraper deltas. Output equals
// the history through splice_date (which must be one of its labels); each
// later month adds the scraper's monthly delta, clamped at 0 and flagged when
// the counter went backwards. Throws Splice when the baseline is missing or
// the scraper has no observation before splice_date, and Gap when a month
// after the splice has no scraper observation at all.
MonthlySeries splice(const MonthlySeries& filtered_history, const DownloadSeries& scraper, Date splice_date);

// Clamped accumulation of a raw rollup so the result is non-decreasing.
MonthlySeries make_non_decreasing(MonthlySeries series);

// End-to-end monthly series for one model from whichever sources exist.
// With both sources the splice date defaults to the last history label.
MonthlySeries build_monthly(const std::string& id, const MonthlySeries* history,
                            const DownloadSeries* scraper, std::optional<Date> splice_date = std::nullopt);

// History stored as first-of-month labels, viewed as a monthly series.
MonthlySeries history_as_monthly(const DownloadSeries& history_points);

// Daily-resolution series for milestone lookups: monthly history values
// placed on the last day of the month they cover, followed by the scraper
// snapshots. History is only used before the first snapshot.
DownloadSeries merge_history_into_daily(const DownloadSeries& history_points, const DownloadSeries& snapshots);

// Per-group sums on the union of month labels. Each member contributes its
// carried-forward value, 0 before its first label. Ids absent from group_map
// go to "Other".
std::map<std::string, MonthlySeries> aggregate_group(std::span<const MonthlySeries> series_list,
                                                     const std::map<std::string, std::string>& group_map);

inline constexpr std::array<int, 7> kMilestones{7, 14, 30, 60, 90, 180, 365};

bool is_milestone(int t);

// Cumulative downloads t days after release (end-of-day). Exact snapshot
// values are returned as-is; otherwise the value is interpolated linearly
// between the surrounding snapshots, with the release date itself acting as a
// zero-download anchor when the target precedes the first snapshot. Absent
// when the target is after the last snapshot. Throws Domain for t outside the
// milestone set.
std::optional<double> milestone_value(const DownloadSeries& series, Date release_date, int t);

// to / from for two labels of one series. Throws Domain when a label is
// missing or the starting value is zero.
double growth_ratio(const MonthlySeries& series, Date from_label, Date to_label);

// "id,date,cumulative_downloads,flags" rows (flags ';'-joined).
std::string series_csv(const DownloadSeries& series, std::span<const Date> flagged_dates = {});
std::string series_csv(std::span<const MonthlySeries> series);

// Runs fn(i) for i in [0, count) on up to `threads` workers.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn);

}  // namespace adopt

#include "adopt/parallel_impl.hpp"
