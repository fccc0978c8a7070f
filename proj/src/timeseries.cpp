#include "adopt/timeseries.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "adopt/error.hpp"

namespace adopt {

void DownloadSeries::validate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].value < 0) {
      throw Error(ErrorKind::Validation, "series",
                  fmt::format("{}: negative cumulative value on {}", model_id, format_date(points[i].date)));
    }
    if (i > 0 && points[i].date <= points[i - 1].date) {
      throw Error(ErrorKind::Validation, "series",
                  fmt::format("{}: dates not strictly increasing at {}", model_id,
                              format_date(points[i].date)));
    }
  }
}

std::string flag_tokens(std::uint8_t flags) {
  static constexpr std::pair<std::uint8_t, const char*> kNames[] = {
      {kFlagOutlier, "outlier"},   {kFlagClamped, "clamped"},   {kFlagNegative, "negative"},
      {kFlagTooShort, "too_short"}, {kFlagDecrease, "decrease"},
  };
  std::string out;
  for (const auto& [bit, name] : kNames) {
    if ((flags & bit) == 0) continue;
    if (!out.empty()) out.push_back(';');
    out += name;
  }
  return out;
}

const MonthlyPoint* MonthlySeries::at(Date label) const {
  const auto it = std::lower_bound(points.begin(), points.end(), label,
                                   [](const MonthlyPoint& p, Date d) { return p.label < d; });
  return (it != points.end() && it->label == label) ? &*it : nullptr;
}

void MonthlySeries::validate_labels() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (month_start(points[i].label) != points[i].label) {
      throw Error(ErrorKind::Validation, "series",
                  fmt::format("{}: month label {} is not a first-of-month date", id,
                              format_date(points[i].label)));
    }
    if (i > 0 && points[i].label <= points[i - 1].label) {
      throw Error(ErrorKind::Validation, "series",
                  fmt::format("{}: month labels not strictly increasing at {}", id,
                              format_date(points[i].label)));
    }
  }
}

bool MonthlySeries::is_non_decreasing() const {
  return std::adjacent_find(points.begin(), points.end(), [](const auto& a, const auto& b) {
           return b.value < a.value;
         }) == points.end();
}

}  // namespace adopt
