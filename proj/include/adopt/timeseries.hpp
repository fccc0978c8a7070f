#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "adopt/date.hpp"

namespace adopt {

struct SeriesPoint {
  Date date{};
  std::int64_t value = 0;  // cumulative downloads

  friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

// Dated cumulative observations for one model, strictly increasing in date.
// Raw hub counters may decrease; no monotonicity is assumed here.
struct DownloadSeries {
  std::string model_id;
  std::vector<SeriesPoint> points;

  bool empty() const { return points.empty(); }
  // Throws Validation when dates are not strictly increasing or a value is negative.
  void validate() const;

  friend bool operator==(const DownloadSeries&, const DownloadSeries&) = default;
};

enum SeriesFlag : std::uint8_t {
  kFlagNone = 0,
  kFlagOutlier = 1U << 0U,
  kFlagClamped = 1U << 1U,
  kFlagNegative = 1U << 2U,
  kFlagTooShort = 1U << 3U,
  kFlagDecrease = 1U << 4U,
};

// ';'-joined tokens, e.g. "outlier;clamped". Empty when no flag is set.
std::string flag_tokens(std::uint8_t flags);

struct MonthlyPoint {
  // First of the month; the value is cumulative downloads through the last
  // day of the previous month ("Aug 2025" = through July 31, 2025).
  Date label{};
  std::int64_t value = 0;
  std::uint8_t flags = kFlagNone;

  friend bool operator==(const MonthlyPoint&, const MonthlyPoint&) = default;
};

struct MonthlySeries {
  std::string id;  // model id or group name
  std::vector<MonthlyPoint> points;

  const MonthlyPoint* at(Date label) const;
  // Throws Validation when labels are not strictly increasing first-of-month dates.
  void validate_labels() const;
  bool is_non_decreasing() const;

  friend bool operator==(const MonthlySeries&, const MonthlySeries&) = default;
};

}  // namespace adopt
