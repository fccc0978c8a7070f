#include "adopt/stats.hpp"

#include <algorithm>
#include <cmath>

#include "adopt/error.hpp"

namespace adopt {

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(ErrorKind::InsufficientData, "stats", "quantile of empty sample");
  if (p < 0.0 || p > 1.0) throw Error(ErrorKind::Domain, "stats", "quantile probability outside [0,1]");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Quartiles quartiles(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return {quantile_sorted(values, 0.25), quantile_sorted(values, 0.5), quantile_sorted(values, 0.75)};
}

}  // namespace adopt
