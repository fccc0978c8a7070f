#pragma once

#include <span>
#include <vector>

namespace adopt {

// Linear interpolation between order statistics ("type 7"): for sorted
// x[0..n-1], h = (n-1)p and Q(p) = x[floor h] + (h - floor h)(x[floor h + 1] - x[floor h]).
// Shared by the spike filter and the reference curves so both agree bit-for-bit.
double quantile_sorted(std::span<const double> sorted, double p);

struct Quartiles {
  double q1 = 0;
  double median = 0;
  double q3 = 0;
  double iqr() const { return q3 - q1; }
};

Quartiles quartiles(std::vector<double> values);

}  // namespace adopt
