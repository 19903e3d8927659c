#pragma once

#include <span>
#include <vector>

namespace polarnet::stats {

struct CcdfPoint {
  double value = 0.0;
  double fraction = 0.0;  // P(X >= value)

  bool operator==(const CcdfPoint&) const = default;
};

/// Empirical complementary CDF at each distinct value, ascending. The first
/// point is always 1.0.
std::vector<CcdfPoint> ccdf(std::span<const double> values);

/// Type-7 (linear interpolation) quantile of ascending-sorted data.
double quantile_sorted(std::span<const double> sorted, double p);

double mean(std::span<const double> values);
double median(std::span<const double> values);

/// Most frequent value; ties go to the smallest.
double mode(std::span<const double> values);

}  // namespace polarnet::stats
