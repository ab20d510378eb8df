#pragma once

#include <span>
#include <vector>

namespace ridematch::stats {

double mean(std::span<const double> values);

// Population standard deviation (divide by n, not n-1).
double population_std(std::span<const double> values);

// Quantile by linear interpolation between order statistics:
// h = (n-1)*p, q = x[floor(h)] + frac(h) * (x[floor(h)+1] - x[floor(h)]).
// `sorted` must be ascending and non-empty; p is clamped to [0, 1].
double quantile_sorted(std::span<const double> sorted, double p);

// Convenience overload that copies and sorts.
double quantile(std::vector<double> values, double p);

}  // namespace ridematch::stats
