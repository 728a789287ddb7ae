#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rsint {

/// Pairwise (cascade) summation in index order; deterministic for a fixed
/// input ordering.
double pairwise_sum(std::span<const double> xs);

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

/// Sample mean and standard error of the mean (n-1 denominator).
MeanStderr mean_and_stderr(std::span<const double> xs);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Weighted least squares for y = intercept + slope * x.  Empty weights
/// means ordinary least squares.
LineFit fit_line(std::span<const double> x, std::span<const double> y,
                 std::span<const double> weights = {});

/// Linear-interpolation quantile of an unsorted sample, q in [0, 1].
double quantile(std::vector<double> xs, double q);

}  // namespace rsint
