#include "rsint/stats.hpp"

#include <algorithm>
#include <cmath>

#include "rsint/errors.hpp"

namespace rsint {

double pairwise_sum(std::span<const double> xs) {
  constexpr std::size_t kBlock = 32;
  if (xs.size() <= kBlock) {
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

MeanStderr mean_and_stderr(std::span<const double> xs) {
  MeanStderr out;
  const std::size_t n = xs.size();
  if (n == 0) throw ArgumentError("mean of an empty sample");
  out.mean = pairwise_sum(xs) / static_cast<double>(n);
  if (n < 2) return out;
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) sq[i] = (xs[i] - out.mean) * (xs[i] - out.mean);
  const double var = pairwise_sum(sq) / static_cast<double>(n - 1);
  out.stderr_ = std::sqrt(var / static_cast<double>(n));
  return out;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y,
                 std::span<const double> weights) {
  if (x.size() != y.size() || x.size() < 2) throw ArgumentError("fit_line: need >= 2 paired points");
  if (!weights.empty() && weights.size() != x.size()) throw ArgumentError("fit_line: weight count mismatch");
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    sw += w;
    sx += w * x[i];
    sy += w * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    sxx += w * (x[i] - mx) * (x[i] - mx);
    sxy += w * (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) throw ArgumentError("fit_line: abscissae are all equal");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw ArgumentError("quantile of an empty sample");
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= xs.size()) return xs.back();
  const double frac = pos - static_cast<double>(i);
  return xs[i] + frac * (xs[i + 1] - xs[i]);
}

}  // namespace rsint
