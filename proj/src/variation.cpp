#include "rsint/variation.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "rsint/errors.hpp"
#include "rsint/parallel.hpp"
#include "rsint/stats.hpp"

namespace rsint {

GridFunction::GridFunction(TimeGrid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.size()) throw ArgumentError("GridFunction: grid and value lengths differ");
  if (values.size() < 2) throw ArgumentError("GridFunction needs at least two points");
}

namespace {

// Returns the run count when the sequence takes at most two values, else 0.
std::size_t two_valued_runs(std::span<const double> v, double& other) {
  const double first = v[0];
  bool have_other = false;
  std::size_t runs = 1;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] == v[i - 1]) continue;
    if (v[i] != first) {
      if (!have_other) {
        other = v[i];
        have_other = true;
      } else if (v[i] != other) {
        return 0;
      }
    }
    ++runs;
  }
  if (!have_other) other = first;
  return runs;
}

}  // namespace

double phi_variation(std::span<const double> values, const PhiFunction& phi, const VariationOptions& opts) {
  const std::size_t n = values.size();
  if (n < 2) throw ArgumentError("phi_variation needs at least two values");
  for (double x : values)
    if (!std::isfinite(x)) throw ArgumentError("phi_variation: non-finite value");

  double other = 0.0;
  if (const std::size_t runs = two_valued_runs(values, other); runs > 0)
    return phi(std::abs(other - values[0])) * static_cast<double>(runs - 1);

  if (n > opts.max_points)
    throw ArgumentError("phi_variation: " + std::to_string(n) + " points exceed the dynamic-programming cap of " +
                        std::to_string(opts.max_points));

  std::vector<double> best(n, -std::numeric_limits<double>::infinity());
  best[0] = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    double b = best[j];
    const double vj = values[j];
    for (std::size_t i = 0; i < j; ++i) {
      const double cand = best[i] + phi(std::abs(vj - values[i]));
      if (cand > b) b = cand;
    }
    best[j] = b;
  }
  return best[n - 1];
}

double phi_variation_grid(const GridFunction& f, const PhiFunction& phi, const VariationOptions& opts) {
  return phi_variation(f.values, phi, opts);
}

std::vector<VariationRow> indicator_variation_experiment(HurstIndex h, const PhiFunction& phi,
                                                         const std::vector<int>& depths, std::size_t paths,
                                                         std::uint64_t seed, int threads) {
  if (!(h.value() > 0.5)) throw RegimeError("indicator variation experiment: Hurst index too small", "H > 1/2");
  if (depths.empty()) throw ArgumentError("indicator variation experiment needs at least one depth");
  for (std::size_t k = 0; k < depths.size(); ++k) {
    if (depths[k] < 1 || depths[k] > 24) throw ArgumentError("depths must lie in [1, 24]");
    if (k > 0 && depths[k] <= depths[k - 1]) throw ArgumentError("depths must be strictly increasing");
  }
  if (paths < 100) throw ArgumentError("indicator variation experiment needs at least 100 paths");

  const int top = depths.back();
  const std::size_t n_fine = std::size_t{1} << top;
  const CirculantSampler sampler(n_fine, 1.0, h);
  const std::size_t nd = depths.size();
  std::vector<double> v(nd * paths);

  parallel_for(paths, threads, [&](std::size_t p) {
    std::vector<double> b(n_fine + 1), x;
    sampler.draw_into(StreamId(seed, p, Substream::path), b);
    for (std::size_t k = 0; k < nd; ++k) {
      const std::size_t stride = std::size_t{1} << (top - depths[k]);
      x.clear();
      for (std::size_t i = 0; i <= n_fine; i += stride) x.push_back(b[i] > 0.0 ? 1.0 : 0.0);
      v[k * paths + p] = phi_variation(x, phi);
      if (k > 0 && v[k * paths + p] < v[(k - 1) * paths + p])
        throw NumericalError("grid variation decreased under refinement on path " + std::to_string(p));
    }
  });

  std::vector<VariationRow> rows;
  for (std::size_t k = 0; k < nd; ++k) {
    const std::span<const double> col(v.data() + k * paths, paths);
    const MeanStderr ms = mean_and_stderr(col);
    VariationRow row;
    row.depth = depths[k];
    row.n_grid = (std::size_t{1} << depths[k]) + 1;
    row.mean = ms.mean;
    row.std = ms.stderr_ * std::sqrt(static_cast<double>(paths));
    row.paths = paths;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace rsint
