#pragma once

// phi-variation of grid-sampled functions, restricted to sub-partitions of
// the sampling grid.  The grid-restricted value is a lower bound for the
// continuum phi-variation.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rsint/gaussian_paths.hpp"
#include "rsint/young_functional.hpp"

namespace rsint {

struct GridFunction {
  TimeGrid grid;
  std::vector<double> values;

  /// Throws ArgumentError unless the lengths match and there are >= 2 points.
  GridFunction(TimeGrid g, std::vector<double> v);
};

struct VariationOptions {
  /// Largest n accepted by the O(n^2) dynamic programme.  Sequences taking
  /// at most two distinct values are solved in O(n) and are exempt.
  std::size_t max_points = std::size_t{1} << 15;
};

/// max over index subsets {0 = i_0 < ... < i_k = n-1} of
/// sum phi(|v_{i_j} - v_{i_{j-1}}|).
double phi_variation(std::span<const double> values, const PhiFunction& phi, const VariationOptions& opts = {});
double phi_variation_grid(const GridFunction& f, const PhiFunction& phi, const VariationOptions& opts = {});

struct VariationRow {
  int depth = 0;
  std::size_t n_grid = 0;
  double mean = 0.0;
  double std = 0.0;
  std::size_t paths = 0;
};

/// Grid phi-variation of t -> 1(B_H(t) > 0) on the dyadic grids of [0,1]
/// with 2^depth + 1 points.  Each path is drawn once at the finest depth and
/// subsampled, so the per-path values are nested.
std::vector<VariationRow> indicator_variation_experiment(HurstIndex h, const PhiFunction& phi,
                                                         const std::vector<int>& depths, std::size_t paths,
                                                         std::uint64_t seed, int threads = 1);

}  // namespace rsint
