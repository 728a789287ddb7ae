#pragma once

// Gauss rules and a dyadically graded 1-D integrator for integrands with
// power-type endpoint singularities.

#include <cstddef>
#include <functional>
#include <vector>

namespace rsint {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].  Cached; safe to call from
/// several threads.
const GaussRule& gauss_legendre(std::size_t n);

/// n-point Gauss-Hermite rule for the weight exp(-x^2) on the real line.
const GaussRule& gauss_hermite(std::size_t n);

/// Integral of g over [a, b] with one Gauss-Legendre panel.
double gauss_legendre_panel(const std::function<double(double)>& g, double a, double b,
                            const GaussRule& rule);

/// Expectation E g(xi), xi ~ N(0,1), with an n-node Gauss-Hermite rule.
double gauss_hermite_expectation(const std::function<double(double)>& g, std::size_t n);

/// How the graded integrator treats one endpoint of its interval.
struct EndpointModel {
  /// Marks a (possibly) singular endpoint.  Singular ends without a tail take
  /// part in the divergence heuristic and report a residual.
  bool singular = false;
  /// Closed-form integral over the innermost sliver of the given width.  If
  /// empty, regular ends use a midpoint value and singular ends are dropped.
  std::function<double(double width)> tail;
};

struct GradedSpec {
  int singular_levels = 40;  ///< dyadic bands toward a singular end
  int regular_levels = 16;   ///< dyadic bands toward a regular end
  int points = 16;           ///< Gauss-Legendre nodes per band
  EndpointModel lower;
  EndpointModel upper;
};

struct GradedResult {
  double value = 0.0;
  /// Geometric extrapolation of dropped singular tails (0 when a tail
  /// function was supplied).
  double residual = 0.0;
  /// Innermost three band contributions toward a singular end were
  /// non-decreasing.
  bool divergent = false;
};

/// Integral of g over [lo, hi].  The interval is split at its midpoint and
/// each half is covered by bands [e + 2^{-k-1}L, e + 2^{-k}L] accumulating
/// toward the endpoint e; bands are summed from the outside in.
GradedResult graded_integral(const std::function<double(double)>& g, double lo, double hi,
                             const GradedSpec& spec);

}  // namespace rsint
