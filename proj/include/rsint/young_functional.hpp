#pragma once

// The functional
//
//   I_f(a,b) = ∫_a^b ∫_s^b f(s,t)/(t-s)^2 dt ds + ∫_a^b f(a,t)/(t-a) dt
//            + ∫_a^b f(s,b)/(b-s) ds + f(a,b)
//
// for dominating functions f(s,t) of cross increments, its mesh-truncated
// variant, and the classical Young series test.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

#include "rsint/gaussian_paths.hpp"

namespace rsint {

/// An increasing bijection of [0, inf) given by forward and inverse maps.
class PhiFunction {
 public:
  /// Validates phi(0) = 0, strict monotonicity on probes and
  /// phi(phi^{-1}(u)) = u to 1e-10 relative.
  PhiFunction(std::function<double(double)> forward, std::function<double(double)> inverse, std::string label);

  /// x -> x^p.
  static PhiFunction power(double p);
  /// Preset lookup: "power:<p>", "identity".
  static PhiFunction from_label(const std::string& label);

  double operator()(double x) const { return forward_(x); }
  double inverse(double u) const { return inverse_(u); }
  const std::string& label() const noexcept { return label_; }

 private:
  std::function<double(double)> forward_;
  std::function<double(double)> inverse_;
  std::string label_;
};

/// Bivariate bound f(s,t), s <= t, with f(t,t) = 0.
///
/// `power_law` is K (t-s)^alpha t^{-beta}; with `Anchor::start` the
/// singular factor is s^{-beta} instead.  `simple_power` is K (t-s)^alpha.
class DominatingFunction {
 public:
  enum class Kind { power_law, simple_power, custom };
  enum class Anchor { end, start };

  static DominatingFunction power_law(double k, double alpha, double beta, Anchor anchor = Anchor::end);
  static DominatingFunction simple_power(double k, double alpha);
  /// Probes f(t,t) = 0 and, when declared_monotone, monotonicity on at least
  /// 100 random pairs of [lo, hi].
  static DominatingFunction custom(std::function<double(double, double)> f, double lo, double hi,
                                   bool declared_monotone, std::uint64_t probe_seed = 0);

  double operator()(double s, double t) const;

  Kind kind() const noexcept { return kind_; }
  Anchor anchor() const noexcept { return anchor_; }
  bool declared_monotone() const noexcept { return monotone_; }
  double k() const noexcept { return k_; }
  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  bool is_power() const noexcept { return kind_ != Kind::custom; }

  /// Same function multiplied by c >= 0.
  DominatingFunction scaled(double c) const;

 private:
  DominatingFunction() = default;

  Kind kind_ = Kind::custom;
  Anchor anchor_ = Anchor::end;
  double k_ = 0.0, alpha_ = 0.0, beta_ = 0.0;
  bool monotone_ = true;
  std::function<double(double, double)> custom_;
};

struct QuadConfig {
  int graded_levels = 40;         ///< minimum dyadic bands toward the diagonal
  int gauss_points = 16;          ///< Gauss-Legendre nodes per band
  double diagonal_cutoff = 1e-4;  ///< the innermost sliver is narrower than this times the width

  /// Throws ArgumentError unless levels >= 4, points >= 4 and
  /// 0 < diagonal_cutoff < 1e-3.
  void validate() const;
  /// Bands actually used: max(graded_levels, ceil(log2(1/diagonal_cutoff))).
  int effective_levels() const;
};

/// The four terms of I_f and their sum.  A divergent functional is an
/// explicit result with `total == +inf`, never an exception.
struct YoungValue {
  double double_integral = 0.0;
  double left_boundary = 0.0;   ///< ∫ f(a,t)/(t-a) dt
  double right_boundary = 0.0;  ///< ∫ f(s,b)/(b-s) ds
  double corner = 0.0;          ///< f(a,b), or g(a,b) when truncated
  double total = 0.0;
  /// Estimated contribution of dropped diagonal slivers (custom f only).
  double residual_estimate = 0.0;

  bool divergent() const noexcept;
};

YoungValue eval_If(const DominatingFunction& f, double a, double b, const QuadConfig& cfg = {});

/// I_g(a,b) for g(s,t) = f(s,t) 1(t < s + 3d).
YoungValue eval_Ig_truncated(const DominatingFunction& f, double a, double b, double d,
                             const QuadConfig& cfg = {});

/// Closed-form upper bounds for the three integral terms of I_g(0,T) with
/// f(s,t) = K (t-s)^{H/q+H} t^{-H/q}.
struct PowerLawBound {
  double term1 = 0.0;   ///< K T^{1-H/q} (3d)^{H/q+H-1} / ((1-H/q)(H/q+H-1))
  double term2 = 0.0;   ///< K (3d)^H (T/d)^{1-H/q} / H
  double term3 = 0.0;   ///< same as term2
  double corner = 0.0;  ///< g(0,T); zero whenever T >= 3d
  double total = 0.0;
};

PowerLawBound power_law_bound(double k, HurstIndex h, double q, double t_total, double d);

enum class YoungVerdict { converges, diverges, inconclusive };
std::string to_string(YoungVerdict v);

struct YoungTest {
  double partial_sum = 0.0;
  double tail_slope = 0.0;
  YoungVerdict verdict = YoungVerdict::inconclusive;
};

/// Partial sum of phi^{-1}(1/n) psi^{-1}(1/n), n = 1..n_terms, and a
/// verdict from the log-log slope of the terms over n in [N/100, N]:
/// slope < -1.05 converges, slope >= -1 diverges, otherwise inconclusive.
YoungTest young_convergence_test(const PhiFunction& phi, const PhiFunction& psi, std::size_t n_terms);

}  // namespace rsint
