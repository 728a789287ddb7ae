#pragma once

// Gaussian inequalities for fBm: crossing probabilities and their bound,
// tail and exponential identities, and Gaussian integrability of the
// representing measure of a monotone driver F.

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rsint/gaussian_paths.hpp"

namespace rsint {

struct Atom {
  double location = 0.0;
  double mass = 0.0;
};

/// Lebesgue density `level` on [lo, hi]; the bounds may be infinite.
struct DensityPiece {
  double lo = 0.0;
  double hi = 0.0;
  double level = 0.0;
};

/// Non-decreasing F(x) = F0 + mu([0, x)) for x > 0, F0 - mu([x, 0)) for
/// x < 0, with mu a sum of atoms and piecewise-constant densities.  The
/// value at a jump is a convention; paths hit atoms with probability zero.
class MonotoneDriver {
 public:
  MonotoneDriver(std::string label, double f0, std::vector<Atom> atoms, std::vector<DensityPiece> pieces);

  static MonotoneDriver identity();
  static MonotoneDriver indicator_positive();
  /// Unit atoms at -2, -1, 1, 2.
  static MonotoneDriver staircase();
  /// Atoms of mass exp(n^2) at u = n, n = 0..n_max.
  static MonotoneDriver gaussian_stress(int n_max = 10);
  static MonotoneDriver zero();
  /// "identity", "indicator", "staircase", "gaussian_stress", "zero".
  static MonotoneDriver from_label(const std::string& label);
  static std::vector<MonotoneDriver> bundled();

  double operator()(double x) const;
  /// ∫_0^y F(x) dx in closed form.
  double primitive(double y) const;

  const std::string& label() const noexcept { return label_; }
  double f0() const noexcept { return f0_; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  const std::vector<DensityPiece>& pieces() const noexcept { return pieces_; }

 private:
  std::string label_;
  double f0_;
  std::vector<Atom> atoms_;
  std::vector<DensityPiece> pieces_;
};

struct CrossingQuery {
  double s = 0.0;
  double t = 1.0;
  double v = 0.0;
  double h = 0.5;
};

/// Regression of B_t on B_s: alpha = Cov(B_t,B_s)/Var(B_s) and
/// sigma_z^2 = Var(B_t - alpha B_s).  Requires s > 0.
struct CrossingRegression {
  double alpha = 1.0;
  double sigma_z2 = 0.0;
};
CrossingRegression crossing_regression(double s, double t, HurstIndex h);

/// P(B_H(s) < v < B_H(t)) by conditioning on one coordinate and composite
/// Gauss-Legendre quadrature over the remaining half line.
double crossing_prob_exact(const CrossingQuery& q, std::size_t quad_points = 256);

/// c exp(-v^2/(4 t^{2H})) (t-s)^H / t^H, for H in [1/2, 1).
double ll1_bound(const CrossingQuery& q, double c_const);

struct SweepCell {
  CrossingQuery query;
  double exact = 0.0;
  double unit_bound = 0.0;  ///< ll1_bound with c = 1
};

struct ConstantSweep {
  double c_min = 0.0;
  CrossingQuery argmax;
  std::vector<SweepCell> cells;
};

/// Smallest C with crossing_prob_exact <= ll1_bound(., C) over the grid.
ConstantSweep empirical_constant_sweep(const std::vector<CrossingQuery>& grid, std::size_t quad_points = 256,
                                       int threads = 1);

/// Product grid over (H, s/t, v/t^H, t).
struct CrossingGridSpec {
  std::vector<double> hs;
  std::vector<double> s_ratios;
  std::vector<double> v_scaled;
  std::vector<double> ts;

  /// H in {0.5,0.6,0.75,0.9}, s/t in {0,0.1,...,0.9,0.99},
  /// v/t^H in {-4,-3.75,...,4}, t in {0.1,1,10}: 4356 cells.
  static CrossingGridSpec default_grid();
  std::vector<CrossingQuery> queries() const;
  /// Canonical text form, used for hashing.
  std::string canonical() const;
};

/// (1 - Phi(x), exp(-x^2/2)) for x > 0.
std::pair<double, double> gaussian_tail_bound_check(double x);

/// (E exp(-(sigma xi + a)^2 / 2) by Gauss-Hermite, (sigma^2+1)^{-1/2} exp(-a^2/(2(sigma^2+1)))).
std::pair<double, double> gaussian_exp_identity(double sigma, double a, std::size_t nodes = 256);

/// ∫ exp(-eps u^2) mu(du).
double a_epsilon(const MonotoneDriver& driver, double eps);

struct AbsMomentCheck {
  double mc_estimate = 0.0;
  bool finite = false;
};

/// Monte Carlo E|F(B_H(t))|; finite when the estimate moves by < 1% between
/// the first half of the sample and the full sample.
AbsMomentCheck expected_abs_F_check(const MonotoneDriver& driver, double t, HurstIndex h, std::size_t paths,
                                    std::uint64_t seed);

struct IntegrabilityRow {
  std::string label;
  std::vector<double> eps;
  std::vector<double> a_eps;
  bool a_finite = false;
  AbsMomentCheck moment;
  bool consistent = false;
  bool flagged_large = false;  ///< some A_eps exceeds 1e10
};

/// Checks, per driver, that A_eps is finite for all probe eps exactly when
/// the Monte Carlo moment check reports finite.
std::vector<IntegrabilityRow> integrability_report(const std::vector<MonotoneDriver>& drivers, double t,
                                                   HurstIndex h, std::size_t paths, std::uint64_t seed);

/// Standard normal CDF and upper tail.
double normal_cdf(double x);
double normal_tail(double x);

}  // namespace rsint
