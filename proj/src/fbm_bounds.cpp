#include "rsint/fbm_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "rsint/errors.hpp"
#include "rsint/parallel.hpp"
#include "rsint/quadrature.hpp"
#include "rsint/rng.hpp"
#include "rsint/stats.hpp"

namespace rsint {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double overlap(double lo, double hi, double a, double b) {
  const double l = std::max(lo, a), r = std::min(hi, b);
  return r > l ? r - l : 0.0;
}

double standard_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
double normal_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

// ---------------------------------------------------------------------------
// MonotoneDriver

MonotoneDriver::MonotoneDriver(std::string label, double f0, std::vector<Atom> atoms, std::vector<DensityPiece> pieces)
    : label_(std::move(label)), f0_(f0), atoms_(std::move(atoms)), pieces_(std::move(pieces)) {
  if (!std::isfinite(f0_)) throw ArgumentError("driver '" + label_ + "': F(0) must be finite");
  for (const Atom& a : atoms_) {
    if (!std::isfinite(a.location) || !(a.mass > 0.0) || !std::isfinite(a.mass))
      throw ArgumentError("driver '" + label_ + "': atoms need finite locations and positive finite masses");
  }
  for (const DensityPiece& p : pieces_) {
    if (!(p.lo < p.hi) || !(p.level >= 0.0) || !std::isfinite(p.level))
      throw ArgumentError("driver '" + label_ + "': density pieces need lo < hi and finite level >= 0");
  }
}

MonotoneDriver MonotoneDriver::identity() { return {"identity", 0.0, {}, {{-kInf, kInf, 1.0}}}; }
MonotoneDriver MonotoneDriver::indicator_positive() { return {"indicator", 0.0, {{0.0, 1.0}}, {}}; }
MonotoneDriver MonotoneDriver::staircase() {
  return {"staircase", 0.0, {{-2.0, 1.0}, {-1.0, 1.0}, {1.0, 1.0}, {2.0, 1.0}}, {}};
}
MonotoneDriver MonotoneDriver::gaussian_stress(int n_max) {
  std::vector<Atom> atoms;
  for (int n = 0; n <= n_max; ++n) atoms.push_back({static_cast<double>(n), std::exp(static_cast<double>(n) * n)});
  return {"gaussian_stress", 0.0, std::move(atoms), {}};
}
MonotoneDriver MonotoneDriver::zero() { return {"zero", 0.0, {}, {}}; }

MonotoneDriver MonotoneDriver::from_label(const std::string& label) {
  if (label == "identity") return identity();
  if (label == "indicator") return indicator_positive();
  if (label == "staircase") return staircase();
  if (label == "gaussian_stress") return gaussian_stress();
  if (label == "zero") return zero();
  throw ArgumentError("unknown driver '" + label + "' (identity, indicator, staircase, gaussian_stress, zero)");
}

std::vector<MonotoneDriver> MonotoneDriver::bundled() {
  return {identity(), indicator_positive(), staircase(), gaussian_stress(), zero()};
}

double MonotoneDriver::operator()(double x) const {
  double acc = f0_;
  if (x > 0.0) {
    for (const Atom& a : atoms_)
      if (a.location >= 0.0 && a.location < x) acc += a.mass;
    for (const DensityPiece& p : pieces_) acc += p.level * overlap(p.lo, p.hi, 0.0, x);
  } else if (x < 0.0) {
    for (const Atom& a : atoms_)
      if (a.location >= x && a.location < 0.0) acc -= a.mass;
    for (const DensityPiece& p : pieces_) acc -= p.level * overlap(p.lo, p.hi, x, 0.0);
  }
  return acc;
}

double MonotoneDriver::primitive(double y) const {
  double acc = f0_ * y;
  if (y > 0.0) {
    for (const Atom& a : atoms_)
      if (a.location >= 0.0 && a.location < y) acc += a.mass * (y - a.location);
    for (const DensityPiece& p : pieces_) {
      const double lo = std::max(p.lo, 0.0), hi = std::min(p.hi, y);
      if (hi > lo) acc += p.level * 0.5 * ((y - lo) * (y - lo) - (y - hi) * (y - hi));
    }
  } else if (y < 0.0) {
    for (const Atom& a : atoms_)
      if (a.location >= y && a.location < 0.0) acc += a.mass * (a.location - y);
    for (const DensityPiece& p : pieces_) {
      const double lo = std::max(p.lo, y), hi = std::min(p.hi, 0.0);
      if (hi > lo) acc += p.level * 0.5 * ((hi - y) * (hi - y) - (lo - y) * (lo - y));
    }
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Crossing probabilities

CrossingRegression crossing_regression(double s, double t, HurstIndex h) {
  if (!(s > 0.0) || !(t >= s)) throw ArgumentError("crossing_regression needs 0 < s <= t");
  const double two_h = 2.0 * h.value();
  const double var_s = std::pow(s, two_h);
  CrossingRegression r;
  r.alpha = fbm_covariance(s, t, h) / var_s;
  r.sigma_z2 = std::pow(t, two_h) - r.alpha * r.alpha * var_s;
  return r;
}

namespace {

double composite_gl(const std::function<double(double)>& g, double lo, double hi, std::size_t quad_points) {
  if (!(hi > lo)) return 0.0;
  const GaussRule& rule = gauss_legendre(16);
  const std::size_t panels = std::max<std::size_t>(4, quad_points / 16);
  const double w = (hi - lo) / static_cast<double>(panels);
  double acc = 0.0;
  for (std::size_t i = 0; i < panels; ++i) {
    const double a = lo + w * static_cast<double>(i);
    const double b = i + 1 == panels ? hi : a + w;
    acc += gauss_legendre_panel(g, a, b, rule);
  }
  return acc;
}

void validate_query(const CrossingQuery& q) {
  if (!(q.s >= 0.0)) throw ArgumentError("crossing query needs s >= 0");
  if (!(q.t > 0.0)) throw ArgumentError("crossing query needs t > 0");
  if (q.s > q.t) throw ArgumentError("crossing query needs s <= t");
  if (!std::isfinite(q.v)) throw ArgumentError("crossing query needs a finite level v");
}

}  // namespace

double crossing_prob_exact(const CrossingQuery& q, std::size_t quad_points) {
  validate_query(q);
  if (quad_points < 64) throw ArgumentError("crossing_prob_exact needs at least 64 quadrature points");
  const HurstIndex h(q.h);
  if (q.s == q.t) return 0.0;
  const double t_h = std::pow(q.t, h.value());
  if (q.s == 0.0) return q.v > 0.0 ? normal_tail(q.v / t_h) : 0.0;

  const CrossingRegression reg = crossing_regression(q.s, q.t, h);
  if (h.value() >= 0.5) {
    const double inc = std::pow(q.t - q.s, 2.0 * h.value());
    if (reg.alpha < 1.0 - 1e-12)
      throw NumericalError("regression coefficient alpha < 1 for H >= 1/2");
    if (reg.sigma_z2 > inc * (1.0 + 1e-10) + 1e-300)
      throw NumericalError("residual variance exceeds (t-s)^{2H}");
  }
  if (!(reg.sigma_z2 > 0.0)) return 0.0;

  const double sz = std::sqrt(reg.sigma_z2);
  const double s_h = std::pow(q.s, h.value());
  const double a_s = reg.alpha * s_h;
  const double c = q.v / s_h;
  constexpr double kReach = 13.0;

  double p = 0.0;
  if (a_s <= sz) {
    // Condition on B_s = s^H x: the tail of Z varies slowly in x.
    const double hi = std::min(c, kReach);
    const double lo = std::min(hi, 0.0) - kReach;
    p = composite_gl(
        [&](double x) { return standard_normal_pdf(x) * normal_tail((q.v - a_s * x) / sz); }, lo, hi, quad_points);
  } else {
    // Condition on Z = sigma_z y: the law of B_s varies slowly in y.
    const double y0 = q.v * (1.0 - reg.alpha) / sz;
    const double lo = std::max(y0, -kReach);
    const double hi = std::max(lo, 0.0) + kReach;
    const double phi_c = normal_cdf(c), tail_c = normal_tail(c);
    p = composite_gl(
        [&](double y) {
          const double w = (q.v - sz * y) / a_s;
          const double mass = (w > 0.0 && c > 0.0) ? normal_tail(w) - tail_c : phi_c - normal_cdf(w);
          return standard_normal_pdf(y) * std::max(mass, 0.0);
        },
        lo, hi, quad_points);
  }
  return std::clamp(p, 0.0, 1.0);
}

double ll1_bound(const CrossingQuery& q, double c_const) {
  validate_query(q);
  if (!(q.h >= 0.5 && q.h < 1.0)) throw RegimeError("ll1_bound: Hurst index out of range", "H in [1/2, 1)");
  if (!(c_const > 0.0)) throw ArgumentError("ll1_bound needs c > 0");
  const double t_h = std::pow(q.t, q.h);
  return c_const * std::exp(-q.v * q.v / (4.0 * t_h * t_h)) * std::pow(q.t - q.s, q.h) / t_h;
}

ConstantSweep empirical_constant_sweep(const std::vector<CrossingQuery>& grid, std::size_t quad_points, int threads) {
  if (grid.empty()) throw ArgumentError("empirical_constant_sweep needs a non-empty grid");
  ConstantSweep out;
  out.cells.resize(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    SweepCell& cell = out.cells[i];
    cell.query = grid[i];
    cell.exact = crossing_prob_exact(grid[i], quad_points);
    cell.unit_bound = ll1_bound(grid[i], 1.0);
  });
  out.c_min = -1.0;
  for (const SweepCell& cell : out.cells) {
    const double ratio = cell.exact / cell.unit_bound;
    if (ratio > out.c_min) {
      out.c_min = ratio;
      out.argmax = cell.query;
    }
  }
  return out;
}

CrossingGridSpec CrossingGridSpec::default_grid() {
  CrossingGridSpec g;
  g.hs = {0.5, 0.6, 0.75, 0.9};
  for (int i = 0; i <= 9; ++i) g.s_ratios.push_back(i / 10.0);
  g.s_ratios.push_back(0.99);
  for (int i = 0; i <= 32; ++i) g.v_scaled.push_back(-4.0 + 0.25 * i);
  g.ts = {0.1, 1.0, 10.0};
  return g;
}

std::vector<CrossingQuery> CrossingGridSpec::queries() const {
  std::vector<CrossingQuery> out;
  out.reserve(hs.size() * s_ratios.size() * v_scaled.size() * ts.size());
  for (double h : hs)
    for (double t : ts)
      for (double r : s_ratios)
        for (double vs : v_scaled) out.push_back({r * t, t, vs * std::pow(t, h), h});
  return out;
}

std::string CrossingGridSpec::canonical() const {
  std::ostringstream os;
  auto list = [&os](const char* name, const std::vector<double>& xs) {
    os << name << '=';
    char buf[32];
    for (std::size_t i = 0; i < xs.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", xs[i]);
      os << (i ? "," : "") << buf;
    }
    os << ';';
  };
  list("h", hs);
  list("s_over_t", s_ratios);
  list("v_over_tH", v_scaled);
  list("t", ts);
  return os.str();
}

// ---------------------------------------------------------------------------
// Gaussian identities

std::pair<double, double> gaussian_tail_bound_check(double x) {
  if (!(x > 0.0)) throw ArgumentError("gaussian_tail_bound_check needs x > 0");
  return {normal_tail(x), std::exp(-0.5 * x * x)};
}

std::pair<double, double> gaussian_exp_identity(double sigma, double a, std::size_t nodes) {
  if (!(sigma > 0.0)) throw ArgumentError("gaussian_exp_identity needs sigma > 0");
  const double lhs = gauss_hermite_expectation(
      [&](double xi) {
        const double z = sigma * xi + a;
        return std::exp(-0.5 * z * z);
      },
      nodes);
  const double s2 = sigma * sigma + 1.0;
  const double rhs = std::exp(-a * a / (2.0 * s2)) / std::sqrt(s2);
  return {lhs, rhs};
}

double a_epsilon(const MonotoneDriver& driver, double eps) {
  if (!(eps > 0.0)) throw ArgumentError("a_epsilon needs eps > 0");
  double acc = 0.0;
  for (const Atom& a : driver.atoms()) acc += a.mass * std::exp(-eps * a.location * a.location);
  const double r = std::sqrt(eps);
  for (const DensityPiece& p : driver.pieces())
    acc += p.level * 0.5 * std::sqrt(std::numbers::pi / eps) * (std::erf(r * p.hi) - std::erf(r * p.lo));
  return acc;
}

AbsMomentCheck expected_abs_F_check(const MonotoneDriver& driver, double t, HurstIndex h, std::size_t paths,
                                    std::uint64_t seed) {
  if (!(t > 0.0)) throw ArgumentError("expected_abs_F_check needs t > 0");
  if (paths < 1000) throw ArgumentError("expected_abs_F_check needs at least 1000 paths");
  RandomStream rng(StreamId(seed, 0, Substream::marginal));
  const double scale = std::pow(t, h.value());
  std::vector<double> vals(paths);
  for (double& v : vals) v = std::abs(driver(scale * rng.normal()));
  const double half = pairwise_sum(std::span<const double>(vals).first(paths / 2)) / static_cast<double>(paths / 2);
  const double full = pairwise_sum(vals) / static_cast<double>(paths);
  AbsMomentCheck out;
  out.mc_estimate = full;
  if (!std::isfinite(full)) return out;
  out.finite = (full == 0.0 && half == 0.0) || std::abs(full - half) < 0.01 * std::abs(full);
  return out;
}

std::vector<IntegrabilityRow> integrability_report(const std::vector<MonotoneDriver>& drivers, double t, HurstIndex h,
                                                   std::size_t paths, std::uint64_t seed) {
  std::vector<IntegrabilityRow> rows;
  for (std::size_t i = 0; i < drivers.size(); ++i) {
    IntegrabilityRow row;
    row.label = drivers[i].label();
    row.eps = {1e-3, 1e-2, 1e-1, 1.0, 10.0};
    row.a_finite = true;
    for (double e : row.eps) {
      const double a = a_epsilon(drivers[i], e);
      row.a_eps.push_back(a);
      row.a_finite = row.a_finite && std::isfinite(a);
      row.flagged_large = row.flagged_large || a > 1e10;
    }
    row.moment = expected_abs_F_check(drivers[i], t, h, paths, seed + i);
    row.consistent = row.a_finite == row.moment.finite;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace rsint
