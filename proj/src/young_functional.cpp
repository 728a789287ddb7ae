#include "rsint/young_functional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rsint/errors.hpp"
#include "rsint/quadrature.hpp"
#include "rsint/rng.hpp"
#include "rsint/stats.hpp"

namespace rsint {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ∫_{x0}^{x1} x^e dx, 0 <= x0 <= x1.
double power_integral(double x0, double x1, double e) {
  if (!(x1 > x0)) return 0.0;
  if (e == -1.0) return std::log(x1 / x0);
  return (std::pow(x1, e + 1.0) - std::pow(x0, e + 1.0)) / (e + 1.0);
}

}  // namespace

// ---------------------------------------------------------------------------
// PhiFunction

PhiFunction::PhiFunction(std::function<double(double)> forward, std::function<double(double)> inverse,
                         std::string label)
    : forward_(std::move(forward)), inverse_(std::move(inverse)), label_(std::move(label)) {
  if (!forward_ || !inverse_) throw ArgumentError("phi function '" + label_ + "' needs forward and inverse maps");
  if (forward_(0.0) != 0.0) throw ArgumentError("phi function '" + label_ + "' must satisfy phi(0) = 0");
  const double probes[] = {1e-8, 1e-6, 1e-4, 1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0};
  double prev = 0.0;
  for (double x : probes) {
    const double y = forward_(x);
    if (!(y > prev)) throw ArgumentError("phi function '" + label_ + "' is not strictly increasing");
    prev = y;
  }
  for (double u : probes) {
    const double back = forward_(inverse_(u));
    if (std::abs(back - u) > 1e-10 * u)
      throw ArgumentError("phi function '" + label_ + "': forward(inverse(u)) != u");
  }
}

PhiFunction PhiFunction::power(double p) {
  if (!(p > 0.0)) throw ArgumentError("power phi needs p > 0");
  char buf[48];
  std::snprintf(buf, sizeof buf, "power:%g", p);
  return PhiFunction([p](double x) { return std::pow(x, p); },
                     [p](double u) { return std::pow(u, 1.0 / p); }, buf);
}

PhiFunction PhiFunction::from_label(const std::string& label) {
  if (label == "identity") return power(1.0);
  if (label.rfind("power:", 0) == 0) {
    try {
      std::size_t used = 0;
      const std::string rest = label.substr(6);
      const double p = std::stod(rest, &used);
      if (used == rest.size()) return power(p);
    } catch (const std::logic_error&) {
    }
  }
  throw ArgumentError("unknown phi preset '" + label + "' (expected identity or power:<p>)");
}

// ---------------------------------------------------------------------------
// DominatingFunction

DominatingFunction DominatingFunction::power_law(double k, double alpha, double beta, Anchor anchor) {
  if (!(k >= 0.0) || !std::isfinite(k)) throw ArgumentError("power_law: K must be finite and >= 0");
  if (!(alpha > 0.0)) throw ArgumentError("power_law: exponent alpha must be > 0 so that f(t,t) = 0");
  if (!std::isfinite(beta)) throw ArgumentError("power_law: beta must be finite");
  if (anchor == Anchor::start && beta < 0.0)
    throw ArgumentError("power_law: s^{-beta} with beta < 0 is not non-increasing in s");
  DominatingFunction f;
  f.kind_ = Kind::power_law;
  f.anchor_ = anchor;
  f.k_ = k;
  f.alpha_ = alpha;
  f.beta_ = beta;
  return f;
}

DominatingFunction DominatingFunction::simple_power(double k, double alpha) {
  DominatingFunction f = power_law(k, alpha, 0.0);
  f.kind_ = Kind::simple_power;
  return f;
}

DominatingFunction DominatingFunction::custom(std::function<double(double, double)> fn, double lo, double hi,
                                              bool declared_monotone, std::uint64_t probe_seed) {
  if (!fn) throw ArgumentError("custom dominating function is empty");
  if (!(hi > lo)) throw ArgumentError("custom dominating function needs a probe domain lo < hi");
  for (int i = 0; i <= 64; ++i) {
    const double t = lo + (hi - lo) * i / 64.0;
    const double v = fn(t, t);
    if (std::abs(v) > 1e-12) throw ArgumentError("custom dominating function: f(t,t) != 0 at t = " + std::to_string(t));
  }
  if (declared_monotone) {
    RandomStream rng(StreamId(probe_seed, 0, 0x70726f62u));
    for (int i = 0; i < 128; ++i) {
      double s = lo + (hi - lo) * rng.uniform();
      double t = lo + (hi - lo) * rng.uniform();
      if (s > t) std::swap(s, t);
      const double base = fn(s, t);
      const double s2 = s + (t - s) * rng.uniform();
      const double t2 = t + (hi - t) * rng.uniform();
      const double tol = 1e-12 * std::max(1.0, std::abs(base));
      if (fn(s2, t) > base + tol)
        throw ArgumentError("custom dominating function is not non-increasing in s");
      if (fn(s, t2) < base - tol)
        throw ArgumentError("custom dominating function is not non-decreasing in t");
    }
  }
  DominatingFunction f;
  f.kind_ = Kind::custom;
  f.monotone_ = declared_monotone;
  f.custom_ = std::move(fn);
  return f;
}

double DominatingFunction::operator()(double s, double t) const {
  if (kind_ == Kind::custom) return custom_(s, t);
  if (t <= s) return 0.0;
  const double base = k_ * std::pow(t - s, alpha_);
  if (beta_ == 0.0) return base;
  return base * std::pow(anchor_ == Anchor::end ? t : s, -beta_);
}

DominatingFunction DominatingFunction::scaled(double c) const {
  if (!(c >= 0.0)) throw ArgumentError("scaled: factor must be >= 0");
  DominatingFunction f = *this;
  if (kind_ == Kind::custom) {
    auto inner = custom_;
    f.custom_ = [inner, c](double s, double t) { return c * inner(s, t); };
  } else {
    f.k_ *= c;
  }
  return f;
}

// ---------------------------------------------------------------------------
// Quadrature of I_f

void QuadConfig::validate() const {
  if (graded_levels < 4) throw ArgumentError("QuadConfig: graded_levels must be >= 4");
  if (gauss_points < 4) throw ArgumentError("QuadConfig: gauss_points must be >= 4");
  if (!(diagonal_cutoff > 0.0 && diagonal_cutoff < 1e-3))
    throw ArgumentError("QuadConfig: diagonal_cutoff must lie in (0, 1e-3)");
}

int QuadConfig::effective_levels() const {
  const int from_cutoff = static_cast<int>(std::ceil(std::log2(1.0 / diagonal_cutoff)));
  return std::max(graded_levels, from_cutoff);
}

bool YoungValue::divergent() const noexcept { return std::isinf(total); }

namespace {

YoungValue divergent_value() {
  YoungValue v;
  v.double_integral = v.total = kInf;
  return v;
}

// Exponent regimes in which a power law makes some term infinite.
bool power_law_diverges(const DominatingFunction& f, double a) {
  if (f.k() == 0.0) return false;
  if (f.alpha() <= 1.0) return true;
  if (a == 0.0 && f.beta() != 0.0) {
    if (f.anchor() == DominatingFunction::Anchor::start) return f.beta() > 0.0;
    return f.alpha() <= f.beta();
  }
  return false;
}

YoungValue young_functional(const DominatingFunction& f, double a, double b, double band, const QuadConfig& cfg) {
  if (!(a < b)) throw ArgumentError("I_f(a,b) needs a < b");
  cfg.validate();
  const bool power = f.is_power();
  if (power && a < 0.0) throw ArgumentError("power-law dominating functions need a >= 0");
  if (power && f.k() == 0.0) return YoungValue{};
  if (power && power_law_diverges(f, a)) return divergent_value();

  const double K = f.k(), alpha = f.alpha(), beta = f.beta();
  const bool end_anchor = f.anchor() == DominatingFunction::Anchor::end;
  const double width = std::min(band, b - a);

  GradedSpec base;
  base.singular_levels = cfg.effective_levels();
  base.points = cfg.gauss_points;

  YoungValue out;

  // f(s, s+u) without forming s+u-s; for u below ulp(s) that difference is garbage.
  auto along = [&](double s, double u) {
    if (!power) return f(s, s + u);
    return K * std::pow(u, alpha) * std::pow(end_anchor ? s + u : s, -beta);
  };

  // Double integral in (u = t - s, s) coordinates: ∫_0^width u^{-2} ∫_a^{b-u} f(s, s+u) ds du.
  auto inner = [&](double u) {
    GradedSpec spec = base;
    spec.lower.singular = power;
    if (power) {
      spec.lower.tail = [&, u](double w) {
        const double lead = K * std::pow(u, alpha);
        return end_anchor ? lead * power_integral(a + u, a + u + w, -beta)
                          : lead * power_integral(a, a + w, -beta);
      };
    }
    const GradedResult r = graded_integral([&](double s) { return along(s, u); }, a, b - u, spec);
    return r.value;
  };
  GradedSpec outer = base;
  outer.lower.singular = true;
  if (power) {
    outer.lower.tail = [&](double eps) {
      if (end_anchor && a == 0.0 && beta != 0.0) {
        if (beta == 1.0) {
          const double am1 = alpha - 1.0;
          return K * std::pow(eps, am1) * (std::log(b / eps) / am1 + 1.0 / (am1 * am1));
        }
        return K / (1.0 - beta) *
               (std::pow(b, 1.0 - beta) * std::pow(eps, alpha - 1.0) / (alpha - 1.0) -
                std::pow(eps, alpha - beta) / (alpha - beta));
      }
      const double w0 = power_integral(a, b, -beta);
      const double w1 = -std::pow(end_anchor ? a : b, -beta);
      return K * (w0 * std::pow(eps, alpha - 1.0) / (alpha - 1.0) + w1 * std::pow(eps, alpha) / alpha);
    };
  }
  const GradedResult dbl = graded_integral([&](double u) { return inner(u) / (u * u); }, 0.0, width, outer);

  // ∫_0^width f(a, a+u)/u du
  GradedSpec left = base;
  left.lower.singular = true;
  if (power) {
    left.lower.tail = [&](double w) {
      if (end_anchor && a == 0.0) return K * power_integral(0.0, w, alpha - beta - 1.0);
      return K * std::pow(a, -beta) * std::pow(w, alpha) / alpha;
    };
  }
  const GradedResult lft = graded_integral([&](double u) { return along(a, u) / u; }, 0.0, width, left);

  // ∫_0^width f(b-u, b)/u du
  GradedSpec right = base;
  right.lower.singular = true;
  if (power) {
    right.lower.tail = [&](double w) { return K * std::pow(b, -beta) * std::pow(w, alpha) / alpha; };
  }
  const GradedResult rgt = graded_integral([&](double u) { return along(b - u, u) / u; }, 0.0, width, right);

  if (dbl.divergent || lft.divergent || rgt.divergent) return divergent_value();

  out.double_integral = dbl.value;
  out.left_boundary = lft.value;
  out.right_boundary = rgt.value;
  out.corner = (b - a < band) ? f(a, b) : 0.0;
  out.total = out.double_integral + out.left_boundary + out.right_boundary + out.corner;
  out.residual_estimate = dbl.residual + lft.residual + rgt.residual;
  return out;
}

}  // namespace

YoungValue eval_If(const DominatingFunction& f, double a, double b, const QuadConfig& cfg) {
  return young_functional(f, a, b, kInf, cfg);
}

YoungValue eval_Ig_truncated(const DominatingFunction& f, double a, double b, double d, const QuadConfig& cfg) {
  if (!(d > 0.0)) throw ArgumentError("truncated I_g needs mesh d > 0");
  return young_functional(f, a, b, 3.0 * d, cfg);
}

// ---------------------------------------------------------------------------

PowerLawBound power_law_bound(double k, HurstIndex h, double q, double t_total, double d) {
  const double H = h.value();
  if (!(q > 0.0)) throw RegimeError("power_law_bound: invalid q", "q > 0");
  if (!(t_total > 0.0) || !(d > 0.0)) throw RegimeError("power_law_bound: invalid horizon or mesh", "T > 0, d > 0");
  const double hq = H / q;
  if (!(hq < 1.0)) throw RegimeError("power_law_bound: regime violated", "H/q < 1");
  if (!(hq + H > 1.0)) throw RegimeError("power_law_bound: regime violated", "H/q + H > 1");
  if (!(d <= t_total / 3.0)) throw RegimeError("power_law_bound: mesh too coarse", "d <= T/3");
  PowerLawBound out;
  const double three_d = 3.0 * d;
  out.term1 = k * std::pow(t_total, 1.0 - hq) * std::pow(three_d, hq + H - 1.0) / ((1.0 - hq) * (hq + H - 1.0));
  out.term2 = k * std::pow(three_d, H) * std::pow(t_total / d, 1.0 - hq) / H;
  out.term3 = out.term2;
  out.corner = 0.0;  // g(0,T) = f(0,T) 1(T < 3d) vanishes since d <= T/3
  out.total = out.term1 + out.term2 + out.term3 + out.corner;
  return out;
}

// ---------------------------------------------------------------------------

std::string to_string(YoungVerdict v) {
  switch (v) {
    case YoungVerdict::converges: return "converges";
    case YoungVerdict::diverges: return "diverges";
    case YoungVerdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

YoungTest young_convergence_test(const PhiFunction& phi, const PhiFunction& psi, std::size_t n_terms) {
  if (n_terms < 1000) throw ArgumentError("young_convergence_test needs n_terms >= 1000");
  const auto term = [&](double n) { return phi.inverse(1.0 / n) * psi.inverse(1.0 / n); };

  // Inverse maps must be increasing in u, i.e. terms non-increasing in n.
  double prev = kInf;
  for (double n = 1.0; n <= static_cast<double>(n_terms); n *= 1.7) {
    const double pi = phi.inverse(1.0 / n), si = psi.inverse(1.0 / n);
    if (!(pi > 0.0) || !(si > 0.0) || pi * si > prev)
      throw ArgumentError("young_convergence_test: inverse maps are not monotone on probes");
    prev = pi * si;
  }

  YoungTest out;
  double acc = 0.0;
  for (std::size_t n = n_terms; n >= 1; --n) acc += term(static_cast<double>(n));
  out.partial_sum = acc;

  const double lo = std::log(static_cast<double>(n_terms) / 100.0);
  const double hi = std::log(static_cast<double>(n_terms));
  std::vector<double> xs, ys;
  double last_n = 0.0;
  for (int i = 0; i < 64; ++i) {
    const double n = std::round(std::exp(lo + (hi - lo) * i / 63.0));
    if (n == last_n) continue;
    last_n = n;
    xs.push_back(std::log(n));
    ys.push_back(std::log(term(n)));
  }
  out.tail_slope = fit_line(xs, ys).slope;
  if (out.tail_slope < -1.05) out.verdict = YoungVerdict::converges;
  else if (out.tail_slope >= -1.0 - 1e-6) out.verdict = YoungVerdict::diverges;
  else out.verdict = YoungVerdict::inconclusive;
  return out;
}

}  // namespace rsint
