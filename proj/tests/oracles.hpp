#pragma once

// Reference computations used only by the tests.  None of them call into the
// library's quadrature or samplers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline double Phi(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Composite Simpson on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& g, double a, double b, int n) {
  const double h = (b - a) / n;
  double acc = g(a) + g(b);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * g(a + i * h);
  return acc * h / 3.0;
}

// Bivariate normal CDF P(X < h, Y < k) with correlation rho, from
// d/drho Phi_2 = phi_2 integrated in theta = arcsin(rho).
inline double Phi2(double h, double k, double rho) {
  const double top = std::asin(rho);
  auto g = [&](double th) {
    const double c = std::cos(th);
    return std::exp(-(h * h - 2.0 * h * k * std::sin(th) + k * k) / (2.0 * c * c));
  };
  return Phi(h) * Phi(k) + simpson(g, 0.0, top, 4000) / (2.0 * std::numbers::pi);
}

// P(B_H(s) < v < B_H(t)) = P(B_s < v) - P(B_s < v, B_t < v).
inline double crossing(double s, double t, double v, double h) {
  const double vs = std::pow(s, 2 * h), vt = std::pow(t, 2 * h);
  const double cov = 0.5 * (vs + vt - std::pow(t - s, 2 * h));
  const double rho = cov / std::sqrt(vs * vt);
  const double c1 = v / std::sqrt(vs), c2 = v / std::sqrt(vt);
  return Phi(c1) - Phi2(c1, c2, rho);
}

// Exhaustive sup over index subsets that keep both endpoints.
inline double variation_bruteforce(const std::vector<double>& v, const std::function<double(double)>& phi) {
  const std::size_t n = v.size();
  const std::size_t inner = n - 2;
  double best = -1.0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << inner); ++mask) {
    double acc = 0.0;
    std::size_t prev = 0;
    for (std::size_t i = 1; i < n; ++i) {
      const bool keep = i == n - 1 || ((mask >> (i - 1)) & 1u);
      if (!keep) continue;
      acc += phi(std::abs(v[i] - v[prev]));
      prev = i;
    }
    best = std::max(best, acc);
  }
  return best;
}

// I_f(0,1) for f = (t-s)^alpha.
inline double simple_power_If(double alpha) { return 1.0 / (alpha * (alpha - 1.0)) + 2.0 / alpha + 1.0; }

// I_f(0,1) for f = (t-s)^g t^{-b}, g > 1, g > b.
inline double power_law_If(double g, double b) {
  return 1.0 / ((g - 1.0) * (g - b)) + 1.0 / (g - b) + 1.0 / g + 1.0;
}

// I_g(0,T) for f = K (t-s)^g t^{-b}, truncation width w = 3d <= T, b < 1.
struct TruncatedTerms {
  double double_integral, left, right, total;
};
inline TruncatedTerms power_law_Ig(double k, double g, double b, double t_total, double d) {
  const double w = 3.0 * d;
  TruncatedTerms r{};
  r.double_integral = k * (std::pow(w, g - b) / (g - b) +
                           std::pow(w, g - 1.0) * (std::pow(t_total, 1.0 - b) - std::pow(w, 1.0 - b)) / (1.0 - b)) /
                      (g - 1.0);
  r.left = k * std::pow(w, g - b) / (g - b);
  r.right = k * std::pow(w, g) * std::pow(t_total, -b) / g;
  r.total = r.double_integral + r.left + r.right;
  return r;
}

}  // namespace oracle
