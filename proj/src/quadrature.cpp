#include "rsint/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include <Eigen/Dense>

#include "rsint/errors.hpp"

namespace rsint {

namespace {

GaussRule make_legendre(std::size_t n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const std::size_t m = (n + 1) / 2;
  for (std::size_t i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / static_cast<double>(j);
      }
      dp = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / dp;
      if (std::abs(z - z1) <= 1e-15) break;
    }
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

// Newton iteration on orthonormal Hermite polynomials; stable for n in the
// hundreds.
GaussRule make_hermite(std::size_t n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  const double nd = static_cast<double>(n);

  // Golub-Welsch eigenvalues as starting points; the asymptotic guesses of
  // the classical recipe collide for a few hundred nodes.
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t k = 1; k < n; ++k) {
    const double off = std::sqrt(0.5 * static_cast<double>(k));
    jac(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k - 1)) = off;
    jac(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(k)) = off;
  }
  const Eigen::VectorXd guess = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(jac, Eigen::EigenvaluesOnly).eigenvalues();

  const std::size_t m = (n + 1) / 2;
  for (std::size_t i = 0; i < m; ++i) {
    // Largest roots first, mirrored below.
    double z = guess[static_cast<Eigen::Index>(n - 1 - i)];
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = pim4, p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double jd = static_cast<double>(j);
        p1 = z * std::sqrt(2.0 / (jd + 1.0)) * p2 - std::sqrt(jd / (jd + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * nd) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    if (n % 2 == 1 && i == m - 1) z = 0.0;
    rule.nodes[i] = z;
    rule.nodes[n - 1 - i] = -z;
    rule.weights[i] = 2.0 / (pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  // Ascending order.
  for (std::size_t i = 0; i < n / 2; ++i) {
    std::swap(rule.nodes[i], rule.nodes[n - 1 - i]);
    std::swap(rule.weights[i], rule.weights[n - 1 - i]);
  }
  return rule;
}

template <typename Make>
const GaussRule& cached(std::map<std::size_t, std::unique_ptr<GaussRule>>& cache, std::mutex& mu,
                        std::size_t n, Make make) {
  if (n == 0) throw ArgumentError("Gauss rule needs at least one node");
  std::lock_guard lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule>(make(n));
  return *slot;
}

}  // namespace

const GaussRule& gauss_legendre(std::size_t n) {
  static std::map<std::size_t, std::unique_ptr<GaussRule>> cache;
  static std::mutex mu;
  return cached(cache, mu, n, make_legendre);
}

const GaussRule& gauss_hermite(std::size_t n) {
  static std::map<std::size_t, std::unique_ptr<GaussRule>> cache;
  static std::mutex mu;
  return cached(cache, mu, n, make_hermite);
}

double gauss_legendre_panel(const std::function<double(double)>& g, double a, double b,
                            const GaussRule& rule) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * g(mid + half * rule.nodes[i]);
  return acc * half;
}

double gauss_hermite_expectation(const std::function<double(double)>& g, std::size_t n) {
  const GaussRule& rule = gauss_hermite(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += rule.weights[i] * g(std::numbers::sqrt2 * rule.nodes[i]);
  return acc / std::sqrt(std::numbers::pi);
}

namespace {

struct HalfResult {
  double value = 0.0;
  double residual = 0.0;
  bool divergent = false;
};

// Bands accumulating toward `end`; `dir` = +1 when the half extends to the
// right of `end`, -1 when to the left.
HalfResult graded_half(const std::function<double(double)>& g, double end, double length, int dir,
                       const EndpointModel& model, const GradedSpec& spec) {
  HalfResult out;
  if (length <= 0.0) return out;
  const GaussRule& rule = gauss_legendre(static_cast<std::size_t>(spec.points));
  const int levels = model.singular ? spec.singular_levels : spec.regular_levels;
  std::vector<double> bands(static_cast<std::size_t>(levels));
  for (int k = 0; k < levels; ++k) {
    const double outer = length * std::ldexp(1.0, -k);
    const double inner = 0.5 * outer;
    const double x0 = end + dir * inner;
    const double x1 = end + dir * outer;
    bands[static_cast<std::size_t>(k)] =
        gauss_legendre_panel(g, std::min(x0, x1), std::max(x0, x1), rule);
  }
  double sum = 0.0;
  for (double c : bands) sum += c;

  const double width = length * std::ldexp(1.0, -levels);
  if (model.singular && !model.tail && levels >= 3) {
    const double c0 = std::abs(bands[static_cast<std::size_t>(levels - 3)]);
    const double c1 = std::abs(bands[static_cast<std::size_t>(levels - 2)]);
    const double c2 = std::abs(bands[static_cast<std::size_t>(levels - 1)]);
    if (c2 > 0.0 && c0 <= c1 && c1 <= c2) {
      out.divergent = true;
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }
  }
  if (model.tail) {
    sum += model.tail(width);
  } else if (model.singular) {
    if (levels >= 2) {
      const double last = bands[static_cast<std::size_t>(levels - 1)];
      const double prev = bands[static_cast<std::size_t>(levels - 2)];
      const double r = prev != 0.0 ? last / prev : 0.0;
      out.residual = (r > 0.0 && r < 1.0) ? last * r / (1.0 - r) : 0.0;
    }
  } else {
    sum += width * g(end + dir * 0.5 * width);
  }
  out.value = sum;
  return out;
}

}  // namespace

GradedResult graded_integral(const std::function<double(double)>& g, double lo, double hi,
                             const GradedSpec& spec) {
  GradedResult res;
  if (!(hi > lo)) return res;
  if (spec.points < 1 || spec.singular_levels < 1 || spec.regular_levels < 1)
    throw ArgumentError("graded_integral: levels and points must be positive");
  const double half = 0.5 * (hi - lo);
  const HalfResult left = graded_half(g, lo, half, +1, spec.lower, spec);
  const HalfResult right = graded_half(g, hi, half, -1, spec.upper, spec);
  res.divergent = left.divergent || right.divergent;
  res.value = res.divergent ? std::numeric_limits<double>::infinity() : left.value + right.value;
  res.residual = left.residual + right.residual;
  return res;
}

}  // namespace rsint
