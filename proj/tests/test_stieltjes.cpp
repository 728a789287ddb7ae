#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "rsint/errors.hpp"
#include "rsint/rng.hpp"
#include "rsint/stieltjes.hpp"

using namespace rsint;

namespace {

SamplePath path_of(std::vector<double> t, const std::function<double(double)>& v) {
  SamplePath p{TimeGrid(t), {}, {}};
  for (double x : t) p.values.push_back(v(x));
  return p;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n + 1);
  for (std::size_t i = 0; i <= n; ++i) out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
  out.back() = b;
  return out;
}

}  // namespace

TEST_CASE("partitions validate and cache the mesh") {
  const Partition p({0.0, 0.1, 0.5, 1.0});
  CHECK(p.mesh() == doctest::Approx(0.5));
  CHECK(p.intervals() == 3);
  CHECK(Partition::uniform(4, 0.0, 2.0).mesh() == doctest::Approx(0.5));
  CHECK_THROWS_AS(Partition({0.0}), ArgumentError);
  CHECK_THROWS_AS(Partition({0.0, 0.5, 0.5, 1.0}), ArgumentError);
  CHECK_THROWS_AS(evaluation_points(p, EvalRule::custom({0.0, 0.6, 0.7})), ArgumentError);
}

TEST_CASE("hand-computed sums for X(t) = Y(t) = t") {
  const std::vector<double> t{0.0, 0.25, 0.5, 0.75, 1.0};
  const SamplePath x = path_of(t, [](double s) { return s; });
  const Partition two({0.0, 0.5, 1.0});
  CHECK(rs_sum(x, x, two, EvalRule::forward()) == 0.25);
  CHECK(rs_sum(x, x, two, EvalRule::midpoint()) == 0.5);
  CHECK(rs_sum(x, x, two, EvalRule::custom({0.5, 1.0})) == 0.75);
}

TEST_CASE("missing grid times are reported by value") {
  const SamplePath x = path_of({0.0, 0.5, 1.0}, [](double s) { return s; });
  const Partition p({0.0, 0.5, 1.0});
  try {
    rs_sum(x, x, p, EvalRule::midpoint());
    FAIL("expected ArgumentError");
  } catch (const ArgumentError& e) {
    CHECK(std::string(e.what()).find("t=0.25") != std::string::npos);
  }
}

TEST_CASE("constant integrands telescope under every rule") {
  RandomStream rng(StreamId(5, 0));
  std::vector<double> t = linspace(0.0, 1.0, 64);
  SamplePath x{TimeGrid(t), {}, {}};
  double acc = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    x.values.push_back(acc);
    acc += rng.normal();
  }
  const SamplePath c = path_of(t, [](double) { return 3.0; });
  for (std::size_t n : {1u, 2u, 8u, 64u}) {
    const Partition part = Partition::uniform(n, 0.0, 1.0);
    const double want = 3.0 * (x.values.back() - x.values.front());
    CHECK(rs_sum(x, c, part, EvalRule::forward()) == doctest::Approx(want).epsilon(1e-13));
  }
  const SamplePath one = path_of(t, [](double) { return 1.0; });
  CHECK(forward_sum(x.values, one.values) == doctest::Approx(x.values.back() - x.values.front()).epsilon(1e-13));
  const Partition fine(t);
  CHECK(rs_sum(x, c, fine, EvalRule::forward(), 3) == doctest::Approx(3.0 * x.values.back()).epsilon(1e-13));
}

TEST_CASE("random evaluation points stay in their intervals and are reproducible") {
  const Partition part = Partition::uniform(50, 0.0, 2.0);
  const auto a = evaluation_points(part, EvalRule::random_uniform(9), 4);
  const auto b = evaluation_points(part, EvalRule::random_uniform(9), 4);
  const auto c = evaluation_points(part, EvalRule::random_uniform(9), 5);
  CHECK(a == b);
  CHECK(a != c);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] >= part[i]);
    CHECK(a[i] <= part[i + 1]);
  }
}

TEST_CASE("refining a partition adds exactly the cross terms") {
  // Three-point case written out: fine - coarse = (Y(1/2) - Y(0)) (X(1) - X(1/2)).
  const std::vector<double> t{0.0, 0.5, 1.0};
  const SamplePath x{TimeGrid(t), {0.3, -1.1, 2.0}, {}};
  const SamplePath y{TimeGrid(t), {0.7, 1.9, -0.4}, {}};
  const Partition coarse({0.0, 1.0}), fine(t);
  const double cross = refinement_cross_terms(x, y, coarse, fine);
  CHECK(cross == doctest::Approx((1.9 - 0.7) * (2.0 - -1.1)).epsilon(1e-15));
  CHECK(rs_sum(x, y, fine, EvalRule::forward()) - rs_sum(x, y, coarse, EvalRule::forward()) ==
        doctest::Approx(cross).epsilon(1e-14));

  RandomStream rng(StreamId(11, 0));
  const std::vector<double> g = linspace(0.0, 1.0, 96);
  SamplePath xr{TimeGrid(g), {}, {}}, yr{TimeGrid(g), {}, {}};
  for (std::size_t i = 0; i < g.size(); ++i) {
    xr.values.push_back(rng.normal());
    yr.values.push_back(rng.normal());
  }
  const Partition c3 = Partition::uniform(3, 0.0, 1.0), f96 = Partition::uniform(96, 0.0, 1.0);
  CHECK(rs_sum(xr, yr, f96, EvalRule::forward()) - rs_sum(xr, yr, c3, EvalRule::forward()) ==
        doctest::Approx(refinement_cross_terms(xr, yr, c3, f96)).epsilon(1e-12));
  CHECK_THROWS_AS(refinement_cross_terms(xr, yr, f96, c3), ArgumentError);
}

TEST_CASE("increasing time changes leave sums bit-identical") {
  RandomStream rng(StreamId(13, 0));
  const std::vector<double> t = linspace(0.0, 1.0, 40);
  std::vector<double> xv, yv;
  for (std::size_t i = 0; i < t.size(); ++i) {
    xv.push_back(rng.normal());
    yv.push_back(rng.normal());
  }
  std::vector<double> tau;
  for (double s : t) tau.push_back(std::expm1(3.0 * s));
  const SamplePath x{TimeGrid(t), xv, {}}, y{TimeGrid(t), yv, {}};
  const SamplePath xt{TimeGrid(tau), xv, {}}, yt{TimeGrid(tau), yv, {}};
  std::vector<double> pick, pick_tau;
  for (std::size_t i = 0; i < t.size(); i += 3) {
    pick.push_back(t[i]);
    pick_tau.push_back(tau[i]);
  }
  if (pick.back() != t.back()) {
    pick.push_back(t.back());
    pick_tau.push_back(tau.back());
  }
  CHECK(rs_sum(x, y, Partition(pick), EvalRule::forward()) == rs_sum(xt, yt, Partition(pick_tau), EvalRule::forward()));
}

TEST_CASE("norms of error samples") {
  const std::vector<double> ones(1000, 1.0);
  CHECK(norm_of_samples(ones, NormSpec::zero_norm()).estimate == 0.5);
  CHECK(norm_of_samples(ones, NormSpec::lp_norm(2.0)).estimate == doctest::Approx(1.0));
  CHECK_THROWS_AS(NormSpec::lp_norm(0.5), ArgumentError);

  RandomStream rng(StreamId(17, 0));
  std::vector<double> e1(2000), e2(2000), sum(2000);
  for (std::size_t i = 0; i < e1.size(); ++i) {
    e1[i] = 3.0 * rng.normal();
    e2[i] = rng.normal() + 0.5 * e1[i] * e1[i];
    sum[i] = e1[i] + e2[i];
  }
  const NormSpec z = NormSpec::zero_norm();
  CHECK(norm_of_samples(sum, z).estimate <= norm_of_samples(e1, z).estimate + norm_of_samples(e2, z).estimate);

  // Standard normal: E|xi| = sqrt(2/pi).
  CHECK(norm_of_samples(e1, NormSpec::lp_norm(1.0)).estimate / 3.0 ==
        doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(0.05));

  std::vector<double> bad(1000, 1.0);
  bad[3] = std::nan("");
  const NormEstimate one_bad = norm_of_samples(bad, NormSpec::lp_norm(1.0));
  CHECK(one_bad.non_finite == 1);
  bad[4] = INFINITY;
  CHECK_THROWS_AS(norm_of_samples(bad, NormSpec::lp_norm(1.0)), NumericalError);
}

TEST_CASE("error norm against the sum itself is exactly zero") {
  const HurstIndex h(0.7);
  const CirculantSampler sampler(64, 1.0, h);
  const PathMaker make = [&](StreamId id) {
    SamplePath b = sampler.draw(id);
    return std::make_pair(b, b);
  };
  const Partition part = Partition::uniform(16, 0.0, 1.0);
  const Reference self = [&](const SamplePath& x, const SamplePath& y) {
    return rs_sum(x, y, part, EvalRule::forward());
  };
  const NormEstimate e = estimate_error_norm(make, part, EvalRule::forward(), self, NormSpec::lp_norm(1.0), 200, 3);
  CHECK(e.estimate == 0.0);
  CHECK(e.stderr_ == 0.0);
  CHECK_THROWS_AS(estimate_error_norm(make, part, EvalRule::forward(), self, NormSpec::lp_norm(1.0), 99, 3),
                  ArgumentError);

  // For X = Y = B the forward sum minus B(T)^2/2 is -sum (dB)^2 / 2 exactly.
  const Reference half_square = [](const SamplePath& x, const SamplePath&) {
    return 0.5 * x.values.back() * x.values.back();
  };
  const NormEstimate f =
      estimate_error_norm(make, part, EvalRule::forward(), half_square, NormSpec::lp_norm(2.0), 400, 3, 2);
  // -sum(dB_i^2)/2 with 16 increments of variance 16^{-1.4}.
  const double mean_sq = 0.5 * 16.0 * std::pow(16.0, -1.4);
  CHECK(f.estimate > 0.5 * mean_sq);
  CHECK(f.estimate < 2.0 * mean_sq);
}

TEST_CASE("certified bounds") {
  const DominatingFunction sq = DominatingFunction::simple_power(1.0, 2.0);
  CHECK(thm2_bound(sq, Partition::uniform(10, 0.0, 1.0)) == doctest::Approx(20.0).epsilon(1e-10));
  CHECK(thm2_bound(sq, Partition({0.0, 1.0})) == doctest::Approx(20.0).epsilon(1e-10));
  // Coarse mesh: the truncation band covers the whole interval.
  CHECK(thm1_error_bound(sq, Partition({0.0, 0.6, 1.0})) == doctest::Approx(92.0 * 2.5).epsilon(1e-10));

  // Halving the mesh: I_g with g = (t-s)^2 1(t-s < 3d) is 3d - 9d^2/2 + 9d^2 = 3d + 4.5 d^2, so the ratio
  // approaches 1/2.
  for (std::size_t n : {8u, 16u, 64u}) {
    const double d = 1.0 / static_cast<double>(n);
    const double b1 = thm1_error_bound(sq, Partition::uniform(n, 0.0, 1.0));
    const double b2 = thm1_error_bound(sq, Partition::uniform(2 * n, 0.0, 1.0));
    CHECK(b1 == doctest::Approx(92.0 * (3.0 * d + 4.5 * d * d)).epsilon(1e-9));
    CHECK(b2 / b1 == doctest::Approx(0.5).epsilon(0.1));
  }

  // Against the three-term power-law majorant.
  const HurstIndex h(0.75);
  const double K = identity_certified_k(h, 1.0, 1.0);
  const DominatingFunction f = theorem3_dominating(K, h, 2.0);
  for (int k : {4, 6, 8, 10}) {
    const double d = std::ldexp(1.0, -k);
    const double certified = thm1_error_bound(f, Partition::uniform(std::size_t{1} << k, 0.0, 1.0));
    const double majorant = 92.0 * power_law_bound(K, h, 2.0, 1.0, d).total;
    CAPTURE(k);
    CHECK(certified > 0.0);
    CHECK(certified <= majorant);
  }
}

TEST_CASE("Gaussian moment norms and the certified constant") {
  CHECK(gaussian_abs_moment_norm(1.0) == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-14));
  CHECK(gaussian_abs_moment_norm(2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(gaussian_abs_moment_norm(4.0) == doctest::Approx(std::pow(3.0, 0.25)).epsilon(1e-14));
  CHECK(identity_certified_k(HurstIndex(0.75), 1.0, 1.0) == doctest::Approx(std::pow(4.0, -0.75)).epsilon(1e-14));
  const DominatingFunction f = theorem3_dominating(2.0, HurstIndex(0.75), 2.0);
  CHECK(f(0.25, 1.0) == doctest::Approx(2.0 * std::pow(0.75, 1.125)).epsilon(1e-14));
}

TEST_CASE("two-interval dominance cell matches the bivariate normal moment") {
  // With one interior point u the centred sum is B(u) (B(1) - B(u)); for jointly normal (X, Y)
  // E|XY| = (2/pi) sx sy (sqrt(1 - r^2) + r asin r).  fBm is time-reversible, so u and 1-u give
  // the same value and the mesh alone identifies the cell.
  Theorem2Config cfg;
  cfg.paths = 4000;
  cfg.partitions = 3;
  cfg.min_intervals = cfg.max_intervals = 2;
  cfg.seed = 21;
  cfg.threads = 2;
  for (const DominanceCell& c : theorem2_dominance(cfg)) {
    const double u = c.mesh, H = 0.75;
    const double sx = std::pow(u, H), sy = std::pow(1.0 - u, H);
    const double cov = 0.5 * (1.0 - std::pow(u, 2 * H) - std::pow(1.0 - u, 2 * H));
    const double r = cov / (sx * sy);
    const double want = 2.0 / std::numbers::pi * sx * sy * (std::sqrt(1.0 - r * r) + r * std::asin(r));
    CAPTURE(u);
    CHECK(std::abs(c.empirical - want) < 4.0 * c.stderr_);
    CHECK(c.ratio < 1.0);
  }
}

TEST_CASE("Monte Carlo dominance across random partitions") {
  Theorem2Config cfg;
  cfg.paths = 1000;
  cfg.partitions = 20;
  cfg.seed = 4;
  cfg.threads = 4;
  const auto cells = theorem2_dominance(cfg);
  REQUIRE(cells.size() == 20);
  for (const DominanceCell& c : cells) {
    CAPTURE(c.n_intervals);
    CHECK(c.empirical > 0.0);
    CHECK(c.empirical <= c.bound);
  }
}

TEST_CASE("rate experiment regimes and degenerate drivers") {
  RateConfig cfg;
  cfg.q = 3.5;
  try {
    theorem3_experiment(MonotoneDriver::identity(), cfg);
    FAIL("expected RegimeError");
  } catch (const RegimeError& e) {
    CHECK(e.constraint() == "p∈[1,H/(1−H))");
  }
  cfg.q = 2.0;
  cfg.h = 0.5;
  CHECK_THROWS_AS(theorem3_experiment(MonotoneDriver::identity(), cfg), RegimeError);

  RateConfig z;
  z.paths = 200;
  z.bootstrap = 100;
  z.mesh_exponents = {3, 4, 5, 6};
  const RateReport r = theorem3_experiment(MonotoneDriver::zero(), z);
  CHECK(r.verdict == "zero_error");
  for (const RateRow& row : r.rows) CHECK(row.error == 0.0);

  z.mesh_exponents = {3, 4, 4, 6};
  CHECK_THROWS_AS(theorem3_experiment(MonotoneDriver::identity(), z), ArgumentError);
}

TEST_CASE("identity driver: errors fall with the mesh and stay under the certified curve") {
  RateConfig cfg;
  cfg.paths = 1000;
  cfg.bootstrap = 200;
  cfg.mesh_exponents = {4, 5, 6, 7, 8};
  cfg.seed = 8;
  cfg.threads = 4;
  const RateReport r = theorem3_experiment(MonotoneDriver::identity(), cfg);
  CHECK(r.k_mode == "certified");
  CHECK(r.theoretical_slope == doctest::Approx(0.125));
  CHECK(r.verdict == "decaying");
  CHECK(r.errors_monotone);
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    CAPTURE(k);
    CHECK(r.rows[k].error <= r.rows[k].bound92);
    if (k > 0) CHECK(r.rows[k].d == doctest::Approx(0.5 * r.rows[k - 1].d));
  }
  CHECK_FALSE(r.rows.back().cauchy.has_value());
  // 2H - 1 = 1/2 for the identity, where the sum error is -sum (dB)^2 / 2.
  CHECK(r.slope > 0.4);
}
