#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "rsint/errors.hpp"
#include "rsint/rng.hpp"
#include "rsint/variation.hpp"

using namespace rsint;

namespace {
GridFunction on_unit_grid(std::vector<double> v) {
  const std::size_t n = v.size();
  return GridFunction(TimeGrid::uniform(n - 1, 1.0), std::move(v));
}
}  // namespace

TEST_CASE("small examples") {
  const PhiFunction sq = PhiFunction::power(2.0), id = PhiFunction::from_label("identity");
  CHECK(phi_variation_grid(on_unit_grid({0, 1, 0}), sq) == 2.0);
  CHECK(phi_variation_grid(on_unit_grid({0, 1, 2}), sq) == 4.0);
  CHECK(phi_variation_grid(on_unit_grid({0, 1, 2, 3}), id) == 3.0);
  CHECK(phi_variation_grid(on_unit_grid({5, 5, 5}), sq) == 0.0);
  CHECK_THROWS_AS(on_unit_grid({1.0}), ArgumentError);
  CHECK_THROWS_AS(GridFunction(TimeGrid::uniform(3, 1.0), {0, 1}), ArgumentError);
}

TEST_CASE("dynamic programme equals exhaustive enumeration") {
  RandomStream rng(StreamId(2024, 0));
  for (double p : {0.5, 1.0, 2.0, 3.0}) {
    const PhiFunction phi = PhiFunction::power(p);
    for (int inst = 0; inst < 250; ++inst) {
      const std::size_t n = 2 + rng.below(11);
      std::vector<double> v(n);
      for (double& x : v) x = rng.normal();
      const double dp = phi_variation(v, phi);
      const double bf = oracle::variation_bruteforce(v, [p](double x) { return std::pow(x, p); });
      CAPTURE(p);
      CAPTURE(n);
      CHECK(dp == doctest::Approx(bf).epsilon(1e-13));
    }
  }
}

TEST_CASE("identity phi on monotone data telescopes") {
  RandomStream rng(StreamId(8, 0));
  std::vector<double> v{0.0};
  for (int i = 0; i < 200; ++i) v.push_back(v.back() + rng.uniform());
  CHECK(phi_variation(v, PhiFunction::power(1.0)) == doctest::Approx(v.back() - v.front()).epsilon(1e-12));
}

TEST_CASE("refinement never decreases the grid variation") {
  RandomStream rng(StreamId(9, 0));
  const PhiFunction phi = PhiFunction::power(1.5);
  std::vector<double> v(40);
  for (double& x : v) x = rng.normal();
  std::vector<double> coarse;
  for (std::size_t i = 0; i < v.size(); i += 3) coarse.push_back(v[i]);
  coarse.push_back(v.back());
  CHECK(phi_variation(v, phi) >= phi_variation(coarse, phi));
}

TEST_CASE("two-valued sequences: counting path agrees with the DP") {
  RandomStream rng(StreamId(10, 0));
  const PhiFunction phi = PhiFunction::power(2.0);
  std::vector<double> v(300);
  int changes = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = rng.uniform() < 0.3 ? 1.5 : -0.5;
    if (i > 0 && v[i] != v[i - 1]) ++changes;
  }
  CHECK(phi_variation(v, phi) == 4.0 * changes);
  // Add a third value so the general DP runs, then check against the count.
  std::vector<double> w = v;
  w.push_back(-0.5 + 1e-300);
  CHECK(phi_variation(w, phi) >= 4.0 * changes);

  VariationOptions tight;
  tight.max_points = 8;
  CHECK_NOTHROW(phi_variation(v, phi, tight));
  std::vector<double> ramp(9);
  for (int i = 0; i < 9; ++i) ramp[i] = i * i;
  CHECK_THROWS_AS(phi_variation(ramp, phi, tight), ArgumentError);
}

TEST_CASE("indicator experiment: preconditions") {
  const PhiFunction id = PhiFunction::power(1.0);
  CHECK_THROWS_AS(indicator_variation_experiment(HurstIndex(0.5), id, {4, 5}, 100, 1), RegimeError);
  CHECK_THROWS_AS(indicator_variation_experiment(HurstIndex(0.75), id, {5, 4}, 100, 1), ArgumentError);
  CHECK_THROWS_AS(indicator_variation_experiment(HurstIndex(0.75), id, {4, 5}, 99, 1), ArgumentError);
}

TEST_CASE("indicator experiment: nested grids and determinism") {
  const PhiFunction id = PhiFunction::power(1.0);
  const auto a = indicator_variation_experiment(HurstIndex(0.75), id, {3, 5, 7, 9}, 200, 4, 1);
  const auto b = indicator_variation_experiment(HurstIndex(0.75), id, {3, 5, 7, 9}, 200, 4, 3);
  REQUIRE(a.size() == 4);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].mean == b[k].mean);
    CHECK(a[k].std == b[k].std);
    CHECK(a[k].n_grid == (std::size_t{1} << a[k].depth) + 1);
    if (k > 0) CHECK(a[k].mean >= a[k - 1].mean);
  }
  // The grid variation of a 0/1 sequence is the number of sign changes,
  // which is an integer on every path.
  CHECK(std::abs(a[0].mean * 200 - std::round(a[0].mean * 200)) < 1e-9);
}
