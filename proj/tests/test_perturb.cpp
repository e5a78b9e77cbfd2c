// Copyright 2026 The apselect Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <numbers>
#include <random>

#include "ap/kernels.hpp"
#include "ap/perturb.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace ap;
using ap::testing::basis_1_sqrt2;

namespace {

constexpr double kPi = std::numbers::pi;

AveragingScheme small_scheme() { return AveragingScheme{{100, 200, 400}, 1e-2, 3, "pairwise"}; }

// Minimal N by direct search, independent of the closed form.
std::size_t minimal_N(double eps) {
  std::size_t n = 1;
  while (!(1.0 / static_cast<double>(n + 1) < eps / 2.0)) ++n;
  return n;
}

// D^(B)(sin(w .), sin(w (. + tau))) = (4/pi) sin(w tau / 2) for small tau.
double shifted_sine_distance(double w, double tau) { return 4.0 / kPi * std::sin(w * tau / 2.0); }

}  // namespace

TEST_CASE("lemma parameters at eps = 1/2, Delta = 1") {
  const auto p = lemma41_params(0.5, 1.0);
  CHECK(p.N == 4);
  CHECK(p.N == minimal_N(0.5));
  CHECK(p.eps_prime == doctest::Approx(0.0125).epsilon(1e-15));
  CHECK(p.delta_prime == doctest::Approx(2.0 * std::sin(kPi / 8) * std::sin(kPi / 160)).epsilon(1e-15));
  CHECK(p.delta_prime == doctest::Approx(0.015027).epsilon(1e-4));
  CHECK(p.delta == doctest::Approx(0.0050089).epsilon(1e-4));
}

TEST_CASE("lemma parameters at eps = 1 and across a sweep") {
  const auto p = lemma41_params(1.0, 2.0);
  CHECK(p.N == 2);
  CHECK(p.eps_prime == doctest::Approx(1.0 / 12.0).epsilon(1e-15));
  for (double eps = 0.01; eps <= 1.0; eps += 0.0137) {
    const auto q = lemma41_params(eps, 1.0);
    CHECK(q.N == minimal_N(eps));
    CHECK(1.0 / static_cast<double>(q.N + 1) < eps / 2.0);
    CHECK(q.eps_prime <= eps / 12.0 + 1e-17);
    CHECK(q.delta > 0.0);
    CHECK(q.delta <= 1.0);
  }
  CHECK(lemma41_params(0.5, 1e6).delta == 1.0);
}

TEST_CASE("lemma parameters reject out-of-range input") {
  CHECK_THROWS_AS(lemma41_params(0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(lemma41_params(1.5, 1.0), InvalidArgument);
  CHECK_THROWS_AS(lemma41_params(0.5, 0.0), InvalidArgument);
  CHECK_THROWS_AS(lemma41_params(0.5, -1.0), InvalidArgument);
}

TEST_CASE("tau0 for sin t at bound 0.1") {
  const auto f = sine(basis_1_sqrt2(), {1, 0});
  const auto probes = geometric_probes(1e-3, 1.0);
  const auto r = tau0_estimate({f}, 0.1, small_scheme(), probes);
  CHECK(r.tau0 >= 0.09);
  const double limit = 2.0 * std::asin(0.1 * kPi / 4.0);
  CHECK(r.tau0 < limit);
  CHECK(r.tau0 * std::sqrt(2.0) >= limit * 0.999);
  for (const auto& [tau, d] : r.trace)
    if (tau <= r.tau0) CHECK(d < 0.1);
}

TEST_CASE("tau0 of a constant family is the largest probe") {
  const auto c = constant(basis_1_sqrt2(), Point{0.3});
  const auto probes = geometric_probes(1e-3, 2.0);
  CHECK(tau0_estimate({c}, 0.01, small_scheme(), probes).tau0 == 2.0);
}

TEST_CASE("tau0 over two members follows the faster one") {
  const auto b = basis_1_sqrt2();
  const std::vector<FuncExpr> fam{sine(b, {1, 0}), sine(b, {0, 1})};
  const auto probes = geometric_probes(1e-4, 1.0, 1.05);
  const auto r = tau0_estimate(fam, 0.05, small_scheme(), probes);
  CHECK(r.tau0 > 0.0);
  // Brute-force oracle: largest probe below the closed-form threshold of the faster member.
  double expect = 0.0;
  for (double tau : probes)
    if (shifted_sine_distance(std::sqrt(2.0), tau) < 0.05) expect = tau;
  CHECK(r.tau0 == doctest::Approx(expect));
}

TEST_CASE("tau0 fails when the first probe fails") {
  const auto f = sine(basis_1_sqrt2(), {1, 0});
  CHECK_THROWS_AS(tau0_estimate({f}, 0.01, small_scheme(), {1.0, 2.0}), StageFailure);
  CHECK_THROWS_AS(tau0_estimate({}, 0.01, small_scheme(), {1.0}), InvalidArgument);
  CHECK_THROWS_AS(tau0_estimate({f}, 0.01, small_scheme(), {2.0, 1.0}), InvalidArgument);
}

TEST_CASE("lattice multipliers resolve ties upward") {
  CHECK(lattice_multiplier(4.0, 0.5) == 5.0);
  CHECK(lattice_multiplier(4.0, 0.3) == 7.0);
  CHECK(lattice_multiplier(4.0, 100.0) == 1.0);
  const double q = 2.0 * kPi / (2.0 * 1e-40);
  const double m = lattice_multiplier(2.0 * kPi, 1e-40);
  CHECK(m > q);
  CHECK(std::floor(m) == m);
}

TEST_CASE("zero family at depth 0") {
  const auto b = basis_1_sqrt2();
  const auto zero = constant(b, Point{0.0});
  const auto s = build_perturbation({zero}, 1.0, 2.0 * kPi, 0);
  REQUIRE(s.terms() == 1);
  CHECK(s.Delta[0] == 0.5);
  CHECK_FALSE(check_schedule(s, 1.0));
  const auto k = verify_level_density(zero, s, 0, small_scheme());
  CHECK(k.value < 0.5);
  REQUIRE(s.lattice);
  CHECK(*s.lattice == IntVec{1, 0});
}

TEST_CASE("schedule of the three-term example") {
  const auto b = basis_1_sqrt2();
  const auto f = add_constant(sum(sine(b, {1, 0}), sine(b, {0, 1})), -0.4);
  const auto s = build_perturbation({f}, 0.3, 2.0 * kPi, 2);
  REQUIRE(s.terms() == 3);
  CHECK(s.Delta[0] == 0.15);
  CHECK(s.Delta[1] <= s.delta[0] / 2.0);
  CHECK(s.Delta[2] <= std::min(s.delta[0] / 4.0, s.delta[1] / 2.0));
  CHECK_FALSE(check_schedule(s, 0.3));
  CHECK(s.amplitude_sum() < 0.3);
  for (std::size_t j = 0; j < s.terms(); ++j) CHECK(s.alpha[j] >= kPi / s.tau0[j]);

  const auto& scheme = small_scheme();
  const auto g = kernels::grid_max(kernels::midpoint_grid(scheme.b_max(), scheme.step),
                                   [&](double t) { return std::abs(s.eval(t)); });
  CHECK(g.first < 0.3);

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1e4, 1e4);
  int checked = 0;
  while (checked < 1000) {
    const double t = u(rng);
    double moved, err;
    kernels::two_sum(t, s.b, moved, err);
    if (err != 0.0) continue;
    CHECK(std::abs(s.eval(moved) - s.eval(t)) <= 1e-12);
    ++checked;
  }

  const auto all = verify_level_density_all(f, s, scheme);
  for (std::size_t j = 0; j < s.terms(); ++j) {
    CHECK(all[j].value < std::ldexp(1.0, -static_cast<int>(j + 1)) + 0.02);
    CHECK(all[j].value == verify_level_density(f, s, j, scheme).value);
  }
}

TEST_CASE("adversarial member cancels the perturbation") {
  const auto b = basis_1_sqrt2();
  const auto s = build_perturbation({constant(b, Point{0.0})}, 0.5, 2.0 * kPi, 1);
  const auto minus_g = negate(perturbed(constant(b, Point{0.0}), s));
  CHECK(verify_level_density(minus_g, s, 0, small_scheme()).value == 1.0);
}

TEST_CASE("schedule checker catches violations") {
  const auto s = build_perturbation({constant(basis_1_sqrt2(), Point{0.2})}, 1.0, 2.0 * kPi, 1);
  CHECK_FALSE(check_schedule(s, 1.0));
  auto bad = s;
  bad.Delta[1] = bad.delta[0];
  CHECK(check_schedule(bad, 1.0));
  bad = s;
  bad.multiplier[0] += 0.5;
  CHECK(check_schedule(bad, 1.0));
  CHECK(check_schedule(s, 3.0));
}

TEST_CASE("underflow reports the achieved depth") {
  const auto f = sum(sine(basis_1_sqrt2(), {1, 0}), sine(basis_1_sqrt2(), {0, 1}));
  try {
    build_perturbation({f}, 0.3, 2.0 * kPi, 12);
    FAIL("expected a stage failure");
  } catch (const StageFailure& e) {
    CHECK(std::string(e.what()).find("achieved depth") != std::string::npos);
  }
}

TEST_CASE("lemma construction reaches alpha >= pi / tau0 on the lattice") {
  const auto b = basis_1_sqrt2();
  const auto f = sum(sine(b, {1, 0}), sine(b, {0, 1}));
  const auto c = lemma41_construct({f}, 0.5, 1.0, 2.0 * kPi);
  CHECK(c.params.N == 4);
  CHECK(c.alpha >= kPi / c.tau0.tau0);
  CHECK(c.multiplier == std::floor(c.multiplier));
  PerturbationSeries one;
  one.b = c.b;
  one.Delta = {1.0};
  one.multiplier = {c.multiplier};
  one.alpha = {c.alpha};
  one.delta = {c.params.delta};
  one.tau0 = {c.tau0.tau0};
  CHECK(verify_level_density(f, one, 0, small_scheme()).value < 0.5);
}
