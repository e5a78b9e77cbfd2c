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
#include <random>

#include "ap/select.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace ap;
using ap::testing::basis_1_sqrt2;

namespace {

AveragingScheme small_scheme() { return AveragingScheme{{100, 200, 400}, 1e-2, 3, "pairwise"}; }

MetricSpaceCfg line() { return MetricSpaceCfg(1, MetricKind::euclidean, {0.0}); }

FuncExpr sin_t() { return sine(basis_1_sqrt2(), {1, 0}); }
FuncExpr cos_t() { return cosine(basis_1_sqrt2(), {1, 0}); }
FuncExpr zero() { return constant(basis_1_sqrt2(), {0.0}); }

std::vector<double> sample_times(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> td(-400, 400);
  std::vector<double> out(n);
  for (auto& t : out) t = td(rng);
  return out;
}

}  // namespace

TEST_CASE("gamma schedule") {
  const auto s = gamma_schedule(3);
  REQUIRE(s.gammas.size() == 4);
  CHECK(s.gammas[0] == 0.05);
  CHECK(s.gammas[1] == 0.025);
  CHECK(s.gammas[2] == 0.0125);
  CHECK(s.gammas[3] == 0.00625);
  for (std::size_t n = 1; n <= 20; ++n) {
    const auto g = gamma_schedule(n);
    CHECK(g.partial_sum() < 1.0 / 6.0);
    for (std::size_t i = 1; i < g.gammas.size(); ++i) CHECK(g.gammas[i] < g.gammas[i - 1]);
    // Tail by direct summation of many terms.
    double tail = 0.0;
    for (int m = static_cast<int>(n) + 1; m < 80; ++m) tail += std::ldexp(1.0, -m) / 10 + std::ldexp(1.0, -m - 1) / 10;
    CHECK(g.tail_bound(0.7) == doctest::Approx(2 * tail * 0.7).epsilon(1e-12));
  }
  CHECK(gamma_schedule(1).tail_bound(1.0) == doctest::Approx(0.15));
  CHECK_THROWS_AS(gamma_schedule(0), InvalidArgument);
}

TEST_CASE("singleton multimap selects its trajectory") {
  const MultiMap F{{sin_t()}};
  const double eps = 0.5;
  const auto r = build_selection(F, cos_t(), eps, 2, line(), small_scheme());
  CHECK(r.ok());
  for (const auto& level : r.cells)
    for (const auto& c : level) {
      CHECK(c.trajectory == 0);
      CHECK(c.point[0] == sin_t().eval_scalar(c.representative));
    }
  int near = 0;
  const auto ts = sample_times(2000, 1);
  for (double t : ts) near += std::abs(r.selection.eval_scalar(t) - std::sin(t)) < 2 * r.gammas.gamma(2) * eps;
  CHECK(near >= 1990);
  CHECK(r.certificate.membership.value < 0.02);
}

TEST_CASE("two branches and g = 0 track the sine branch") {
  const MultiMap F{{sin_t(), add_constant(sin_t(), 2.0)}};
  const double eps = 0.3;
  const auto r = build_selection(F, zero(), eps, 2, line(), small_scheme());
  CHECK(r.ok());
  REQUIRE(r.chain_log.size() == 2);
  CHECK(r.chain_log[1].max_step <= r.chain_log[1].step_bound);
  CHECK(r.chain_log[1].step_bound == doctest::Approx(2 * (0.05 + 0.025) * eps));
  for (const auto& c : r.cells[0]) CHECK(c.trajectory == 0);
  CHECK(r.certificate.nearness.value < 0.01);
  CHECK(r.certificate.membership.value < 0.02);
  CHECK(r.certificate.tail_bound == doctest::Approx(2 * 0.0375 * eps));

  int bad = 0;
  const auto ts = sample_times(2000, 2);
  for (double t : ts) {
    const double y = r.selection.eval_scalar(t);
    bad += std::abs(y) >= std::abs(std::sin(t)) + eps;
  }
  CHECK(bad <= 20);
}

TEST_CASE("sin and cos with g = sin") {
  const MultiMap F{{sin_t(), cos_t()}};
  const double eps = 0.4;
  const auto r = build_selection(F, sin_t(), eps, 1, line(), small_scheme());
  CHECK(r.ok());
  for (const auto& c : r.cells[0]) CHECK(c.point[0] == std::sin(c.representative));
  int ok = 0;
  const auto ts = sample_times(2000, 3);
  for (double t : ts) {
    const double y = r.selection.eval_scalar(t);
    const double gt = std::sin(t);
    const double dF = std::min(std::abs(gt - std::sin(t)), std::abs(gt - std::cos(t)));
    ok += std::abs(y - gt) - dF < eps;
  }
  CHECK(ok >= 1980);
}

TEST_CASE("deeper cells refine their parents") {
  const MultiMap F{{sin_t(), cos_t()}};
  const auto r = build_selection(F, zero(), 0.5, 2, line(), small_scheme());
  const auto ts = sample_times(1000, 4);
  for (double t : ts) {
    const auto leaf = r.leaf_at(t);
    if (!leaf) continue;
    const auto& c = r.cells[1][*leaf];
    CHECK(r.partitions[0].member_index(t) == std::optional<std::size_t>(c.indices[0]));
    CHECK(r.partitions[1].member_index(t) == std::optional<std::size_t>(c.indices[1]));
    CHECK(r.cells[0][c.parent].indices[0] == c.indices[0]);
  }
}

TEST_CASE("selection module lies in the reported superset") {
  const MultiMap F{{sin_t(), cos_t()}};
  const auto r = build_selection(F, zero(), 1.0, 1, line(), small_scheme());
  REQUIRE(r.module_report);
  CHECK(r.module_report->contains(freq_module(r.selection)));
  FrequencyModule inputs = freq_module(F.trajectories[0]) + freq_module(F.trajectories[1]);
  for (const auto& p : r.partitions) inputs = inputs + *p.module_report;
  CHECK(inputs.contains(*r.module_report));
}

TEST_CASE("dense selections") {
  const MultiMap F{{sin_t(), add_constant(sin_t(), 2.0)}};
  const std::vector<Point> anchors{{0.0}, {2.0}};
  const auto sel = dense_selections(F, 0.5, 1, 2, line(), small_scheme(), anchors);
  REQUIRE(sel.size() == 4);
  CHECK(sel[0].eps == 0.5);
  CHECK(sel[1].eps == 0.25);
  int ok = 0, total = 0;
  const auto ts = sample_times(500, 5);
  for (double t : ts)
    for (const auto& y : F.values(t)) {
      double best = INFINITY;
      for (const auto& s : sel) best = std::min(best, std::abs(s.selection.eval_scalar(t) - y[0]));
      ok += best < 0.25;
      ++total;
    }
  CHECK(ok >= total * 98 / 100);

  const MultiMap single{{sin_t()}};
  const auto one = dense_selections(single, 1.0, 1, 1, line(), small_scheme());
  REQUIRE_FALSE(one.empty());
  for (const auto& s : one)
    for (double t : ts) CHECK(std::abs(s.selection.eval_scalar(t) - std::sin(t)) < 0.1);
}

TEST_CASE("selection argument checks") {
  CHECK_THROWS_AS(build_selection(MultiMap{}, zero(), 0.3, 1, line(), small_scheme()), InvalidArgument);
  const MultiMap F{{sin_t()}};
  CHECK_THROWS_AS(build_selection(F, zero(), 1.5, 1, line(), small_scheme()), InvalidArgument);
  CHECK_THROWS_AS(build_selection(F, zero(), 0.3, 0, line(), small_scheme()), InvalidArgument);
}
