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

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ap/cli.hpp"
#include "ap/select.hpp"

namespace ap::cli {

namespace {

using Rng = std::mt19937_64;

BasisPtr suite_basis() {
  return std::make_shared<const FrequencyBasis>(std::vector<double>{1.0, std::sqrt(2.0), std::sqrt(5.0)});
}

// Real trig polynomial: a constant plus `pairs` conjugate pairs with
// frequencies in [-2, 2]^3.
FuncExpr random_trig(Rng& rng, const BasisPtr& basis, int pairs, std::size_t dim = 1) {
  std::uniform_int_distribution<int> fd(-2, 2);
  std::uniform_real_distribution<double> cd(-1.0, 1.0);
  std::vector<std::pair<CPoint, IntVec>> terms;
  CPoint c0(dim);
  for (auto& c : c0) c = {cd(rng), 0.0};
  terms.emplace_back(c0, IntVec(basis->size(), 0));
  std::vector<IntVec> used{IntVec(basis->size(), 0)};
  while (used.size() < static_cast<std::size_t>(2 * pairs + 1)) {
    IntVec k(basis->size());
    for (auto& x : k) x = fd(rng);
    IntVec mk(k.size());
    std::transform(k.begin(), k.end(), mk.begin(), [](auto x) { return -x; });
    if (std::find(used.begin(), used.end(), k) != used.end()) continue;
    CPoint c(dim), cc(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      c[d] = {0.5 * cd(rng), 0.5 * cd(rng)};
      cc[d] = std::conj(c[d]);
    }
    terms.emplace_back(c, k);
    terms.emplace_back(cc, mk);
    used.push_back(k);
    used.push_back(mk);
  }
  return trig_poly(basis, dim, std::move(terms));
}

std::string fmt(double x) { return io::format_double(x); }

class Suite {
 public:
  void check(const std::string& name, bool ok, const std::string& detail) {
    auto it = std::find_if(results_.begin(), results_.end(), [&](const CheckResult& r) { return r.name == name; });
    if (it == results_.end()) {
      results_.push_back({name, true, ""});
      it = results_.end() - 1;
    }
    if (!ok && it->passed) {
      it->passed = false;
      it->detail = detail;
    }
  }
  std::vector<CheckResult> take() { return std::move(results_); }

 private:
  std::vector<CheckResult> results_;
};

AveragingScheme small_scheme() { return AveragingScheme{{100, 200, 400}, 1e-2, 3, "pairwise"}; }

}  // namespace

std::vector<CheckResult> run_invariant_suite(std::uint64_t seed, const AveragingScheme& scheme) {
  scheme.validate();
  Rng rng(seed);
  Suite s;
  const BasisPtr basis = suite_basis();
  const MetricSpaceCfg line(1, MetricKind::euclidean);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  // Truncation is 2-Lipschitz and sgn maps zero to zero.
  for (int i = 0; i < 2000; ++i) {
    const double a = 0.05 + 3.0 * (u(rng) + 1.0);
    Point h1(3), h2(3);
    for (std::size_t d = 0; d < 3; ++d) {
      h1[d] = 4.0 * u(rng);
      h2[d] = i % 4 == 0 ? h1[d] + 1e-3 * u(rng) : 4.0 * u(rng);
    }
    Point d1 = truncate_value(h1, a), d2 = truncate_value(h2, a);
    for (std::size_t d = 0; d < 3; ++d) {
      d1[d] -= d2[d];
      h1[d] -= h2[d];
    }
    const double lhs = euclidean_norm(d1), rhs = 2.0 * euclidean_norm(h1);
    s.check("truncation 2-Lipschitz", lhs <= rhs * (1.0 + 1e-12) + 1e-300,
            "|T h1 - T h2| = " + fmt(lhs) + " > " + fmt(rhs));
    const Point g = sgn_value(h2);
    const double n = euclidean_norm(h2);
    s.check("sgn zero case", n == 0.0 || std::abs(euclidean_norm(g) - 1.0) < 1e-14, "|sgn h| != 1");
  }
  {
    const Point z = sgn_value(Point{0.0, 0.0, 0.0});
    s.check("sgn zero case", z == Point{0.0, 0.0, 0.0}, "sgn(0) != 0");
    const FuncExpr zero = constant(basis, {0.0});
    s.check("sgn zero case", sgn_op(zero).eval_scalar(1.25) == 0.0, "sgn(0)(t) != 0");
  }

  // Shifts: pointwise identity and increments.
  for (int i = 0; i < 20; ++i) {
    const FuncExpr f = random_trig(rng, basis, 3);
    for (int k = 0; k < 50; ++k) {
      const double t = 1e3 * u(rng), tau = 10.0 * u(rng);
      const double lhs = shift(f, tau).eval_scalar(t);
      const double rhs = f.eval_at(Time{t, tau})[0];
      s.check("shift identity", std::abs(lhs - rhs) <= 1e-12,
              "f(. + tau)(t) = " + fmt(lhs) + " vs f(t + tau) = " + fmt(rhs));
      const double inc = f.increment(Time{t, 0.0}, tau)[0];
      const double diff = rhs - f.eval_scalar(t);
      s.check("shift identity", std::abs(inc - diff) <= 1e-9, "increment " + fmt(inc) + " vs " + fmt(diff));
    }
  }

  // Density subadditivity on random level sets.
  for (int i = 0; i < 3; ++i) {
    const SetExpr A = level_set(random_trig(rng, basis, 2), 0.3 * u(rng));
    const SetExpr B = level_set(random_trig(rng, basis, 2), 0.3 * u(rng));
    const double ka = density_upper(A, scheme, DensityMode::complement).value;
    const double kb = density_upper(B, scheme, DensityMode::complement).value;
    const double kab = density_upper(set_intersect(A, B), scheme, DensityMode::complement).value;
    s.check("density subadditivity", kab <= ka + kb + 1e-12,
            "kappa~(A & B) = " + fmt(kab) + " > " + fmt(ka) + " + " + fmt(kb));
    const double da = density_upper(A, scheme, DensityMode::direct).value;
    const double db = density_upper(B, scheme, DensityMode::direct).value;
    const double dab = density_upper(set_union(A, B), scheme, DensityMode::direct).value;
    s.check("density subadditivity", dab <= da + db + 1e-12,
            "kappa(A | B) = " + fmt(dab) + " > " + fmt(da) + " + " + fmt(db));
  }

  // Frequency modules.
  std::uniform_int_distribution<int> gd(-4, 4);
  auto random_vec = [&] {
    IntVec v(3);
    for (auto& x : v) x = gd(rng);
    return v;
  };
  for (int i = 0; i < 200; ++i) {
    const IntVec g1 = random_vec(), g2 = random_vec();
    const FrequencyModule m1(basis, {g1, random_vec()});
    const FrequencyModule m2(basis, {g2});
    const FrequencyModule m = m1 + m2;
    s.check("module membership algebra", m.contains(m1) && m.contains(m2), "M1 + M2 misses a summand");
    IntVec comb(3);
    for (std::size_t k = 0; k < 3; ++k) comb[k] = 3 * g1[k] - 2 * g2[k];
    s.check("module membership algebra", m.contains(comb), "integer combination not in M1 + M2");
    IntVec off = g1;
    off[0] += 1;
    const bool in = m1.contains(off);
    const bool unit_in = m1.contains(IntVec{1, 0, 0});
    s.check("module membership algebra", in == unit_in, "lambda + e1 in M1 disagrees with e1 in M1");
  }
  for (int i = 0; i < 10; ++i) {
    const FuncExpr f = random_trig(rng, basis, 2), g = random_trig(rng, basis, 2);
    s.check("module membership algebra", (freq_module(f) + freq_module(g)).contains(freq_module(sum(f, g))),
            "Mod(f + g) not inside Mod f + Mod g");
  }

  // Besicovitch metric axioms and the Stepanov bound.
  for (int i = 0; i < 3; ++i) {
    const FuncExpr f = random_trig(rng, basis, 2), g = random_trig(rng, basis, 2), h = random_trig(rng, basis, 2);
    const double fg = metric_DB_p(f, g, 1.0, line, scheme).value;
    const double gf = metric_DB_p(g, f, 1.0, line, scheme).value;
    const double gh = metric_DB_p(g, h, 1.0, line, scheme).value;
    const double fh = metric_DB_p(f, h, 1.0, line, scheme).value;
    s.check("metric axioms", fg == gf, "D(f, g) != D(g, f)");
    s.check("metric axioms", fh <= fg + gh + 1e-12, "triangle inequality fails");
    const double ds = metric_DS_p(f, g, 1.0, line, scheme, 1.0);
    s.check("metric axioms", fg <= ds + 1e-6, "D^(B) = " + fmt(fg) + " > D^(S) = " + fmt(ds));
  }

  // Perturbation schedules and lemma parameters.
  for (int i = 0; i < 20; ++i) {
    const double eps = 0.02 + 0.98 * (u(rng) + 1.0) / 2.0, Delta = 0.1 + (u(rng) + 1.0);
    const auto p = lemma41_params(eps, Delta);
    const bool minimal = 1.0 / static_cast<double>(p.N + 1) < eps / 2.0 &&
                         (p.N == 1 || !(1.0 / static_cast<double>(p.N) < eps / 2.0));
    s.check("perturbation parameters", minimal && p.delta <= std::min(1.0, p.delta_prime * Delta / 3.0),
            "parameters at eps = " + fmt(eps));
  }
  {
    const FuncExpr f = random_trig(rng, basis, 2);
    PerturbOptions opt;
    opt.scan = small_scheme();
    opt.lattice = IntVec{1, 0, 0};
    const auto g = build_perturbation({f}, 0.3, 2.0 * std::numbers::pi, 1, opt);
    const auto bad = check_schedule(g, 0.3);
    s.check("perturbation schedule", !bad && g.amplitude_sum() < 0.3, bad ? *bad : "amplitude sum too large");
  }

  // Partition disjointness and approximation.
  {
    const FuncExpr f = random_trig(rng, basis, 1);
    const double eps = 0.5;
    PartitionOptions opt;
    opt.depth = 0;
    const auto fam = build_partition(f, eps, line, small_scheme(), opt);
    for (int i = 0; i < 400; ++i) {
      const double t = 400.0 * u(rng);
      int hits = 0;
      for (const auto& set : fam.sets) hits += set.contains(t);
      s.check("partition disjointness", hits <= 1, "t = " + fmt(t) + " lies in " + std::to_string(hits) + " sets");
      const auto j = fam.member_index(t);
      s.check("partition disjointness", j == fam.member_index_linear(t), "locator disagrees with the sets");
      if (j) {
        const double d = std::abs(f.eval_scalar(t) - fam.points[*j][0]);
        s.check("partition approximation", d < eps, "rho(f(t), x_j) = " + fmt(d));
      }
    }
  }

  // Selection chain contraction.
  {
    const FuncExpr f = random_trig(rng, basis, 1);
    const MultiMap F{{f, add_constant(f, 2.0)}};
    const auto r = build_selection(F, constant(basis, {0.0}), 1.0, 2, line, small_scheme());
    for (const auto& level : r.chain_log)
      s.check("selection chain contraction", level.max_step <= level.step_bound || level.depth == 1,
              "depth " + std::to_string(level.depth) + " step " + fmt(level.max_step));
    s.check("selection chain contraction", r.ok(), r.ok() ? "" : r.violations.front());
    const auto gs = gamma_schedule(1 + seed % 8);
    s.check("selection chain contraction", gs.partial_sum() < 1.0 / 6.0, "gamma budget exceeded");
  }

  return s.take();
}

}  // namespace ap::cli
