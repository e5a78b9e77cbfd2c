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

// Periodic perturbations that make level sets of a family sparse.
//
// Given a family F of scalar functions that is equicontinuous in mean under
// small shifts, build g(t) = sum_j Delta_j sin(alpha_j t) with every alpha_j
// a multiple of 2 pi / b, such that the set {|f + g| < delta_j} has upper
// density below 2^{-j-1} for every f in F.

#ifndef AP_PERTURB_HPP
#define AP_PERTURB_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ap/expr.hpp"
#include "ap/metrics.hpp"

namespace ap {

struct Lemma41Params {
  double eps = 0.0;
  double Delta = 0.0;
  std::size_t N = 0;
  double eps_prime = 0.0;
  double delta_prime = 0.0;
  double delta = 0.0;
};

/// N is the least integer with 1/(N+1) < eps/2; eps' = eps / (2 N (N+1));
/// delta' = 2 sin(pi/2N) sin(pi eps'/2); delta = min{1, delta' Delta / 3}.
Lemma41Params lemma41_params(double eps, double Delta);

/// Geometric probe grid lo, lo*ratio, ... up to hi (hi itself included).
std::vector<double> geometric_probes(double lo, double hi, double ratio = 1.4142135623730951);

/// Default probes for a family: start at bound / (2 L), L the largest
/// Lipschitz bound in the family, so that the first probe passes.
std::vector<double> default_probes(const std::vector<FuncExpr>& family, double bound, double cap,
                                   double ratio = 1.4142135623730951);

struct Tau0Result {
  double tau0 = 0.0;
  /// (tau, max over the family of capped D^(B)(f, f(. + tau))) per probe tried.
  std::vector<std::pair<double, double>> trace;
};

/// Largest probe tau0 such that every probe up to it keeps the capped
/// Besicovitch distance of every member to its shift below `bound`. The
/// scan stops at the first failing probe. Throws StageFailure when the
/// smallest probe already fails.
Tau0Result tau0_estimate(const std::vector<FuncExpr>& family, double bound,
                         const AveragingScheme& scheme, const std::vector<double>& tau_probe);

/// Smallest integer m with m * 2 pi / b >= pi / tau0, strictly above on ties.
double lattice_multiplier(double b, double tau0);

struct PerturbOptions {
  /// Scheme for the tau0 scans; the scans are many and short.
  AveragingScheme scan{{100, 200, 400}, 1e-2, 3, "pairwise"};
  double probe_ratio = 1.4142135623730951;
  /// 2 pi / b in the family's basis; found with FrequencyBasis::express when unset.
  std::optional<IntVec> lattice;
  std::string family_tag;
};

/// One sparsifying step on its own: parameters, tau0 at bound eps' * delta,
/// and the lattice frequency alpha >= pi / tau0 for period b.
struct Lemma41Construction {
  Lemma41Params params;
  Tau0Result tau0;
  double multiplier = 0.0;
  double alpha = 0.0;
  double b = 0.0;
};

Lemma41Construction lemma41_construct(const std::vector<FuncExpr>& family, double eps, double Delta,
                                      double b, const PerturbOptions& options = {});

/// Recursive construction of depth J (J + 1 terms). Stage j targets density
/// 2^{-j-1}; Delta_0 = Delta / 2 and Delta_j = 0.9 min(2^{-(j+1)} Delta,
/// 2^{-(j-k)} delta_k, k < j). delta_j is half of the stage's
/// lemma41_params delta, so every perturbation bounded by delta_j keeps the stage estimate.
PerturbationSeries build_perturbation(const std::vector<FuncExpr>& family, double Delta, double b,
                                      std::size_t J, const PerturbOptions& options = {});

/// f + g as an expression.
FuncExpr perturbed(const FuncExpr& f, const PerturbationSeries& series);

/// kappa({t : |f(t) + g(t)| < delta_j}).
AverageEstimate verify_level_density(const FuncExpr& f, const PerturbationSeries& series,
                                     std::size_t stage, const AveragingScheme& scheme);

/// All stages in one sampling pass; entry j is the stage-j estimate.
std::vector<AverageEstimate> verify_level_density_all(const FuncExpr& f,
                                                      const PerturbationSeries& series,
                                                      const AveragingScheme& scheme);

/// Mechanical check of the schedule inequalities; returns the first
/// violated one, or nullopt.
std::optional<std::string> check_schedule(const PerturbationSeries& series, double Delta);

}  // namespace ap

#endif  // AP_PERTURB_HPP
