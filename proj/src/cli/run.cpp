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
#include <fstream>
#include <functional>
#include <numbers>
#include <random>

#include "ap/cli.hpp"
#include "ap/kernels.hpp"
#include "ap/select.hpp"

namespace ap::cli {

namespace {

using io::SchemaError;

constexpr const char* kScenarios[] = {"metrics", "almost_periods", "perturb", "partition", "select", "verify"};

struct Certificate {
  std::string name;
  bool passed;
  double measured;
  double bound;
};

class Context {
 public:
  explicit Context(const RunConfig& c) : cfg(c) {}

  const RunConfig& cfg;
  json results = json::object();
  std::vector<Certificate> certs;
  std::vector<OutputFile> files;

  void certify(const std::string& name, double measured, double bound, bool passed) {
    certs.push_back({name, passed, measured, bound});
  }
  void certify_below(const std::string& name, double measured, double bound) {
    certify(name, measured, bound, measured < bound);
  }
};

const json& input(const RunConfig& c, const char* key) {
  const auto it = c.inputs.find(key);
  if (it == c.inputs.end()) throw SchemaError(std::string("inputs: missing field '") + key + "'");
  return *it;
}

double real_input(const RunConfig& c, const char* key) {
  const json& j = input(c, key);
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return io::parse_real(j.get<std::string>());
  throw SchemaError(std::string("inputs.") + key + ": expected a number");
}

double real_input_or(const RunConfig& c, const char* key, double fallback) {
  return c.inputs.contains(key) ? real_input(c, key) : fallback;
}

std::size_t count_input_or(const RunConfig& c, const char* key, std::size_t fallback) {
  if (!c.inputs.contains(key)) return fallback;
  const json& j = c.inputs[key];
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0)
    throw SchemaError(std::string("inputs.") + key + ": expected a non-negative integer");
  return j.get<std::size_t>();
}

FuncExpr function_input(const RunConfig& c, const char* key, std::size_t dim) {
  FuncExpr f = io::parse_function(input(c, key), c.basis);
  if (f.dim() != dim) throw SchemaError(std::string("inputs.") + key + ": dimension does not match space.dim");
  return f;
}

std::vector<FuncExpr> function_list(const RunConfig& c, const char* key, std::size_t dim) {
  const json& j = input(c, key);
  if (!j.is_array() || j.empty()) throw SchemaError(std::string("inputs.") + key + ": expected a non-empty array");
  std::vector<FuncExpr> out;
  for (const auto& x : j) {
    out.push_back(io::parse_function(x, c.basis));
    if (out.back().dim() != dim) throw SchemaError(std::string("inputs.") + key + ": dimension mismatch");
  }
  return out;
}

std::vector<double> sample_times(std::uint64_t seed, std::size_t n, double b) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> td(-b, b);
  std::vector<double> out(n);
  for (auto& t : out) t = td(rng);
  return out;
}

double eps_input(const RunConfig& c, const char* key = "eps") {
  const double eps = real_input(c, key);
  if (!(eps > 0.0 && eps <= 1.0)) throw SchemaError(std::string("inputs.") + key + ": must lie in (0, 1]");
  return eps;
}

// ---- scenarios ------------------------------------------------------------

using Scenario = std::function<void(Context&)>;

Scenario prepare_metrics(const RunConfig& c) {
  const FuncExpr f = function_input(c, "f", c.space.dim);
  const FuncExpr g = function_input(c, "g", c.space.dim);
  const double p = real_input_or(c, "p", 1.0);
  if (!(p >= 1.0)) throw SchemaError("inputs.p: must be >= 1");
  std::vector<std::string> measures{"DB"};
  if (c.inputs.contains("measures")) measures = c.inputs["measures"].get<std::vector<std::string>>();
  for (const auto& m : measures)
    if (m != "DB" && m != "DS" && m != "Dinf" && m != "fourier" && m != "mean")
      throw SchemaError("inputs.measures: unknown measure '" + m + "'");
  std::vector<double> lambdas;
  if (c.inputs.contains("lambdas"))
    for (const auto& x : c.inputs["lambdas"]) lambdas.push_back(x.is_string() ? io::parse_real(x.get<std::string>()) : x.get<double>());
  const double xi = real_input_or(c, "xi_grid", 1.0);
  json expect = c.inputs.value("expect", json::object());
  return [=](Context& ctx) {
    const auto& sch = ctx.cfg.scheme;
    for (const auto& m : measures) {
      if (m == "DB") {
        const auto e = metric_DB_p(f, g, p, ctx.cfg.space, sch);
        ctx.results["DB_p"] = io::estimate_to_json(e);
      } else if (m == "DS") {
        ctx.results["DS_p"] = metric_DS_p(f, g, p, ctx.cfg.space, sch, xi);
      } else if (m == "Dinf") {
        ctx.results["Dinf"] = metric_Dinf(f, g, ctx.cfg.space, sch);
      } else if (m == "mean") {
        if (f.dim() != 1) throw SchemaError("measure 'mean' needs a scalar f");
        ctx.results["mean"] = io::estimate_to_json(time_average(f, sch));
      } else if (m == "fourier") {
        json arr = json::array();
        for (const auto& est : fourier_bohr_many(f, lambdas, sch)) {
          json coef = json::array();
          for (const auto& z : est.coef) coef.push_back(json::array({z.real(), z.imag()}));
          arr.push_back(json{{"lambda", est.lambda},
                             {"coef", coef},
                             {"error_bound", est.error_bound ? json(*est.error_bound) : json(nullptr)}});
        }
        ctx.results["fourier"] = arr;
      }
    }
    for (const auto& [key, want] : expect.items()) {
      if (!ctx.results.contains(key)) throw SchemaError("inputs.expect: '" + key + "' was not measured");
      const json& r = ctx.results[key];
      const double got = r.is_object() ? r["value"].get<double>() : r.get<double>();
      const double target = want.at("value").get<double>(), tol = want.at("tol").get<double>();
      ctx.certify(key + " within tolerance", std::abs(got - target), tol, std::abs(got - target) <= tol);
    }
  };
}

ShiftMetric shift_metric(const std::string& name) {
  if (name == "DB") return ShiftMetric::DB_p;
  if (name == "DS") return ShiftMetric::DS_p;
  if (name == "capped") return ShiftMetric::capped;
  throw SchemaError("inputs.metric: expected DB, DS or capped");
}

Scenario prepare_almost_periods(const RunConfig& c) {
  const FuncExpr f = function_input(c, "f", c.space.dim);
  const double eps = real_input(c, "eps");
  const ShiftMetric metric = shift_metric(c.inputs.value("metric", std::string("DB")));
  const double p = real_input_or(c, "p", 1.0);
  const double tau_max = real_input(c, "tau_max");
  const double tau_step = real_input_or(c, "tau_step", c.scheme.step);
  const bool require_dense = c.inputs.value("require_nonempty", false);
  if (!(eps > 0.0) || !(tau_max > 0.0) || !(tau_step > 0.0)) throw SchemaError("inputs: eps, tau_max, tau_step must be positive");
  return [=](Context& ctx) {
    const auto scan = almost_periods(f, eps, metric, p, tau_max, tau_step, ctx.cfg.space, ctx.cfg.scheme);
    io::CsvWriter csv({"tau", "distance", "accepted"});
    for (std::size_t i = 0; i < scan.tau.size(); ++i)
      csv.row({scan.tau[i], scan.distance[i], scan.distance[i] < eps ? 1.0 : 0.0});
    ctx.files.push_back({"almost_periods.csv", csv.text()});
    ctx.results["scanned"] = scan.tau.size();
    ctx.results["accepted"] = scan.accepted.size();
    ctx.results["witness_gap"] = scan.witness_gap ? json(*scan.witness_gap) : json(nullptr);
    if (require_dense)
      ctx.certify("almost periods found", static_cast<double>(scan.accepted.size()), 1.0, !scan.empty());
  };
}

Scenario prepare_perturb(const RunConfig& c) {
  const auto family = function_list(c, "family", 1);
  const double Delta = real_input(c, "Delta");
  const double b = real_input_or(c, "b", 2.0 * std::numbers::pi);
  const std::size_t J = count_input_or(c, "J", 0);
  const double tol = real_input_or(c, "tol", 0.02);
  const bool verify = c.inputs.value("verify", true);
  const bool build = c.inputs.value("build", true);
  const std::size_t checked_stages = count_input_or(c, "verify_stages", J + 1);
  if (!(Delta > 0.0) || !(b > 0.0)) throw SchemaError("inputs: Delta and b must be positive");
  PerturbOptions opt;
  if (c.inputs.contains("scan")) opt.scan = io::parse_scheme(c.inputs["scan"]);
  if (c.inputs.contains("lattice")) opt.lattice = c.inputs["lattice"].get<IntVec>();
  std::optional<std::pair<double, double>> lemma;
  if (c.inputs.contains("lemma")) {
    const json& l = c.inputs["lemma"];
    if (!l.contains("eps") || !l.contains("Delta")) throw SchemaError("inputs.lemma: needs eps and Delta");
    lemma = {{l["eps"].get<double>(), l["Delta"].get<double>()}};
  }
  return [=](Context& ctx) {
    const auto& sch = ctx.cfg.scheme;
    if (lemma) {
      const auto [eps, D] = *lemma;
      const auto con = lemma41_construct(family, eps, D, b, opt);
      json lj{{"N", con.params.N},
              {"eps_prime", con.params.eps_prime},
              {"delta_prime", con.params.delta_prime},
              {"delta", con.params.delta},
              {"tau0", con.tau0.tau0},
              {"multiplier", con.multiplier},
              {"alpha", con.alpha}};
      PerturbationSeries one;
      one.b = b;
      one.Delta = {D};
      one.multiplier = {con.multiplier};
      one.alpha = {con.alpha};
      one.delta = {con.params.delta};
      one.tau0 = {con.tau0.tau0};
      one.lattice = opt.lattice;
      if (!one.lattice) one.lattice = family.front().basis()->express(2.0 * std::numbers::pi / b);
      json kappas = json::array();
      for (const auto& f : family) {
        const FuncExpr h = perturbed(f, one);
        const SetExpr near0 = set_intersect(level_set(h, con.params.delta, Relation::lt),
                                            level_set(negate(h), con.params.delta, Relation::lt));
        const auto k = density_upper(near0, sch, DensityMode::direct);
        kappas.push_back(io::estimate_to_json(k));
        ctx.certify_below("lemma level density", k.value, eps + tol);
      }
      lj["kappa"] = kappas;
      ctx.results["lemma"] = lj;
    }

    if (!build) return;
    const auto g = build_perturbation(family, Delta, b, J, opt);
    ctx.results["series"] = io::series_to_json(g);
    const auto bad = check_schedule(g, Delta);
    ctx.results["schedule_violation"] = bad ? json(*bad) : json(nullptr);
    ctx.certify("schedule", bad ? 1.0 : 0.0, 0.0, !bad);

    const auto grid = kernels::midpoint_grid(sch.b_max(), sch.step);
    const double gmax = kernels::grid_max(grid, [&](double t) { return std::abs(g.eval(t)); }).first;
    ctx.results["g_sup"] = gmax;
    ctx.certify_below("sup |g| < Delta", gmax, Delta);

    double per = 0.0;
    for (double t : sample_times(ctx.cfg.seed, 1000, sch.b_max()))
      per = std::max(per, std::abs(g.eval(Time{t, b}) - g.eval(t)));
    ctx.results["periodicity_defect"] = per;
    ctx.certify("b-periodicity", per, 1e-12, per <= 1e-12);

    io::CsvWriter csv({"t", "g"});
    for (int i = 0; i <= 2000; ++i) {
      const double t = b * i / 2000.0;
      csv.row({t, g.eval(t)});
    }
    ctx.files.push_back({"perturbation.csv", csv.text()});

    if (verify) {
      json per_f = json::array();
      for (const auto& f : family) {
        json stages = json::array();
        const auto ks = verify_level_density_all(f, g, sch);
        for (std::size_t j = 0; j < std::min(checked_stages, ks.size()); ++j) {
          stages.push_back(io::estimate_to_json(ks[j]));
          ctx.certify_below("level density stage " + std::to_string(j), ks[j].value,
                            std::ldexp(1.0, -static_cast<int>(j) - 1) + tol);
        }
        per_f.push_back(stages);
      }
      ctx.results["kappa"] = per_f;
    }
  };
}

json partition_sets_json(const PartitionFamily& fam) {
  json primed = json::array(), sets = json::array();
  for (const auto& p : fam.primed) primed.push_back(io::set_to_json(p));
  for (std::size_t j = 0; j < fam.sets.size(); ++j) {
    const json self{{"node", "ref"}, {"index", j}};
    if (j == 0 || fam.trivial) {
      sets.push_back(self);
      continue;
    }
    json refs = json::array();
    for (std::size_t k = 0; k < j; ++k) refs.push_back(k);
    sets.push_back(json{{"node", "diff"}, {"left", self}, {"right", json{{"node", "union"}, {"refs", refs}}}});
  }
  return json{{"primed", primed}, {"sets", sets}};
}

Scenario prepare_partition(const RunConfig& c) {
  const FuncExpr f = function_input(c, "f", c.space.dim);
  const double eps = eps_input(c);
  PartitionOptions opt;
  opt.depth = count_input_or(c, "J", opt.depth);
  opt.resid_target = real_input_or(c, "resid_target", opt.resid_target);
  opt.max_centers = count_input_or(c, "max_centers", opt.max_centers);
  if (c.inputs.contains("scan")) opt.scan = io::parse_scheme(c.inputs["scan"]);
  const std::size_t samples = count_input_or(c, "samples", 100000);
  const std::size_t trace_rows = count_input_or(c, "trace_rows", 10000);
  const double sep_rate = real_input_or(c, "separation_rate", 0.995);
  const bool emit_sets = c.inputs.value("emit_sets", true);
  return [=](Context& ctx) {
    const auto& space = ctx.cfg.space;
    const auto fam = build_partition(f, eps, space, ctx.cfg.scheme, opt);
    ctx.results["eps"] = eps;
    ctx.results["N"] = fam.sets.size();
    ctx.results["trivial"] = fam.trivial;
    ctx.results["b"] = fam.b;
    json centers = json::array();
    for (const auto& x : fam.points) centers.push_back(io::point_to_json(x));
    ctx.results["centers"] = centers;
    ctx.results["residual"] = io::estimate_to_json(fam.residual_density);
    ctx.results["cover_residual"] = fam.cover_residual.value;
    ctx.results["residual_profile"] = fam.residual_profile;
    if (fam.module_report) ctx.results["module_generators"] = fam.module_report->generators();
    if (emit_sets) ctx.results["sets"] = partition_sets_json(fam);

    const auto ts = sample_times(ctx.cfg.seed, samples, ctx.cfg.scheme.b_max());
    std::vector<int> member(ts.size(), -1);
    std::vector<double> dist(ts.size(), 0.0);
    std::vector<int> overlaps(ts.size(), 0), mismatch(ts.size(), 0);
#pragma omp parallel for schedule(dynamic, 256)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(ts.size()); ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      const double t = ts[i];
      const Point y = f.eval(t);
      int hits = 0;
      for (std::size_t j = 0; j < fam.sets.size(); ++j) {
        // T_j lies inside T'_j; only those are evaluated through the Diff chain.
        if (!fam.primed[j].contains(t) || !fam.sets[j].contains(t)) continue;
        if (hits++ == 0) member[i] = static_cast<int>(j);
      }
      overlaps[i] = hits > 1;
      const auto loc = fam.member_index(t);
      mismatch[i] = loc.has_value() != (member[i] >= 0) || (loc && static_cast<int>(*loc) != member[i]);
      if (member[i] >= 0) {
        dist[i] = space.distance(y, fam.points[static_cast<std::size_t>(member[i])]);
      } else {
        double m = INFINITY;
        for (const auto& x : fam.points) m = std::min(m, space.distance(y, x));
        dist[i] = m;
      }
    }
    std::size_t decided = 0, approx_ok = 0, outside = 0, separated = 0, overlap = 0, locator_bad = 0;
    io::CsvWriter csv({"t", "member_index", "dist_to_center"});
    for (std::size_t i = 0; i < ts.size(); ++i) {
      overlap += overlaps[i];
      locator_bad += mismatch[i];
      if (member[i] >= 0) {
        ++decided;
        approx_ok += dist[i] < eps;
      } else {
        ++outside;
        separated += dist[i] > eps / 3.0;
      }
      if (i < trace_rows) csv.row({ts[i], static_cast<double>(member[i]), dist[i]});
    }
    ctx.files.push_back({"partition_samples.csv", csv.text()});
    const double approx_rate = decided ? static_cast<double>(approx_ok) / static_cast<double>(decided) : 1.0;
    const double sep = outside ? static_cast<double>(separated) / static_cast<double>(outside) : 1.0;
    ctx.results["samples"] = json{{"total", ts.size()},
                                  {"decided", decided},
                                  {"approximation_pass", approx_ok},
                                  {"overlaps", overlap},
                                  {"locator_mismatch", locator_bad},
                                  {"outside", outside},
                                  {"separated", separated}};
    ctx.certify("approximation on decided samples", approx_rate, 1.0, approx_ok == decided);
    ctx.certify("pairwise disjointness", static_cast<double>(overlap), 0.0, overlap == 0);
    ctx.certify("locator agrees with sets", static_cast<double>(locator_bad), 0.0, locator_bad == 0);
    ctx.certify_below("residual density", fam.residual_density.value, opt.resid_target);
    ctx.certify("separation residue", sep, sep_rate, sep >= sep_rate);
  };
}

Scenario prepare_select(const RunConfig& c) {
  MultiMap F{function_list(c, "trajectories", c.space.dim)};
  const FuncExpr g = function_input(c, "g", c.space.dim);
  const double eps = eps_input(c);
  const std::size_t n_max = count_input_or(c, "n_max", 1);
  if (n_max < 1) throw SchemaError("inputs.n_max: must be >= 1");
  SelectOptions opt;
  opt.depth = count_input_or(c, "J", opt.depth);
  opt.resid_target = real_input_or(c, "resid_target", opt.resid_target);
  opt.max_centers = count_input_or(c, "max_centers", opt.max_centers);
  if (c.inputs.contains("scan")) opt.scan = io::parse_scheme(c.inputs["scan"]);
  const std::size_t trace_rows = count_input_or(c, "trace_rows", 10000);
  const double thr_m = real_input_or(c, "membership_threshold", 0.02);
  const double thr_n = real_input_or(c, "nearness_threshold", 0.02);
  return [=](Context& ctx) {
    const auto& space = ctx.cfg.space;
    const auto r = build_selection(F, g, eps, n_max, space, ctx.cfg.scheme, opt);
    ctx.results["eps"] = eps;
    ctx.results["depth"] = n_max;
    ctx.results["gammas"] = r.gammas.gammas;
    json chain = json::array();
    for (const auto& l : r.chain_log) {
      chain.push_back(json{{"depth", l.depth},
                           {"partition_size", l.partition_size},
                           {"cells", l.cells},
                           {"max_step", l.max_step},
                           {"step_bound", l.step_bound},
                           {"max_hausdorff", l.max_hausdorff},
                           {"residual", l.residual.value}});
      if (l.depth > 1) ctx.certify("chain step at depth " + std::to_string(l.depth), l.max_step, l.step_bound,
                                   l.max_step <= l.step_bound);
    }
    ctx.results["chain_log"] = chain;
    json cells = json::array();
    for (const auto& level : r.cells)
      for (const auto& cell : level)
        cells.push_back(json{{"indices", cell.indices},
                             {"representative", cell.representative},
                             {"trajectory", cell.trajectory},
                             {"point", io::point_to_json(cell.point)}});
    ctx.results["cells"] = cells;
    ctx.results["certificate"] = json{{"tail_bound", r.certificate.tail_bound},
                                      {"membership_threshold", r.certificate.membership_threshold},
                                      {"membership_exceedance", io::estimate_to_json(r.certificate.membership)},
                                      {"nearness_exceedance", io::estimate_to_json(r.certificate.nearness)},
                                      {"gap_samples", r.certificate.gap_samples}};
    ctx.results["violations"] = r.violations;
    ctx.certify("refinement checks", static_cast<double>(r.violations.size()), 0.0, r.ok());
    ctx.certify_below("membership exceedance", r.certificate.membership.value, thr_m);
    ctx.certify_below("nearness exceedance", r.certificate.nearness.value, thr_n);

    std::vector<std::string> header{"t"};
    for (std::size_t d = 0; d < space.dim; ++d) header.push_back("selected_" + std::to_string(d));
    header.push_back("dist_to_F");
    header.push_back("dist_g_to_F");
    io::CsvWriter csv(header);
    for (double t : sample_times(ctx.cfg.seed, trace_rows, ctx.cfg.scheme.b_max())) {
      const Point y = r.selection.eval(t);
      std::vector<double> row{t};
      row.insert(row.end(), y.begin(), y.end());
      row.push_back(F.distance(y, t, space));
      row.push_back(F.distance(g.eval(t), t, space));
      csv.row(row);
    }
    ctx.files.push_back({"selection_trace.csv", csv.text()});
  };
}

Scenario prepare_verify(const RunConfig&) {
  return [](Context& ctx) {
    json checks = json::array();
    for (const auto& r : run_invariant_suite(ctx.cfg.seed, ctx.cfg.scheme)) {
      checks.push_back(json{{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
      ctx.certify(r.name, r.passed ? 0.0 : 1.0, 0.0, r.passed);
    }
    ctx.results["checks"] = checks;
  };
}

Scenario prepare(const RunConfig& c) {
  if (c.scenario == "metrics") return prepare_metrics(c);
  if (c.scenario == "almost_periods") return prepare_almost_periods(c);
  if (c.scenario == "perturb") return prepare_perturb(c);
  if (c.scenario == "partition") return prepare_partition(c);
  if (c.scenario == "select") return prepare_select(c);
  if (c.scenario == "verify") return prepare_verify(c);
  throw SchemaError("unknown scenario '" + c.scenario + "'");
}

RunOutput schema_failure(const std::string& what) {
  RunOutput out;
  out.exit_code = kSchemaViolation;
  out.message = "schema violation: " + what;
  return out;
}

}  // namespace

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw SchemaError("config must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (key != "scenario" && key != "space" && key != "scheme" && key != "inputs" && key != "seed")
      throw SchemaError("unknown top-level field '" + key + "'");
  RunConfig c;
  if (!j.contains("scenario") || !j["scenario"].is_string()) throw SchemaError("missing string field 'scenario'");
  c.scenario = j["scenario"].get<std::string>();
  if (std::find(std::begin(kScenarios), std::end(kScenarios), c.scenario) == std::end(kScenarios))
    throw SchemaError("unknown scenario '" + c.scenario + "'");
  if (!j.contains("space")) throw SchemaError("missing field 'space'");
  if (!j.contains("scheme")) throw SchemaError("missing field 'scheme'");
  c.space = io::parse_space(j["space"]);
  c.scheme = io::parse_scheme(j["scheme"]);
  c.inputs = j.value("inputs", json::object());
  if (!c.inputs.is_object()) throw SchemaError("'inputs' must be an object");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw SchemaError("'seed' must be a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  c.basis = c.inputs.contains("basis") ? io::parse_basis(c.inputs["basis"])
                                       : io::parse_basis(json::array({"1", "sqrt2"}));
  return c;
}

RunOutput run(const RunConfig& config) {
  Scenario scenario;
  try {
    scenario = prepare(config);
  } catch (const SchemaError& e) {
    return schema_failure(e.what());
  } catch (const InvalidArgument& e) {
    return schema_failure(e.what());
  } catch (const json::exception& e) {
    return schema_failure(e.what());
  }

  Context ctx(config);
  RunOutput out;
  try {
    scenario(ctx);
  } catch (const SchemaError& e) {
    return schema_failure(e.what());
  } catch (const InvalidArgument& e) {
    return schema_failure(e.what());
  } catch (const json::exception& e) {
    return schema_failure(e.what());
  } catch (const StageFailure& e) {
    out.exit_code = kStageFailure;
    out.message = std::string("stage failure: ") + e.what();
  }

  json certs = json::array();
  for (const auto& c : ctx.certs) {
    certs.push_back(json{{"name", c.name}, {"passed", c.passed}, {"measured", c.measured}, {"bound", c.bound}});
    if (!c.passed && out.exit_code == kOk) {
      out.exit_code = kCertificateFailure;
      out.message = "certificate failure: " + c.name + " (measured " + io::format_double(c.measured) +
                    ", bound " + io::format_double(c.bound) + ")";
    }
  }
  out.report = json{{"scenario", config.scenario},
                    {"seed", config.seed},
                    {"space", io::space_to_json(config.space)},
                    {"scheme", io::scheme_to_json(config.scheme)},
                    {"exit_code", out.exit_code},
                    {"message", out.message},
                    {"certificates", certs},
                    {"results", ctx.results}};
  out.files.push_back({"report.json", out.report.dump(2) + "\n"});
  for (auto& f : ctx.files) out.files.push_back(std::move(f));
  return out;
}

RunOutput run_json(const std::string& text, std::optional<std::uint64_t> seed_override) {
  RunConfig cfg;
  try {
    cfg = parse_config(json::parse(text));
  } catch (const SchemaError& e) {
    return schema_failure(e.what());
  } catch (const InvalidArgument& e) {
    return schema_failure(e.what());
  } catch (const json::exception& e) {
    return schema_failure(e.what());
  }
  if (seed_override) cfg.seed = *seed_override;
  return run(cfg);
}

void write_outputs(const RunOutput& out, const std::filesystem::path& dir) {
  if (out.files.empty()) return;
  std::filesystem::create_directories(dir);
  for (const auto& f : out.files) {
    std::ofstream os(dir / f.name, std::ios::binary | std::ios::trunc);
    os.write(f.contents.data(), static_cast<std::streamsize>(f.contents.size()));
    if (!os) throw std::runtime_error("cannot write " + (dir / f.name).string());
  }
}

}  // namespace ap::cli
