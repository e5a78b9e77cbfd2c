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

#include "ap/io.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <system_error>

namespace ap::io {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const json& field(const json& j, const char* key) {
  if (!j.is_object()) throw SchemaError(std::string("expected an object holding '") + key + "'");
  const auto it = j.find(key);
  if (it == j.end()) throw SchemaError(std::string("missing field '") + key + "'");
  return *it;
}

double number(const json& j, const char* what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_real(j.get<std::string>());
  throw SchemaError(std::string(what) + ": expected a number");
}

double number_or(const json& j, const char* key, double fallback) {
  const auto it = j.find(key);
  return it == j.end() ? fallback : number(*it, key);
}

std::size_t count(const json& j, const char* what) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0)
    throw SchemaError(std::string(what) + ": expected a non-negative integer");
  return j.get<std::size_t>();
}

IntVec int_vec(const json& j, const char* what) {
  if (!j.is_array()) throw SchemaError(std::string(what) + ": expected an integer array");
  IntVec v;
  for (const auto& x : j) {
    if (!x.is_number_integer()) throw SchemaError(std::string(what) + ": expected integers");
    v.push_back(x.get<std::int64_t>());
  }
  return v;
}

std::vector<double> real_vec(const json& j, const char* what) {
  if (!j.is_array()) throw SchemaError(std::string(what) + ": expected an array");
  std::vector<double> v;
  for (const auto& x : j) v.push_back(number(x, what));
  return v;
}

json reals(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

// Coefficient entries: a real or [re, im].
std::complex<double> coefficient(const json& j) {
  if (j.is_array()) {
    if (j.size() != 2) throw SchemaError("coefficient: expected [re, im]");
    return {number(j[0], "coefficient"), number(j[1], "coefficient")};
  }
  return {number(j, "coefficient"), 0.0};
}

json relation_json(Relation r) { return r == Relation::le ? "le" : "lt"; }

}  // namespace

double parse_real(const std::string& s) {
  if (s == "pi") return std::numbers::pi;
  if (s.size() > 2 && s.ends_with("pi")) return parse_real(s.substr(0, s.size() - 2)) * std::numbers::pi;
  if (s == "e") return std::numbers::e;
  std::string arg;
  if (s.rfind("sqrt(", 0) == 0 && s.size() > 6 && s.back() == ')') arg = s.substr(5, s.size() - 6);
  else if (s.rfind("sqrt", 0) == 0) arg = s.substr(4);
  const std::string& lit = arg.empty() ? s : arg;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(lit.data(), lit.data() + lit.size(), v);
  if (ec != std::errc() || ptr != lit.data() + lit.size() || lit.empty())
    throw SchemaError("cannot read '" + s + "' as a real number");
  if (!arg.empty()) {
    if (v < 0.0) throw SchemaError("sqrt of a negative number in '" + s + "'");
    v = std::sqrt(v);
  }
  return v;
}

BasisPtr parse_basis(const json& j) {
  const json& elems = j.is_object() ? field(j, "elements") : j;
  auto r = real_vec(elems, "basis");
  if (r.empty()) throw SchemaError("basis: at least one element is required");
  bool independent = true;
  if (j.is_object() && j.contains("independent")) independent = j["independent"].get<bool>();
  try {
    return std::make_shared<const FrequencyBasis>(std::move(r), independent);
  } catch (const InvalidArgument& e) {
    throw SchemaError(e.what());
  }
}

json basis_to_json(const FrequencyBasis& b) {
  std::vector<double> el;
  for (std::size_t i = 0; i < b.size(); ++i) el.push_back(b.element(i));
  return json{{"elements", reals(el)}, {"independent", b.independent()}};
}

MetricSpaceCfg parse_space(const json& j) {
  const std::size_t dim = count(field(j, "dim"), "space.dim");
  const MetricKind kind = [&] {
    try {
      return parse_metric_kind(field(j, "metric").get<std::string>());
    } catch (const InvalidArgument& e) {
      throw SchemaError(e.what());
    } catch (const json::exception&) {
      throw SchemaError("space.metric: expected a string");
    }
  }();
  Point base = j.contains("base_point") ? parse_point(j["base_point"]) : Point(dim, 0.0);
  const std::size_t block = j.contains("block") ? count(j["block"], "space.block") : 0;
  try {
    return MetricSpaceCfg(dim, kind, std::move(base), block);
  } catch (const InvalidArgument& e) {
    throw SchemaError(e.what());
  }
}

json space_to_json(const MetricSpaceCfg& s) {
  json j{{"dim", s.dim}, {"metric", std::string(to_string(s.metric))}, {"base_point", point_to_json(s.base_point)}};
  if (s.metric == MetricKind::block_max) j["block"] = s.block;
  return j;
}

AveragingScheme parse_scheme(const json& j) {
  AveragingScheme s;
  s.b_list = real_vec(field(j, "b_list"), "scheme.b_list");
  s.step = number(field(j, "step"), "scheme.step");
  s.window = count(field(j, "window"), "scheme.window");
  if (j.contains("sum_order")) s.sum_order = j["sum_order"].get<std::string>();
  try {
    s.validate();
  } catch (const InvalidArgument& e) {
    throw SchemaError(e.what());
  }
  return s;
}

json scheme_to_json(const AveragingScheme& s) {
  return json{{"b_list", reals(s.b_list)}, {"step", s.step}, {"window", s.window}, {"sum_order", s.sum_order}};
}

Point parse_point(const json& j) {
  if (j.is_number() || j.is_string()) return Point{number(j, "point")};
  const auto v = real_vec(j, "point");
  return Point(v.begin(), v.end());
}

json point_to_json(const Point& p) {
  json a = json::array();
  for (double x : p) a.push_back(x);
  return a;
}

FuncExpr parse_function(const json& j, const BasisPtr& basis) {
  try {
    const std::string type = field(j, "type").get<std::string>();
    auto inner = [&](const char* key) { return parse_function(field(j, key), basis); };
    if (type == "trig") {
      const std::size_t dim = count(field(j, "dim"), "trig.dim");
      std::vector<std::pair<CPoint, IntVec>> terms;
      for (const auto& t : field(j, "terms")) {
        const json& c = field(t, "coef");
        CPoint coef;
        if (c.is_array() && !c.empty() && (c[0].is_array() || dim > 1)) {
          for (const auto& x : c) coef.push_back(coefficient(x));
        } else {
          coef.push_back(coefficient(c));
        }
        if (coef.size() != dim) throw SchemaError("trig: coefficient has the wrong dimension");
        terms.emplace_back(std::move(coef), int_vec(field(t, "freq"), "trig.freq"));
      }
      return trig_poly(basis, dim, std::move(terms), j.value("complex", false));
    }
    if (type == "const") return constant(basis, parse_point(field(j, "value")));
    if (type == "sin" || type == "cos") {
      const IntVec k = int_vec(field(j, "freq"), "freq");
      const double amp = number_or(j, "amplitude", 1.0), ph = number_or(j, "phase", 0.0);
      return type == "sin" ? sine(basis, k, amp, ph) : cosine(basis, k, amp, ph);
    }
    if (type == "vector") {
      std::vector<FuncExpr> parts;
      for (const auto& c : field(j, "components")) parts.push_back(parse_function(c, basis));
      return trig_vector(parts);
    }
    if (type == "shift") return shift(inner("inner"), number(field(j, "tau"), "tau"));
    if (type == "truncate") return truncate(inner("inner"), number(field(j, "a"), "a"));
    if (type == "sgn") return sgn_op(inner("inner"));
    if (type == "neg") return negate(inner("inner"));
    if (type == "add_const") return add_constant(inner("inner"), number(field(j, "c"), "c"));
    if (type == "sum") {
      const json& args = field(j, "args");
      if (!args.is_array() || args.empty()) throw SchemaError("sum: args must be a non-empty array");
      FuncExpr acc = parse_function(args[0], basis);
      for (std::size_t i = 1; i < args.size(); ++i) acc = sum(acc, parse_function(args[i], basis));
      return acc;
    }
    if (type == "scalar_prod") return scalar_prod(inner("scalar"), inner("vector"));
    if (type == "perturbed")
      return perturbed_sum(inner("inner"), std::make_shared<const PerturbationSeries>(parse_series(field(j, "series"))));
    if (type == "distance_to")
      return distance_to(inner("inner"), parse_point(field(j, "point")), parse_space(field(j, "space")));
    if (type == "stack") {
      std::vector<FuncExpr> parts;
      for (const auto& c : field(j, "parts")) parts.push_back(parse_function(c, basis));
      return stack(std::move(parts));
    }
    throw SchemaError("unknown function type '" + type + "'");
  } catch (const json::exception& e) {
    throw SchemaError(std::string("function: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw SchemaError(e.what());
  }
}

json function_to_json(const FuncExpr& f) {
  return std::visit(
      overloaded{
          [&](const node::TrigPoly& p) {
            json terms = json::array();
            for (const auto& t : p.terms) {
              json coef = json::array();
              for (const auto& c : t.coef) coef.push_back(json::array({c.real(), c.imag()}));
              terms.push_back(json{{"freq", t.freq}, {"coef", coef}});
            }
            return json{{"type", "trig"}, {"dim", p.dim}, {"complex", p.complex_valued}, {"terms", terms}};
          },
          [&](const node::StepCompose& s) {
            json parts = json::array(), branches = json::array();
            for (const auto& x : s.partition) parts.push_back(set_to_json(x));
            for (const auto& b : s.branches) branches.push_back(function_to_json(b));
            return json{{"type", "step"}, {"partition", parts}, {"branches", branches}};
          },
          [&](const node::Shift& s) {
            return json{{"type", "shift"}, {"inner", function_to_json(s.inner)}, {"tau", s.tau}};
          },
          [&](const node::Truncate& s) {
            return json{{"type", "truncate"}, {"inner", function_to_json(s.inner)}, {"a", s.a}};
          },
          [&](const node::Sgn& s) { return json{{"type", "sgn"}, {"inner", function_to_json(s.inner)}}; },
          [&](const node::Sum& s) {
            return json{{"type", "sum"}, {"args", json::array({function_to_json(s.left), function_to_json(s.right)})}};
          },
          [&](const node::ScalarProd& s) {
            return json{{"type", "scalar_prod"},
                        {"scalar", function_to_json(s.scalar)},
                        {"vector", function_to_json(s.vector)}};
          },
          [&](const node::PerturbedSum& s) {
            return json{{"type", "perturbed"}, {"inner", function_to_json(s.inner)}, {"series", series_to_json(*s.series)}};
          },
          [&](const node::DistanceTo& s) {
            return json{{"type", "distance_to"},
                        {"inner", function_to_json(s.inner)},
                        {"point", point_to_json(s.point)},
                        {"space", space_to_json(s.space)}};
          },
          [&](const node::Stack& s) {
            json parts = json::array();
            for (const auto& p : s.parts) parts.push_back(function_to_json(p));
            return json{{"type", "stack"}, {"parts", parts}};
          },
      },
      f.node().v);
}

PerturbationSeries parse_series(const json& j) {
  PerturbationSeries s;
  s.b = number(field(j, "b"), "series.b");
  s.Delta = real_vec(field(j, "Delta"), "series.Delta");
  s.multiplier = real_vec(field(j, "multiplier"), "series.multiplier");
  s.delta = j.contains("delta") ? real_vec(j["delta"], "series.delta") : std::vector<double>(s.Delta.size(), 0.0);
  s.tau0 = j.contains("tau0") ? real_vec(j["tau0"], "series.tau0") : std::vector<double>(s.Delta.size(), 0.0);
  if (s.Delta.empty() || s.multiplier.size() != s.Delta.size() || s.delta.size() != s.Delta.size() ||
      s.tau0.size() != s.Delta.size())
    throw SchemaError("series: Delta, multiplier, delta and tau0 must have equal non-zero length");
  for (double m : s.multiplier)
    if (!(m >= 1.0) || std::floor(m) != m) throw SchemaError("series: multipliers must be positive integers");
  s.depth = s.Delta.size() - 1;
  for (double m : s.multiplier) s.alpha.push_back(m * 2.0 * std::numbers::pi / s.b);
  s.family_tag = j.value("family_tag", std::string());
  if (j.contains("lattice") && !j["lattice"].is_null()) s.lattice = int_vec(j["lattice"], "series.lattice");
  return s;
}

json series_to_json(const PerturbationSeries& s) {
  json j{{"b", s.b},
         {"depth", s.depth},
         {"Delta", reals(s.Delta)},
         {"multiplier", reals(s.multiplier)},
         {"alpha", reals(s.alpha)},
         {"delta", reals(s.delta)},
         {"tau0", reals(s.tau0)},
         {"family_tag", s.family_tag}};
  j["lattice"] = s.lattice ? json(*s.lattice) : json(nullptr);
  return j;
}

json set_to_json(const SetExpr& s) {
  return std::visit(overloaded{
                        [](const node::LevelSet& l) {
                          return json{{"node", "level"},
                                      {"expr", function_to_json(l.expr)},
                                      {"threshold", l.threshold},
                                      {"relation", relation_json(l.relation)}};
                        },
                        [](const node::Union& u) {
                          return json{{"node", "union"}, {"left", set_to_json(u.left)}, {"right", set_to_json(u.right)}};
                        },
                        [](const node::Intersect& u) {
                          return json{{"node", "intersect"}, {"left", set_to_json(u.left)}, {"right", set_to_json(u.right)}};
                        },
                        [](const node::Diff& u) {
                          return json{{"node", "diff"}, {"left", set_to_json(u.left)}, {"right", set_to_json(u.right)}};
                        },
                        [](const node::Complement& c) {
                          return json{{"node", "complement"}, {"inner", set_to_json(c.inner)}};
                        },
                        [](const node::FullLine&) { return json{{"node", "full"}}; },
                        [](const node::Empty&) { return json{{"node", "empty"}}; },
                    },
                    s.node().v);
}

json estimate_to_json(const AverageEstimate& e) {
  json ph = json::array();
  for (const auto& [b, a] : e.per_horizon) ph.push_back(json::array({b, a}));
  return json{{"value", e.value}, {"spread", e.spread}, {"per_horizon", ph}};
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

CsvWriter::CsvWriter(const std::vector<std::string>& header) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) text_ += ',';
    text_ += header[i];
  }
  text_ += '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) text_ += ',';
    text_ += format_double(values[i]);
  }
  text_ += '\n';
}

void CsvWriter::row(double first, const std::vector<double>& rest) {
  std::vector<double> v{first};
  v.insert(v.end(), rest.begin(), rest.end());
  row(v);
}

}  // namespace ap::io
