#pragma once

// JSON documents: matrices, instances, reports, traces and hunt results.
//
// Matrix: {"rows": n, "cols": m, "field": "real"|"complex", "data": [...]}
// with data row-major; real entries are numbers, complex entries [re, im].
// Instance: {"A": matrix, "B": matrix} or {"X": ..., "Y": ...}, optional
// "q", "k" and free-form "meta".

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>

#include "json.hpp"

#include "agmcs/hunt.hpp"
#include "agmcs/pipeline.hpp"
#include "agmcs/version.hpp"

namespace agmcs {

using json = nlohmann::ordered_json;
using AnyMatrix = std::variant<RealMatrix, ComplexMatrix>;

// ---- matrices -------------------------------------------------------------

template <Scalar T>
json matrix_to_json(const Matrix<T>& m) {
  json data = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if constexpr (std::same_as<T, double>)
        data.push_back(m(i, j));
      else
        data.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"field", to_string(field_of<T>())}, {"data", std::move(data)}};
}

inline json matrix_to_json(const AnyMatrix& m) {
  return std::visit([](const auto& x) { return matrix_to_json(x); }, m);
}

namespace detail {

inline const json& require_key(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(where + ": missing \"" + key + "\"");
  return j.at(key);
}

inline double require_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where + ": expected a number");
  return j.get<double>();
}

inline std::size_t require_size(const json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw ParseError(where + ": expected a non-negative integer");
  return j.get<std::size_t>();
}

}  // namespace detail

inline AnyMatrix matrix_from_json(const json& j, const std::string& where = "matrix") {
  const std::size_t rows = detail::require_size(detail::require_key(j, "rows", where), where + ".rows");
  const std::size_t cols = detail::require_size(detail::require_key(j, "cols", where), where + ".cols");
  const auto& field = detail::require_key(j, "field", where);
  const auto& data = detail::require_key(j, "data", where);
  if (rows == 0 || cols == 0) throw ParseError(where + ": empty matrix");
  if (!field.is_string()) throw ParseError(where + ".field: expected \"real\" or \"complex\"");
  if (!data.is_array() || data.size() != rows * cols) {
    throw ParseError(where + ".data: expected " + std::to_string(rows * cols) + " entries (row-major)");
  }
  const auto f = field.get<std::string>();
  try {
    if (f == "real") {
      std::vector<double> v;
      v.reserve(data.size());
      for (std::size_t i = 0; i < data.size(); ++i)
        v.push_back(detail::require_number(data[i], where + ".data[" + std::to_string(i) + "]"));
      return RealMatrix(rows, cols, std::move(v));
    }
    if (f == "complex") {
      std::vector<cplx> v;
      v.reserve(data.size());
      for (std::size_t i = 0; i < data.size(); ++i) {
        const std::string at = where + ".data[" + std::to_string(i) + "]";
        const auto& e = data[i];
        if (!e.is_array() || e.size() != 2) throw ParseError(at + ": expected [re, im]");
        v.emplace_back(detail::require_number(e[0], at), detail::require_number(e[1], at));
      }
      return ComplexMatrix(rows, cols, std::move(v));
    }
  } catch (const InvalidArgument& e) {
    throw ParseError(where + ": " + e.what());
  }
  throw ParseError(where + ".field: expected \"real\" or \"complex\", got \"" + f + "\"");
}

inline ComplexMatrix as_complex(const AnyMatrix& m) {
  if (const auto* r = std::get_if<RealMatrix>(&m)) return to_complex(*r);
  return std::get<ComplexMatrix>(m);
}

// ---- instances ------------------------------------------------------------

struct Instance {
  StoredPair pair;       // both matrices in one field (real only if both are real)
  bool factors = false;  // read from "X"/"Y" rather than "A"/"B"
  std::optional<double> q;
  std::optional<std::size_t> k;
  json meta = json::object();

  FieldKind field() const {
    return std::holds_alternative<std::pair<RealMatrix, RealMatrix>>(pair) ? FieldKind::real : FieldKind::complex;
  }
  std::size_t dim() const {
    return std::visit([](const auto& p) { return p.first.rows(); }, pair);
  }
};

template <Scalar T>
json pair_to_json(const std::pair<Matrix<T>, Matrix<T>>& p, bool factors) {
  json j;
  j[factors ? "X" : "A"] = matrix_to_json(p.first);
  j[factors ? "Y" : "B"] = matrix_to_json(p.second);
  return j;
}

inline json instance_to_json(const Instance& inst) {
  json j = std::visit([&](const auto& p) { return pair_to_json(p, inst.factors); }, inst.pair);
  if (inst.q) j["q"] = *inst.q;
  if (inst.k) j["k"] = *inst.k;
  if (!inst.meta.empty()) j["meta"] = inst.meta;
  return j;
}

inline Instance instance_from_json(const json& j, const std::string& where = "instance") {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  Instance inst;
  const char* k1 = "A";
  const char* k2 = "B";
  if (!j.contains("A") && j.contains("X")) {
    inst.factors = true;
    k1 = "X";
    k2 = "Y";
  }
  auto m1 = matrix_from_json(detail::require_key(j, k1, where), where + "." + k1);
  auto m2 = matrix_from_json(detail::require_key(j, k2, where), where + "." + k2);
  if (std::holds_alternative<RealMatrix>(m1) && std::holds_alternative<RealMatrix>(m2)) {
    inst.pair = std::pair{std::get<RealMatrix>(std::move(m1)), std::get<RealMatrix>(std::move(m2))};
  } else {
    inst.pair = std::pair{as_complex(m1), as_complex(m2)};
  }
  std::visit(
      [&](const auto& p) {
        if (!p.first.square() || p.first.rows() != p.second.rows() || p.first.cols() != p.second.cols()) {
          throw ParseError(where + ": " + k1 + " and " + k2 + " must be square and of equal size, got " +
                           p.first.shape_string() + " and " + p.second.shape_string());
        }
      },
      inst.pair);
  if (j.contains("q")) inst.q = detail::require_number(j.at("q"), where + ".q");
  if (j.contains("k")) inst.k = detail::require_size(j.at("k"), where + ".k");
  if (j.contains("meta")) inst.meta = j.at("meta");
  return inst;
}

inline json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline Instance load_instance(const std::string& path) {
  return instance_from_json(parse_json_file(path), path);
}

// Pretty-printed with a trailing newline; identical inputs give identical bytes.
inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(path + ": cannot open for writing");
  out << j.dump(2) << '\n';
  if (!out) throw Error(path + ": write failed");
}

// ---- reports --------------------------------------------------------------

inline json digest_to_json(const InstanceDigest& d) {
  json j;
  j["n"] = d.n;
  if (d.field) j["field"] = to_string(*d.field);
  if (d.q) j["q"] = *d.q;
  if (d.k) j["k"] = *d.k;
  if (d.r) j["r"] = *d.r;
  if (d.p) j["p"] = *d.p;
  if (d.phi) j["phi"] = *d.phi;
  if (d.seed) j["seed"] = *d.seed;
  if (d.index) j["index"] = *d.index;
  return j;
}

inline InstanceDigest digest_from_json(const json& j) {
  InstanceDigest d;
  d.n = j.value("n", std::size_t{0});
  if (j.contains("field")) d.field = j.at("field") == "real" ? FieldKind::real : FieldKind::complex;
  if (j.contains("q")) d.q = j.at("q").get<double>();
  if (j.contains("k")) d.k = j.at("k").get<std::size_t>();
  if (j.contains("r")) d.r = j.at("r").get<double>();
  if (j.contains("p")) d.p = j.at("p").get<double>();
  if (j.contains("phi")) d.phi = j.at("phi").get<std::string>();
  if (j.contains("seed")) d.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("index")) d.index = j.at("index").get<std::uint64_t>();
  return d;
}

inline json report_to_json(const CheckReport& r) {
  return json{{"name", r.name}, {"lhs", r.lhs},   {"rhs", r.rhs},
              {"margin", r.margin}, {"tol", r.tol}, {"holds", r.holds},
              {"instance", digest_to_json(r.instance)}};
}

inline CheckReport report_from_json(const json& j) {
  CheckReport r;
  r.name = j.at("name").get<std::string>();
  r.lhs = j.at("lhs").get<double>();
  r.rhs = j.at("rhs").get<double>();
  r.margin = j.at("margin").get<double>();
  r.tol = j.at("tol").get<double>();
  r.holds = j.at("holds").get<bool>();
  if (j.contains("instance")) r.instance = digest_from_json(j.at("instance"));
  return r;
}

// ---- pipeline traces ------------------------------------------------------

inline json step_to_json(const StepRecord& s) {
  json res = json::array();
  for (const auto& r : s.residuals)
    res.push_back(json{{"name", r.name}, {"value", r.value}, {"gate", r.gate}, {"pass", r.pass()}});
  return json{{"name", s.name}, {"residuals", std::move(res)}, {"pass", s.pass()}};
}

template <Scalar T>
json trace_to_json(const PipelineTrace<T>& tr) {
  json j;
  j["n"] = tr.n;
  j["field"] = to_string(field_of<T>());
  j["q"] = tr.q;
  j["k"] = tr.k;
  j["scale"] = tr.scale;
  j["s"] = tr.s;
  j["lambda_k_c"] = tr.lambda_k_c;
  j["lambda_k_c_prime"] = tr.lambda_k_c_prime;
  j["final_bound"] = tr.final_bound;
  j["cond_a11"] = tr.cond_a11;
  j["degenerate"] = tr.degenerate;
  j["all_gates_pass"] = tr.all_gates_pass();
  if (tr.aborted) j["aborted"] = *tr.aborted;
  json steps = json::array();
  for (const auto& s : tr.steps) steps.push_back(step_to_json(s));
  j["steps"] = std::move(steps);

  json m = json::object();
  auto put = [&m](const char* name, const auto& opt) {
    if (!opt) return;
    if constexpr (requires { opt->matrix(); })
      m[name] = matrix_to_json(opt->matrix());
    else
      m[name] = matrix_to_json(*opt);
  };
  put("P", tr.p);
  put("B_prime", tr.b_prime);
  put("basis", tr.basis);
  put("A11", tr.a11);
  put("A12", tr.a12);
  put("A22", tr.a22);
  put("B11", tr.b11);
  put("A_prime", tr.a_prime);
  put("G", tr.g);
  put("H", tr.h);
  put("K", tr.k_mat);
  put("Z", tr.z);
  put("X", tr.x);
  put("Y", tr.y);
  j["matrices"] = std::move(m);
  return j;
}

inline json trivially_true_to_json(const TriviallyTrue& t) {
  return json{{"trivially_true", true}, {"k", t.k}, {"lambda_k", t.lambda_k}};
}

// ---- hunts ----------------------------------------------------------------

inline json hunt_config_to_json(const HuntConfig& c) {
  json j;
  j["target"] = to_string(c.target);
  j["dims"] = c.dims;
  j["field"] = to_string(c.field);
  j["q_grid"] = c.q_grid;
  if (c.fixed_k) j["k"] = *c.fixed_k;
  if (c.target == Target::theorem1) j["norms"] = c.norms.empty() ? std::vector<std::string>{"grid"} : c.norms.to_strings();
  if (uses_r(c.target)) j["r_values"] = c.r_values;
  j["restarts"] = c.restarts;
  j["steps_per_restart"] = c.steps_per_restart;
  j["step_scale"] = c.step_scale;
  j["seed"] = c.seed;
  j["violation_threshold"] = c.violation_threshold;
  j["budget"] = c.budget();
  return j;
}

// A violation document is also a valid instance file (A, B or X, Y, q, k).
inline json violation_to_json(const Violation& v) {
  const bool factors = !needs_psd_pair(v.target);
  json j = std::visit([&](const auto& p) { return pair_to_json(p, factors); }, v.instance);
  const auto& d = v.report.instance;
  if (d.q) j["q"] = *d.q;
  if (d.k) j["k"] = *d.k;
  j["target"] = to_string(v.target);
  j["field"] = std::holds_alternative<std::pair<RealMatrix, RealMatrix>>(v.instance) ? "real" : "complex";
  j["margin"] = v.report.margin;
  j["report"] = report_to_json(v.report);
  j["seed"] = v.seed;
  j["restart"] = v.restart;
  j["step"] = v.step;
  j["evaluations"] = v.evaluations;
  return j;
}

inline Violation violation_from_json(const json& j, const std::string& where = "violation") {
  const auto inst = instance_from_json(j, where);
  Violation v{parse_target(detail::require_key(j, "target", where).get<std::string>()), inst.pair,
              report_from_json(detail::require_key(j, "report", where))};
  v.seed = j.value("seed", std::uint64_t{0});
  v.restart = j.value("restart", std::size_t{0});
  v.step = j.value("step", std::size_t{0});
  v.evaluations = j.value("evaluations", std::size_t{0});
  return v;
}

inline json not_found_to_json(const NotFound& nf) {
  return json{{"found", false},
              {"min_margin", nf.min_margin},
              {"evaluations", nf.evaluations},
              {"candidates", nf.candidates},
              {"argmin", report_to_json(nf.argmin)},
              {"argmin_step", nf.argmin_step}};
}

inline json stress_summary_to_json(const StressSummary& s) {
  json cells = json::array();
  for (const auto& c : s.cells)
    cells.push_back(json{{"n", c.n},
                         {"q", c.q},
                         {"k", c.k},
                         {"count", c.count},
                         {"min_margin", c.min_margin},
                         {"median_margin", c.median_margin}});
  return json{{"samples", s.samples},
              {"reports", s.reports},
              {"min_margin", s.min_margin},
              {"argmin", report_to_json(s.argmin)},
              {"cells", std::move(cells)}};
}

// Header embedded in every artifact.
inline json provenance(const json& config, std::uint64_t seed) {
  return json{{"tool", "agmcs"}, {"version", kVersion}, {"seed", seed}, {"config", config}};
}

}  // namespace agmcs
