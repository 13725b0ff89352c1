#pragma once

// JSON and CSV encodings of instances and reports.
//
// Instance JSON:
//   {"dim": 2, "seed": 0, "recipe": "normal",
//    "bounds": {"a1":..,"a2":..,"b1":..,"b2":..,"c1":..,"c2":..,"d1":..,"d2":..},
//    "S": {"rows": [[[re, im], ...], ...]}, "T": {...},
//    optional "X", "Y", "C" (matrices), "x": [[re, im], ...], "n": 2.0}

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "normlab/catalog.hpp"
#include "normlab/derivation.hpp"
#include "normlab/instance.hpp"
#include "normlab/search.hpp"
#include "normlab/sweep.hpp"

namespace normlab::io {

using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Matrices and vectors

inline ordered_json to_json(const ComplexMatrix& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return {{"rows", std::move(rows)}};
}

inline ordered_json to_json(const ComplexVector& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

namespace detail {

inline Complex complex_from(const ordered_json& pair, const std::string& where) {
  if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
    throw InputError(where + ": expected [re, im]");
  }
  const double re = pair[0].get<double>();
  const double im = pair[1].get<double>();
  if (!std::isfinite(re) || !std::isfinite(im)) throw InputError(where + ": non-finite entry");
  return {re, im};
}

}  // namespace detail

inline ComplexMatrix matrix_from_json(const ordered_json& j, const std::string& name) {
  if (!j.is_object() || !j.contains("rows") || !j["rows"].is_array()) {
    throw InputError(name + ": expected {\"rows\": [...]}");
  }
  const auto& rows = j["rows"];
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = r ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  ComplexMatrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c) {
      throw InputError(name + ": row " + std::to_string(i) + " has the wrong length");
    }
    for (Eigen::Index k = 0; k < c; ++k) {
      m(i, k) = detail::complex_from(row[static_cast<std::size_t>(k)],
                                     name + "[" + std::to_string(i) + "][" + std::to_string(k) + "]");
    }
  }
  return m;
}

inline ComplexVector vector_from_json(const ordered_json& j, const std::string& name) {
  if (!j.is_array()) throw InputError(name + ": expected [[re, im], ...]");
  ComplexVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = detail::complex_from(j[i], name + "[" + std::to_string(i) + "]");
  }
  return v;
}

// ---------------------------------------------------------------------------
// Instances

inline ordered_json to_json(const SpectralBounds& b) {
  return {{"a1", b.a1}, {"a2", b.a2}, {"b1", b.b1}, {"b2", b.b2},
          {"c1", b.c1}, {"c2", b.c2}, {"d1", b.d1}, {"d2", b.d2}};
}

inline ordered_json to_json(const Instance& inst) {
  ordered_json j;
  j["dim"] = inst.dim;
  j["seed"] = inst.seed;
  j["recipe"] = inst.recipe;
  j["bounds"] = to_json(inst.bounds);
  j["S"] = to_json(inst.S);
  j["T"] = to_json(inst.T);
  if (inst.X) j["X"] = to_json(*inst.X);
  if (inst.Y) j["Y"] = to_json(*inst.Y);
  if (inst.C) j["C"] = to_json(*inst.C);
  if (inst.x) j["x"] = to_json(*inst.x);
  if (inst.n) j["n"] = *inst.n;
  return j;
}

inline Instance instance_from_json(const ordered_json& j) {
  if (!j.is_object()) throw InputError("instance: expected a JSON object");
  Instance inst;
  if (!j.contains("S") || !j.contains("T")) throw InputError("instance: S and T are required");
  inst.S = matrix_from_json(j["S"], "S");
  inst.T = matrix_from_json(j["T"], "T");
  if (inst.S.rows() != inst.S.cols() || inst.S.rows() != inst.T.rows() || inst.T.rows() != inst.T.cols()) {
    throw InputError("instance: S and T must be square of equal size");
  }
  inst.dim = static_cast<std::size_t>(inst.S.rows());
  if (j.contains("dim")) {
    if (!j["dim"].is_number_unsigned() || j["dim"].get<std::size_t>() != inst.dim) {
      throw InputError("instance: dim does not match S");
    }
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw InputError("instance: seed must be a non-negative integer");
    inst.seed = j["seed"].get<std::uint64_t>();
  }
  inst.recipe = j.value("recipe", std::string("generic"));
  Recipe::parse(inst.recipe);  // validates
  if (j.contains("bounds")) {
    const auto& b = j["bounds"];
    auto field = [&](const char* key) {
      if (!b.contains(key) || !b[key].is_number()) throw InputError(std::string("instance: bounds.") + key + " missing");
      return b[key].get<double>();
    };
    inst.bounds = {field("a1"), field("a2"), field("b1"), field("b2"),
                   field("c1"), field("c2"), field("d1"), field("d2")};
  } else {
    inst.bounds = bounds_from_spectra(inst.S, inst.T);
  }
  if (j.contains("X")) inst.X = matrix_from_json(j["X"], "X");
  if (j.contains("Y")) inst.Y = matrix_from_json(j["Y"], "Y");
  if (j.contains("C")) inst.C = matrix_from_json(j["C"], "C");
  if (j.contains("x")) inst.x = vector_from_json(j["x"], "x");
  if (j.contains("n")) {
    if (!j["n"].is_number()) throw InputError("instance: n must be a number");
    inst.n = j["n"].get<double>();
  }
  return inst;
}

/// Parses instance JSON text; parse errors carry the byte position.
inline Instance parse_instance(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& err) {
    throw InputError(std::string("malformed instance JSON at byte ") + std::to_string(err.byte) + ": " + err.what());
  }
  return instance_from_json(j);
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open instance file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

// ---------------------------------------------------------------------------
// Reports

inline ordered_json to_json(const Fingerprint& f) {
  return {{"seed", f.seed}, {"dim", f.dim}, {"recipe", f.recipe}, {"recipe_hash", f.recipe_hash}};
}

inline ordered_json to_json(const InequalityReport& r) {
  ordered_json j;
  j["entry"] = entry(r.entry).name;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["margin"] = r.margin;
  j["satisfied"] = r.satisfied;
  j["verdict"] = verdict_name(r.verdict);
  j["hypothesis_violations"] = r.hypothesis_violations;
  j["fingerprint"] = to_json(r.fingerprint);
  j["tol"] = r.tol;
  if (!r.per_index.empty()) {
    ordered_json detail = ordered_json::array();
    for (const auto& d : r.per_index) {
      detail.push_back({{"j", d.j}, {"lhs", d.lhs}, {"rhs", d.rhs}, {"margin", d.margin}});
    }
    j["per_index"] = std::move(detail);
  }
  if (!r.extras.empty()) {
    ordered_json extras = ordered_json::object();
    for (const auto& [k, v] : r.extras) extras[k] = v;
    j["extras"] = std::move(extras);
  }
  return j;
}

inline ordered_json to_json(const SweepReport& s, bool with_timing = false) {
  ordered_json j;
  j["entry"] = entry(s.entry).name;
  j["trials"] = s.trials;
  j["passes"] = s.passes;
  j["failures"] = s.failures;
  j["not_applicable"] = s.not_applicable;
  j["worst_margin"] = s.worst_margin ? ordered_json(*s.worst_margin) : ordered_json(nullptr);
  j["worst_rhs"] = s.worst_rhs;
  j["worst_fingerprint"] = s.worst_fingerprint ? to_json(*s.worst_fingerprint) : ordered_json(nullptr);
  ordered_json fails = ordered_json::array();
  for (const auto& f : s.failure_records) {
    fails.push_back({{"fingerprint", to_json(f.fingerprint)}, {"margin", f.margin}, {"rhs", f.rhs}});
  }
  j["failure_records"] = std::move(fails);
  if (with_timing) j["wall_seconds"] = s.wall_seconds;
  return j;
}

inline ordered_json to_json(const SearchState& s) {
  ordered_json j;
  j["entry"] = entry(s.entry).name;
  j["best_objective"] = s.best_objective.value;
  j["objective_kind"] = objective_kind_name(s.best_objective.kind);
  j["evaluations"] = s.iteration;
  j["final_step_scale"] = s.step_scale;
  j["best_fingerprint"] = to_json(s.best.fingerprint());
  j["best_instance"] = to_json(s.best);
  j["trace"] = s.trace;
  return j;
}

inline ordered_json to_json(const FPReport& r) {
  return {{"holds", r.holds},
          {"kernel_dimension", r.kernel_dimension},
          {"adjoint_residuals", r.adjoint_residuals},
          {"worst_residual", r.worst_residual},
          {"threshold", r.threshold}};
}

inline ordered_json to_json(const ReductionReport& r) {
  return {{"range_reduces", r.range_reduces},       {"restriction_normal", r.restriction_normal},
          {"range_dimension", r.range_dimension},   {"lower_residual", r.lower_residual},
          {"upper_residual", r.upper_residual},     {"normal_residual", r.normal_residual}};
}

inline ordered_json to_json(const ProbeResult& r) {
  return {{"min_found", r.min_found},
          {"c_norm", r.c_norm},
          {"verdict", r.consistent ? "consistent" : "inconsistent"},
          {"evaluations", r.evaluations}};
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr const char* kReportColumns =
    "entry,lhs,rhs,margin,satisfied,verdict,hypothesis_violations,seed,dim,recipe,recipe_hash";
inline constexpr const char* kSweepColumns =
    "entry,trials,passes,failures,not_applicable,worst_margin,worst_rhs,worst_seed,worst_dim,worst_recipe,"
    "worst_recipe_hash";

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace detail

inline std::string to_csv_row(const InequalityReport& r) {
  std::string violations;
  for (std::size_t k = 0; k < r.hypothesis_violations.size(); ++k) {
    if (k) violations += "; ";
    violations += r.hypothesis_violations[k];
  }
  std::ostringstream os;
  os << entry(r.entry).name << ',' << detail::num(r.lhs) << ',' << detail::num(r.rhs) << ','
     << detail::num(r.margin) << ',' << (r.satisfied ? "true" : "false") << ',' << verdict_name(r.verdict) << ','
     << detail::quoted(violations) << ',' << r.fingerprint.seed << ',' << r.fingerprint.dim << ','
     << detail::quoted(r.fingerprint.recipe) << ',' << r.fingerprint.recipe_hash;
  return os.str();
}

inline std::string to_csv_row(const SweepReport& s) {
  std::ostringstream os;
  os << entry(s.entry).name << ',' << s.trials << ',' << s.passes << ',' << s.failures << ',' << s.not_applicable
     << ',' << (s.worst_margin ? detail::num(*s.worst_margin) : "") << ',' << detail::num(s.worst_rhs) << ',';
  if (s.worst_fingerprint) {
    os << s.worst_fingerprint->seed << ',' << s.worst_fingerprint->dim << ','
       << detail::quoted(s.worst_fingerprint->recipe) << ',' << s.worst_fingerprint->recipe_hash;
  } else {
    os << ",,,";
  }
  return os.str();
}

}  // namespace normlab::io
