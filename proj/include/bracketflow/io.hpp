#pragma once

// JSON forms of algebras and of the pipeline's results.
//
// Algebra file:
//   { "dim": 3, "basis": ["h","e","f"],
//     "brackets": [ {"i":0, "j":1, "coeffs": {"1": 2.0}}, ... ] }
// Only i < j entries are listed; the loader mirrors them. For complex
// algebras each coefficient is a [re, im] pair.

#include "bracketflow/algebra.hpp"
#include "bracketflow/cartan.hpp"
#include "bracketflow/compact_form.hpp"
#include "bracketflow/errors.hpp"
#include "bracketflow/hspace.hpp"
#include "bracketflow/kempfness.hpp"
#include "bracketflow/realify.hpp"
#include "bracketflow/verify.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace bracketflow {

using json = nlohmann::json;

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

// Basis vectors as a list of coordinate arrays.
inline json subspace_to_json(const LinearSubspace& u) {
  json out = json::array();
  for (int c = 0; c < u.dim(); ++c) {
    json v = json::array();
    for (int i = 0; i < u.ambient_dim(); ++i) v.push_back(u.basis()(i, c));
    out.push_back(std::move(v));
  }
  return out;
}

namespace detail {

inline int read_index(const std::string& key, int dim) {
  std::size_t used = 0;
  int k = 0;
  try {
    k = std::stoi(key, &used);
  } catch (const std::exception&) {
    throw StructuralError("coefficient key '" + key + "' is not an index");
  }
  if (used != key.size() || k < 0 || k >= dim) throw StructuralError("coefficient index '" + key + "' out of range");
  return k;
}

struct RawBrackets {
  int dim = 0;
  std::vector<std::string> labels;
  std::vector<double> re, im;
};

inline RawBrackets read_brackets(const json& doc, bool complex) {
  if (!doc.is_object() || !doc.contains("dim") || !doc.contains("brackets"))
    throw StructuralError("algebra document needs 'dim' and 'brackets'");
  RawBrackets raw;
  raw.dim = doc.at("dim").get<int>();
  if (raw.dim <= 0) throw StructuralError("'dim' must be positive");
  if (doc.contains("basis")) raw.labels = doc.at("basis").get<std::vector<std::string>>();
  const auto n = static_cast<std::size_t>(raw.dim);
  raw.re.assign(n * n * n, 0.0);
  raw.im.assign(n * n * n, 0.0);
  for (const auto& entry : doc.at("brackets")) {
    const int i = entry.at("i").get<int>(), j = entry.at("j").get<int>();
    if (i < 0 || j < 0 || i >= raw.dim || j >= raw.dim) throw StructuralError("bracket index out of range");
    if (i >= j) throw StructuralError("bracket entries must have i < j");
    for (const auto& [key, value] : entry.at("coeffs").items()) {
      const auto k = static_cast<std::size_t>(read_index(key, raw.dim));
      double re = 0.0, im = 0.0;
      if (value.is_number()) {
        re = value.get<double>();
      } else if (complex && value.is_array() && value.size() == 2) {
        re = value[0].get<double>();
        im = value[1].get<double>();
      } else {
        throw StructuralError("coefficient for key '" + key + "' must be a number" + (complex ? " or [re, im]" : ""));
      }
      const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
      raw.re[(k * n + ui) * n + uj] = re;
      raw.re[(k * n + uj) * n + ui] = -re;
      raw.im[(k * n + ui) * n + uj] = im;
      raw.im[(k * n + uj) * n + ui] = -im;
    }
  }
  return raw;
}

template <class Coeff>
json brackets_to_json(int dim, const std::vector<std::string>& labels, Coeff coeff) {
  json doc;
  doc["dim"] = dim;
  if (!labels.empty()) doc["basis"] = labels;
  json list = json::array();
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      json coeffs = json::object();
      for (int k = 0; k < dim; ++k) {
        json v = coeff(k, i, j);
        if (!v.is_null()) coeffs[std::to_string(k)] = std::move(v);
      }
      if (!coeffs.empty()) list.push_back({{"i", i}, {"j", j}, {"coeffs", std::move(coeffs)}});
    }
  doc["brackets"] = std::move(list);
  return doc;
}

}  // namespace detail

inline LieAlgebra algebra_from_json(const json& doc) {
  auto raw = detail::read_brackets(doc, false);
  return LieAlgebra(raw.dim, raw.re, std::move(raw.labels));
}

inline ComplexLieAlgebra complex_algebra_from_json(const json& doc) {
  auto raw = detail::read_brackets(doc, true);
  return ComplexLieAlgebra(raw.dim, std::move(raw.re), std::move(raw.im), std::move(raw.labels));
}

inline json to_json(const LieAlgebra& alg) {
  return detail::brackets_to_json(alg.dim(), alg.labels(), [&](int k, int i, int j) -> json {
    const double v = alg.c(k, i, j);
    return v == 0.0 ? json() : json(v);
  });
}

inline json to_json(const ComplexLieAlgebra& calg) {
  json doc = detail::brackets_to_json(calg.dim(), calg.labels(), [&](int k, int i, int j) -> json {
    const double re = calg.re(k, i, j), im = calg.im(k, i, j);
    return re == 0.0 && im == 0.0 ? json() : json::array({re, im});
  });
  doc["field"] = "complex";
  return doc;
}

// Parses text, turning parser failures into StructuralError with a line
// number.
inline json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw StructuralError(origin + ":" + std::to_string(line) + ": JSON parse error: " + e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

inline json to_json(const ValidationReport& r) {
  return {{"antisymmetry_residual", r.antisymmetry_residual}, {"jacobi_residual", r.jacobi_residual},
          {"tol", r.tol}, {"passed", r.passed()}};
}

inline json to_json(const KillingSignature& s) {
  return {{"positive", s.positive}, {"negative", s.negative}, {"zero", s.zero}};
}

inline json step_to_json(const FlowStep& s) {
  return {{"t", s.t}, {"F", s.f}, {"gradnorm", s.gradnorm}, {"dist", s.dist_to_start}};
}

inline json verdict_to_json(const FlowTrace& trace) {
  json out{{"verdict", to_string(trace.verdict)}, {"steps", trace.steps.size() - 1}, {"final", step_to_json(trace.last())}};
  if (trace.minimum) out["H_star"] = matrix_to_json(trace.minimum->matrix());
  if (trace.direction) out["S_inf"] = matrix_to_json(trace.direction->transported());
  if (!trace.note.empty()) out["note"] = trace.note;
  return out;
}

inline json to_json(const WeightedFlag& f) {
  json subs = json::array();
  for (const auto& s : f.subspaces) subs.push_back(subspace_to_json(s));
  return {{"weights", f.weights}, {"multiplicities", f.multiplicities}, {"subspaces", std::move(subs)}};
}

inline json to_json(const Destabilization& d) {
  json ideals = json::array();
  for (const auto& u : d.ideals) ideals.push_back({{"dim", u.dim()}, {"basis", subspace_to_json(u)}});
  return {{"flag", to_json(d.flag)}, {"candidate_residuals", d.candidate_residuals}, {"ideals", std::move(ideals)}};
}

inline json to_json(const CartanSplit& s) {
  return {{"H_star", matrix_to_json(s.h_star.matrix())},
          {"theta", matrix_to_json(s.theta)},
          {"k", subspace_to_json(s.k)},
          {"p", subspace_to_json(s.p)},
          {"dim_k", s.k.dim()},
          {"dim_p", s.p.dim()},
          {"killing_signature", to_json(s.killing)},
          {"residuals",
           {{"gradient_norm", s.gradient_norm},
            {"ad_transpose_closure", s.ad_closure_residual},
            {"theta_solve", s.theta_solve_residual},
            {"theta_square", s.theta_square_residual},
            {"theta_symmetry", s.theta_symmetry_residual},
            {"theta_eigen_offset", s.eigen_offset}}}};
}

inline json to_json(const InclusionReport& r) {
  return {{"kk_in_k", r.kk}, {"kp_in_p", r.kp}, {"pp_in_k", r.pp}, {"worst_pair", r.worst_pair}};
}

inline json to_json(const Classification& c) {
  json out{{"class", c.compact ? "compact" : "noncompact"}, {"dim_k", c.dim_k}, {"dim_p", c.dim_p},
           {"killing_max_on_k", c.killing_max_on_k}};
  if (c.dim_p > 0) {
    out["killing_min_on_p"] = c.killing_min_on_p;
    out["killing_cross"] = c.killing_cross;
  }
  return out;
}

inline json to_json(const CompactFormReport& r) {
  json out{{"jk_in_p", r.jk_in_p}, {"jp_in_k", r.jp_in_k}, {"dim_k", r.dim_k}, {"dim_p", r.dim_p}, {"passed", r.passed}};
  if (!r.failure.empty()) out["failure"] = r.failure;
  return out;
}

inline json to_json(const PropertyStarReport& r) {
  return {{"suite", "exp-distance"},
          {"n", r.n},
          {"samples", r.samples},
          {"seed", r.seed},
          {"violations", r.violations},
          {"min_margin", r.min_margin},
          {"commuting_samples", r.commuting_samples},
          {"max_commuting_gap", r.max_commuting_gap},
          {"min_noncommuting_gap", r.min_noncommuting_gap},
          {"trace_inequality_min_margin", r.lemma7_min_margin},
          {"passed", r.passed()}};
}

}  // namespace bracketflow
