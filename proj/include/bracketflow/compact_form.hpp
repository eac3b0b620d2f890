#pragma once

// For a realified complex simple algebra: the compact part k of a Cartan
// split is a real form, i.e. J(k) = p and J(p) = k.

#include "bracketflow/cartan.hpp"
#include "bracketflow/realify.hpp"

#include <string>

namespace bracketflow {

struct CompactFormReport {
  double jk_in_p = 0.0;  // max distance of J(k_i) from p
  double jp_in_k = 0.0;
  int dim_k = 0;
  int dim_p = 0;
  bool passed = false;
  std::string failure;
};

inline CompactFormReport check_compact_form(const LieAlgebra& alg, const JOperator& j, const CartanSplit& s,
                                            double tol = 1e-6) {
  if (j.matrix.rows() != alg.dim() || j.matrix.cols() != alg.dim())
    throw PreconditionError("J does not act on this algebra");
  CompactFormReport r;
  r.dim_k = s.k.dim();
  r.dim_p = s.p.dim();
  for (int i = 0; i < s.k.dim(); ++i) r.jk_in_p = std::max(r.jk_in_p, s.p.residual(j.matrix * s.k.basis().col(i)));
  for (int i = 0; i < s.p.dim(); ++i) r.jp_in_k = std::max(r.jp_in_k, s.k.residual(j.matrix * s.p.basis().col(i)));
  const int half = alg.dim() / 2;
  if (r.dim_k != half || r.dim_p != half)
    r.failure = "dim k = " + std::to_string(r.dim_k) + ", dim p = " + std::to_string(r.dim_p) + ", expected " +
                std::to_string(half) + " each";
  else if (r.jk_in_p > tol)
    r.failure = "J(k) is not contained in p (residual " + std::to_string(r.jk_in_p) + ")";
  else if (r.jp_in_k > tol)
    r.failure = "J(p) is not contained in k (residual " + std::to_string(r.jp_in_k) + ")";
  r.passed = r.failure.empty();
  return r;
}

// Uses the complex structure carried by a realified algebra.
inline CompactFormReport check_compact_form(const LieAlgebra& alg, const CartanSplit& s, double tol = 1e-6) {
  if (!alg.complex_structure()) throw PreconditionError("check_compact_form needs a realified complex algebra");
  return check_compact_form(alg, JOperator{*alg.complex_structure()}, s, tol);
}

}  // namespace bracketflow
