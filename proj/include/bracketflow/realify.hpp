#pragma once

// Complex Lie algebras and their underlying real algebras. Complex numbers
// are carried as (re, im) pairs so that no complex arithmetic reaches the
// rest of the pipeline.

#include "bracketflow/algebra.hpp"
#include "bracketflow/errors.hpp"
#include "bracketflow/linalg.hpp"

#include <string>
#include <utility>
#include <vector>

namespace bracketflow {

class ComplexLieAlgebra {
 public:
  // Both tensors laid out c[k][i][j], j fastest.
  ComplexLieAlgebra(int dim, std::vector<double> re, std::vector<double> im, std::vector<std::string> labels = {})
      : dim_(dim), re_(std::move(re)), im_(std::move(im)), labels_(std::move(labels)) {
    if (dim <= 0) throw StructuralError("complex Lie algebra dimension must be positive");
    const auto n = static_cast<std::size_t>(dim);
    if (re_.size() != n * n * n || im_.size() != n * n * n)
      throw StructuralError("complex structure constant tensor has the wrong size");
    if (!labels_.empty() && labels_.size() != n) throw StructuralError("basis label count does not match the dimension");
  }

  int dim() const { return dim_; }
  double re(int k, int i, int j) const { return re_[index(k, i, j)]; }
  double im(int k, int i, int j) const { return im_[index(k, i, j)]; }
  const std::vector<double>& re_constants() const { return re_; }
  const std::vector<double>& im_constants() const { return im_; }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::size_t index(int k, int i, int j) const {
    const auto n = static_cast<std::size_t>(dim_);
    return (static_cast<std::size_t>(k) * n + static_cast<std::size_t>(i)) * n + static_cast<std::size_t>(j);
  }

  int dim_;
  std::vector<double> re_, im_;
  std::vector<std::string> labels_;
};

// Multiplication by i on the realified algebra.
struct JOperator {
  Matrix matrix;
};

inline ValidationReport validate(const ComplexLieAlgebra& calg, double tol = 1e-9) {
  const int n = calg.dim();
  ValidationReport r;
  r.tol = tol;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        r.antisymmetry_residual =
            std::max(r.antisymmetry_residual, std::hypot(calg.re(k, i, j) + calg.re(k, j, i), calg.im(k, i, j) + calg.im(k, j, i)));
  // (a + ib)(c + id) accumulated per cyclic term.
  auto mul_re = [&](int m, int i, int j, int l, int k) {
    return calg.re(m, i, j) * calg.re(l, m, k) - calg.im(m, i, j) * calg.im(l, m, k);
  };
  auto mul_im = [&](int m, int i, int j, int l, int k) {
    return calg.re(m, i, j) * calg.im(l, m, k) + calg.im(m, i, j) * calg.re(l, m, k);
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double sr = 0.0, si = 0.0;
          for (int m = 0; m < n; ++m) {
            sr += mul_re(m, i, j, l, k) + mul_re(m, j, k, l, i) + mul_re(m, k, i, l, j);
            si += mul_im(m, i, j, l, k) + mul_im(m, j, k, l, i) + mul_im(m, k, i, l, j);
          }
          r.jacobi_residual = std::max(r.jacobi_residual, std::hypot(sr, si));
        }
  return r;
}

struct Realification {
  LieAlgebra algebra;
  JOperator j;
};

// Real algebra on the basis (e_1..e_n, i·e_1..i·e_n).
inline Realification realify(const ComplexLieAlgebra& calg, double tol = 1e-9) {
  const auto check = validate(calg, tol);
  if (!check.passed())
    throw StructuralError("complex algebra fails validation: antisymmetry " + std::to_string(check.antisymmetry_residual) +
                          ", Jacobi " + std::to_string(check.jacobi_residual));
  const int n = calg.dim();
  const int m = 2 * n;
  const auto mm = static_cast<std::size_t>(m);
  std::vector<double> c(mm * mm * mm, 0.0);
  auto at = [&](int k, int i, int j) -> double& {
    return c[(static_cast<std::size_t>(k) * mm + static_cast<std::size_t>(i)) * mm + static_cast<std::size_t>(j)];
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double a = calg.re(k, i, j), b = calg.im(k, i, j);
        // [e_i, e_j] = Σ (a e_k + b ie_k)
        at(k, i, j) = a;
        at(k + n, i, j) = b;
        // [e_i, ie_j] = [ie_i, e_j] = i[e_i, e_j] = Σ (−b e_k + a ie_k)
        at(k, i, j + n) = -b;
        at(k + n, i, j + n) = a;
        at(k, i + n, j) = -b;
        at(k + n, i + n, j) = a;
        // [ie_i, ie_j] = −[e_i, e_j]
        at(k, i + n, j + n) = -a;
        at(k + n, i + n, j + n) = -b;
      }
  Matrix jm = Matrix::Zero(m, m);
  for (int k = 0; k < n; ++k) {
    jm(k + n, k) = 1.0;
    jm(k, k + n) = -1.0;
  }
  std::vector<std::string> labels;
  if (!calg.labels().empty()) {
    for (const auto& l : calg.labels()) labels.push_back(l);
    for (const auto& l : calg.labels()) labels.push_back("i" + l);
  }
  return {LieAlgebra(m, c, std::move(labels), jm), JOperator{jm}};
}

// Complex Killing form Tr_C(ad_i ad_j) as (real part, imaginary part).
inline std::pair<Matrix, Matrix> complex_killing_form(const ComplexLieAlgebra& calg) {
  const int n = calg.dim();
  std::vector<Matrix> ad_re(n, Matrix::Zero(n, n)), ad_im(n, Matrix::Zero(n, n));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) {
        ad_re[i](k, j) = calg.re(k, i, j);
        ad_im[i](k, j) = calg.im(k, i, j);
      }
  Matrix kr(n, n), ki(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      kr(i, j) = (ad_re[i] * ad_re[j] - ad_im[i] * ad_im[j]).trace();
      ki(i, j) = (ad_re[i] * ad_im[j] + ad_im[i] * ad_re[j]).trace();
    }
  return {kr, ki};
}

// Largest ‖J ad_x − ad_x J‖ over basis x.
inline double complex_linearity_residual(const LieAlgebra& alg, const JOperator& j) {
  double worst = 0.0;
  for (int i = 0; i < alg.dim(); ++i)
    worst = std::max(worst, (j.matrix * alg.ad_basis(i) - alg.ad_basis(i) * j.matrix).norm());
  return worst;
}

}  // namespace bracketflow
