#pragma once

// Built-in algebras with documented bases.
//
//   abelian2     R², no brackets
//   solvable2    (x, y), [x,y] = y
//   heisenberg   (x, y, z), [x,y] = z
//   sl2R         (h, e, f), [h,e] = 2e, [h,f] = −2f, [e,f] = h
//   su2          (e1, e2, e3), [e_i,e_j] = ε_ijk e_k
//   so3          (a12, a13, a23) with a_ij = E_ij − E_ji
//   sl3R         (e12, e13, e21, e23, e31, e32, h1, h2), h1 = E11 − E22, h2 = E22 − E33
//   su3          (x1..x8), x_a = −iλ_a/2 for the Gell-Mann matrices, [x_a,x_b] = f_abc x_c
//   sl2R+sl2R    two commuting copies of sl2R
//   sl2C         complex; basis (h, e, f) as for sl2R (realify before use)
//   sl3C         complex; basis as for sl3R

#include "bracketflow/algebra.hpp"
#include "bracketflow/errors.hpp"
#include "bracketflow/realify.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace bracketflow {

namespace detail {

inline Matrix unit(int n, int i, int j) {
  Matrix m = Matrix::Zero(n, n);
  m(i, j) = 1.0;
  return m;
}

// Structure constants of the span of `basis` under the commutator. Integer
// coefficients are snapped so that round trips stay exact.
inline std::vector<double> constants_from_matrices(const std::vector<Matrix>& basis) {
  const int d = static_cast<int>(basis.size());
  const auto rows = basis.front().size();
  Matrix coords(rows, d);
  for (int i = 0; i < d; ++i) coords.col(i) = basis[i].reshaped();
  const Eigen::ColPivHouseholderQR<Matrix> qr(coords);
  const auto n = static_cast<std::size_t>(d);
  std::vector<double> c(n * n * n, 0.0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const Matrix comm = basis[i] * basis[j] - basis[j] * basis[i];
      const Vector x = qr.solve(Vector(comm.reshaped()));
      if ((coords * x - comm.reshaped()).norm() > 1e-10) throw StructuralError("matrix basis is not closed under brackets");
      for (int k = 0; k < d; ++k) {
        double v = x(k);
        if (std::abs(v - std::round(v)) < 1e-12) v = std::round(v);
        c[(k * n + i) * n + j] = v;
      }
    }
  return c;
}

class TensorBuilder {
 public:
  explicit TensorBuilder(int n) : n_(static_cast<std::size_t>(n)), c_(n_ * n_ * n_, 0.0) {}
  // [e_i, e_j] += v·e_k, mirrored.
  TensorBuilder& set(int i, int j, int k, double v) {
    c_[(k * n_ + i) * n_ + j] = v;
    c_[(k * n_ + j) * n_ + i] = -v;
    return *this;
  }
  std::vector<double> take() { return std::move(c_); }

 private:
  std::size_t n_;
  std::vector<double> c_;
};

inline std::vector<Matrix> sl3_basis() {
  return {unit(3, 0, 1), unit(3, 0, 2), unit(3, 1, 0), unit(3, 1, 2), unit(3, 2, 0), unit(3, 2, 1),
          unit(3, 0, 0) - unit(3, 1, 1), unit(3, 1, 1) - unit(3, 2, 2)};
}

inline std::vector<std::string> sl3_labels() { return {"e12", "e13", "e21", "e23", "e31", "e32", "h1", "h2"}; }

}  // namespace detail

inline std::vector<std::string> corpus_names() {
  return {"abelian2", "solvable2", "heisenberg", "sl2R", "su2", "so3", "sl2C", "sl3R", "su3", "sl2R+sl2R", "sl3C"};
}

inline bool corpus_is_complex(const std::string& name) { return name == "sl2C" || name == "sl3C"; }

inline ComplexLieAlgebra complex_corpus(const std::string& name) {
  if (name == "sl2C") {
    auto re = detail::TensorBuilder(3).set(0, 1, 1, 2.0).set(0, 2, 2, -2.0).set(1, 2, 0, 1.0).take();
    return ComplexLieAlgebra(3, re, std::vector<double>(re.size(), 0.0), {"h", "e", "f"});
  }
  if (name == "sl3C") {
    auto re = detail::constants_from_matrices(detail::sl3_basis());
    return ComplexLieAlgebra(8, re, std::vector<double>(re.size(), 0.0), detail::sl3_labels());
  }
  throw StructuralError("unknown complex corpus algebra '" + name + "'");
}

inline LieAlgebra corpus(const std::string& name) {
  using detail::TensorBuilder;
  using detail::unit;
  if (name == "abelian2") return LieAlgebra(2, std::vector<double>(8, 0.0), {"x", "y"});
  if (name == "solvable2") return LieAlgebra(2, TensorBuilder(2).set(0, 1, 1, 1.0).take(), {"x", "y"});
  if (name == "heisenberg") return LieAlgebra(3, TensorBuilder(3).set(0, 1, 2, 1.0).take(), {"x", "y", "z"});
  if (name == "sl2R")
    return LieAlgebra(3, TensorBuilder(3).set(0, 1, 1, 2.0).set(0, 2, 2, -2.0).set(1, 2, 0, 1.0).take(), {"h", "e", "f"});
  if (name == "su2")
    return LieAlgebra(3, TensorBuilder(3).set(0, 1, 2, 1.0).set(1, 2, 0, 1.0).set(2, 0, 1, 1.0).take(), {"e1", "e2", "e3"});
  if (name == "so3")
    return LieAlgebra(3,
                      detail::constants_from_matrices(
                          {unit(3, 0, 1) - unit(3, 1, 0), unit(3, 0, 2) - unit(3, 2, 0), unit(3, 1, 2) - unit(3, 2, 1)}),
                      {"a12", "a13", "a23"});
  if (name == "sl3R") return LieAlgebra(8, detail::constants_from_matrices(detail::sl3_basis()), detail::sl3_labels());
  if (name == "su3") {
    const double half = 0.5, r3 = std::sqrt(3.0) / 2.0;
    TensorBuilder b(8);
    // f_abc, totally antisymmetric; indices shifted to start at 0.
    const struct { int a, b, c; double f; } table[] = {
        {0, 1, 2, 1.0}, {0, 3, 6, half}, {0, 4, 5, -half}, {1, 3, 5, half}, {1, 4, 6, half},
        {2, 3, 4, half}, {2, 5, 6, -half}, {3, 4, 7, r3}, {5, 6, 7, r3}};
    for (const auto& t : table) b.set(t.a, t.b, t.c, t.f).set(t.b, t.c, t.a, t.f).set(t.c, t.a, t.b, t.f);
    return LieAlgebra(8, b.take(), {"x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8"});
  }
  if (name == "sl2R+sl2R") {
    TensorBuilder b(6);
    for (int o : {0, 3}) b.set(o, o + 1, o + 1, 2.0).set(o, o + 2, o + 2, -2.0).set(o + 1, o + 2, o, 1.0);
    return LieAlgebra(6, b.take(), {"h1", "e1", "f1", "h2", "e2", "f2"});
  }
  if (corpus_is_complex(name)) throw StructuralError("'" + name + "' is a complex algebra; realify it first (--complex)");
  throw StructuralError("unknown corpus algebra '" + name + "'");
}

}  // namespace bracketflow
