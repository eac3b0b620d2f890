#pragma once

// Lie algebras given by structure constants, and the structure theory that
// can be read off them directly: adjoint maps, derivations, the Killing form,
// ideals and a randomized simplicity test.

#include "bracketflow/errors.hpp"
#include "bracketflow/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace bracketflow {

// Finite-dimensional real Lie algebra. c(k, i, j) is the k-th coordinate of
// [e_i, e_j]. Realified complex algebras additionally carry the matrix of
// multiplication by i.
class LieAlgebra {
 public:
  // `constants` is laid out c[k][i][j] with j fastest.
  LieAlgebra(int dim, const std::vector<double>& constants, std::vector<std::string> labels = {},
             std::optional<Matrix> complex_structure = std::nullopt)
      : dim_(dim), labels_(std::move(labels)), complex_structure_(std::move(complex_structure)) {
    if (dim <= 0) throw StructuralError("Lie algebra dimension must be positive");
    const auto n = static_cast<std::size_t>(dim);
    if (constants.size() != n * n * n)
      throw StructuralError("structure constant tensor has " + std::to_string(constants.size()) +
                            " entries, expected " + std::to_string(n * n * n));
    if (!labels_.empty() && labels_.size() != n)
      throw StructuralError("basis label count does not match the dimension");
    if (complex_structure_ && (complex_structure_->rows() != dim || complex_structure_->cols() != dim))
      throw StructuralError("complex structure has the wrong shape");
    ad_.assign(n, Matrix::Zero(dim, dim));
    for (int k = 0; k < dim; ++k)
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) ad_[i](k, j) = constants[(k * n + i) * n + j];
  }

  // Build from the adjoint matrices of the basis vectors.
  static LieAlgebra from_ad(std::vector<Matrix> ad, std::vector<std::string> labels = {},
                            std::optional<Matrix> complex_structure = std::nullopt) {
    const int n = static_cast<int>(ad.size());
    std::vector<double> c(static_cast<std::size_t>(n) * n * n, 0.0);
    for (int i = 0; i < n; ++i) {
      if (ad[i].rows() != n || ad[i].cols() != n) throw StructuralError("adjoint matrix has the wrong shape");
      for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) c[(static_cast<std::size_t>(k) * n + i) * n + j] = ad[i](k, j);
    }
    return LieAlgebra(n, c, std::move(labels), std::move(complex_structure));
  }

  int dim() const { return dim_; }
  double c(int k, int i, int j) const { return ad_[i](k, j); }
  const Matrix& ad_basis(int i) const { return ad_[i]; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::optional<Matrix>& complex_structure() const { return complex_structure_; }
  bool is_realified() const { return complex_structure_.has_value(); }

  std::string label(int i) const {
    return labels_.empty() ? "e" + std::to_string(i) : labels_[static_cast<std::size_t>(i)];
  }

  double max_abs_constant() const {
    double m = 0.0;
    for (const auto& a : ad_) m = std::max(m, a.cwiseAbs().maxCoeff());
    return m;
  }

  std::vector<double> constants() const {
    const auto n = static_cast<std::size_t>(dim_);
    std::vector<double> out(n * n * n);
    for (int k = 0; k < dim_; ++k)
      for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) out[(k * n + i) * n + j] = ad_[i](k, j);
    return out;
  }

 private:
  int dim_;
  std::vector<Matrix> ad_;
  std::vector<std::string> labels_;
  std::optional<Matrix> complex_structure_;
};

// Subspace of R^n with an orthonormal basis stored column-wise.
class LinearSubspace {
 public:
  // Orthonormalizes the spanning set; `tol` is the relative rank cutoff.
  LinearSubspace(const Matrix& spanning, double tol = 1e-10)
      : ambient_(static_cast<int>(spanning.rows())), basis_(orthonormal_span(spanning, tol)) {}

  static LinearSubspace zero(int ambient) { return LinearSubspace(Matrix(ambient, 0)); }
  static LinearSubspace whole(int ambient) { return LinearSubspace(Matrix::Identity(ambient, ambient)); }

  int ambient_dim() const { return ambient_; }
  int dim() const { return static_cast<int>(basis_.cols()); }
  const Matrix& basis() const { return basis_; }

  double residual(const Vector& v) const { return projection_residual(basis_, v); }

 private:
  int ambient_;
  Matrix basis_;
};

struct BilinearForm {
  enum class Kind { TraceForm, Killing };
  Matrix matrix;
  Kind kind = Kind::Killing;
};

struct ValidationReport {
  double antisymmetry_residual = 0.0;
  double jacobi_residual = 0.0;
  double tol = 0.0;
  bool passed() const { return antisymmetry_residual <= tol && jacobi_residual <= tol; }
};

inline ValidationReport validate(const LieAlgebra& alg, double tol = 1e-9) {
  const int n = alg.dim();
  ValidationReport r;
  r.tol = tol;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        r.antisymmetry_residual = std::max(r.antisymmetry_residual, std::abs(alg.c(k, i, j) + alg.c(k, j, i)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int m = 0; m < n; ++m)
            s += alg.c(m, i, j) * alg.c(l, m, k) + alg.c(m, j, k) * alg.c(l, m, i) +
                 alg.c(m, k, i) * alg.c(l, m, j);
          r.jacobi_residual = std::max(r.jacobi_residual, std::abs(s));
        }
  return r;
}

inline void require_valid(const LieAlgebra& alg, double tol) {
  const auto r = validate(alg, tol);
  if (!r.passed())
    throw StructuralError("not a Lie algebra: antisymmetry residual " + std::to_string(r.antisymmetry_residual) +
                          ", Jacobi residual " + std::to_string(r.jacobi_residual));
}

inline Matrix ad_matrix(const LieAlgebra& alg, const Vector& x) {
  Matrix out = Matrix::Zero(alg.dim(), alg.dim());
  for (int i = 0; i < alg.dim(); ++i)
    if (x(i) != 0.0) out += x(i) * alg.ad_basis(i);
  return out;
}

inline Vector bracket(const LieAlgebra& alg, const Vector& x, const Vector& y) { return ad_matrix(alg, x) * y; }

// Columns are vec(ad_{e_i}); used wherever an endomorphism must be pulled
// back to an element of g.
inline Matrix ad_stack(const LieAlgebra& alg) {
  const int n = alg.dim();
  Matrix out(n * n, n);
  for (int i = 0; i < n; ++i) out.col(i) = alg.ad_basis(i).reshaped();
  return out;
}

inline LinearSubspace center(const LieAlgebra& alg, double tol = 1e-9) {
  return LinearSubspace(nullspace(ad_stack(alg), tol), tol);
}

// Frobenius-orthonormal basis of Der(g), from the null space of the n³×n²
// system δ[e_i,e_j] − [δe_i,e_j] − [e_i,δe_j] = 0.
inline std::vector<Matrix> derivations(const LieAlgebra& alg, double tol = 1e-9) {
  const int n = alg.dim();
  Matrix system = Matrix::Zero(n * n * n, n * n);
  // Unknown δ(p, q) sits at column p + n*q (column-major vec).
  auto col = [n](int p, int q) { return p + n * q; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const int row = (i * n + j) * n + l;
        for (int m = 0; m < n; ++m) {
          system(row, col(l, m)) += alg.c(m, i, j);
          system(row, col(m, i)) -= alg.c(l, m, j);
          system(row, col(m, j)) -= alg.c(l, i, m);
        }
      }
  const Matrix null = nullspace(system, tol);
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(null.cols()));
  for (Eigen::Index c = 0; c < null.cols(); ++c) out.push_back(null.col(c).reshaped(n, n));
  return out;
}

// Largest violation of the derivation identity over basis pairs.
inline double derivation_residual(const LieAlgebra& alg, const Matrix& delta) {
  const int n = alg.dim();
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vector ei = Vector::Unit(n, i), ej = Vector::Unit(n, j);
      const Vector lhs = delta * bracket(alg, ei, ej);
      const Vector rhs = bracket(alg, delta * ei, ej) + bracket(alg, ei, delta * ej);
      worst = std::max(worst, (lhs - rhs).norm());
    }
  return worst;
}

inline BilinearForm killing_form(const LieAlgebra& alg) {
  const int n = alg.dim();
  Matrix k(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) k(i, j) = k(j, i) = (alg.ad_basis(i) * alg.ad_basis(j)).trace();
  return {k, BilinearForm::Kind::Killing};
}

struct IdealCheck {
  bool is_ideal = false;
  double residual = 0.0;
};

inline IdealCheck is_ideal(const LieAlgebra& alg, const LinearSubspace& u, double tol = 1e-9) {
  IdealCheck r;
  for (int a = 0; a < u.dim(); ++a)
    for (int j = 0; j < alg.dim(); ++j)
      r.residual = std::max(r.residual, u.residual(alg.ad_basis(j) * u.basis().col(a)));
  r.is_ideal = r.residual <= tol;
  return r;
}

// Smallest ideal containing the span of `seed`: U ← U + [g, U] until stable.
inline LinearSubspace ideal_closure(const LieAlgebra& alg, const Matrix& seed, double tol = 1e-9) {
  const int n = alg.dim();
  LinearSubspace u(seed, tol);
  while (u.dim() > 0 && u.dim() < n) {
    Matrix grown(n, u.dim() * (n + 1));
    grown.leftCols(u.dim()) = u.basis();
    for (int j = 0; j < n; ++j) grown.middleCols(u.dim() * (j + 1), u.dim()) = alg.ad_basis(j) * u.basis();
    LinearSubspace next(grown, tol);
    if (next.dim() == u.dim()) break;
    u = std::move(next);
  }
  return u;
}

// Span of all brackets [e_i, e_j].
inline LinearSubspace derived_algebra(const LieAlgebra& alg, double tol = 1e-9) {
  const int n = alg.dim();
  Matrix cols(n, n * n);
  for (int i = 0; i < n; ++i) cols.middleCols(i * n, n) = alg.ad_basis(i);
  return LinearSubspace(cols, tol);
}

struct SimplicityReport {
  enum class Verdict { Simple, Abelian, HasIdeal };
  Verdict verdict = Verdict::Simple;
  std::optional<LinearSubspace> witness;
  // Number of random trials behind a Simple verdict; the verdict is
  // probabilistic whenever this is reported.
  int trials = 0;
  bool probabilistic = false;
};

inline const char* to_string(SimplicityReport::Verdict v) {
  switch (v) {
    case SimplicityReport::Verdict::Simple: return "simple";
    case SimplicityReport::Verdict::Abelian: return "abelian";
    case SimplicityReport::Verdict::HasIdeal: return "has-ideal";
  }
  return "?";
}

// Randomized search for a proper ideal. Deterministic candidates (center,
// derived algebra) come first; then, for random x, every real eigen-line or
// eigen-plane of ad_x is closed under bracketing with g.
inline SimplicityReport is_simple(const LieAlgebra& alg, double tol = 1e-9, int trials = 20,
                                  std::uint64_t seed = 20240613) {
  const int n = alg.dim();
  SimplicityReport r;
  if (alg.max_abs_constant() <= tol) {
    r.verdict = SimplicityReport::Verdict::Abelian;
    return r;
  }
  auto proper = [&](const LinearSubspace& u) { return u.dim() > 0 && u.dim() < n && is_ideal(alg, u, tol * 10).is_ideal; };

  if (auto z = center(alg, tol); proper(z)) {
    r.verdict = SimplicityReport::Verdict::HasIdeal;
    r.witness = z;
    return r;
  }
  if (auto d = derived_algebra(alg, tol); proper(d)) {
    r.verdict = SimplicityReport::Verdict::HasIdeal;
    r.witness = d;
    return r;
  }

  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    const Vector x = random_gaussian(n, 1, rng).col(0);
    Eigen::EigenSolver<Matrix> eig(ad_matrix(alg, x));
    if (eig.info() != Eigen::Success) continue;
    const auto vecs = eig.eigenvectors();
    for (int c = 0; c < n; ++c) {
      Matrix seed_cols(n, 2);
      seed_cols.col(0) = vecs.col(c).real();
      seed_cols.col(1) = vecs.col(c).imag();
      const LinearSubspace u = ideal_closure(alg, seed_cols, tol);
      if (proper(u)) {
        r.verdict = SimplicityReport::Verdict::HasIdeal;
        r.witness = u;
        return r;
      }
    }
  }
  r.verdict = SimplicityReport::Verdict::Simple;
  r.trials = trials;
  r.probabilistic = true;
  return r;
}

}  // namespace bracketflow
