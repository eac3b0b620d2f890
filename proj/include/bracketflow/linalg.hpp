#pragma once

// Small dense linear-algebra helpers shared by every module. Everything here
// works on symmetric matrices through an eigendecomposition, or on general
// matrices through an SVD; nothing is clever about sparsity because the
// algebras we handle have dimension well under 30.

#include "bracketflow/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace bracketflow {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

// Eigenvalues ascending, eigenvectors in the columns.
struct SymEigen {
  Vector values;
  Matrix vectors;
};

inline SymEigen sym_eigen(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(a));
  return {solver.eigenvalues(), solver.eigenvectors()};
}

template <class Fn>
Matrix compose(const SymEigen& e, Fn fn) {
  Vector mapped = e.values.unaryExpr(fn);
  return e.vectors * mapped.asDiagonal() * e.vectors.transpose();
}

template <class Fn>
Matrix sym_apply(const Matrix& a, Fn fn) {
  return compose(sym_eigen(a), fn);
}

inline Matrix sym_exp(const Matrix& a) {
  return sym_apply(a, [](double x) { return std::exp(x); });
}

// Logarithm of a symmetric positive-definite matrix.
inline Matrix spd_log(const Matrix& a) {
  return sym_apply(a, [](double x) { return std::log(x); });
}

// log(B Bᵀ) computed from the singular values of B, so that B may be strongly
// graded (B = C·diag(e^{Rσ/2})) without ever forming B Bᵀ.
inline Matrix gram_log(const Matrix& b) {
  Eigen::JacobiSVD<Matrix, Eigen::FullPivHouseholderQRPreconditioner> svd(b, Eigen::ComputeFullU);
  Vector logs = svd.singularValues().unaryExpr([](double s) { return 2.0 * std::log(s); });
  return svd.matrixU() * logs.asDiagonal() * svd.matrixU().transpose();
}

// log(B Bᵀ) for B = M·diag(e^{s}), without forming B. One-sided Jacobi on
// unit-norm columns whose scales are carried as logarithms: the rotation
// between columns p and q only sees the ratio e^{s_q − s_p}, so column
// scalings far outside the double range are handled with relative accuracy
// governed by the conditioning of M alone.
inline Matrix graded_gram_log(const Matrix& m, const Vector& log_scale, int max_sweeps = 60) {
  const Eigen::Index n = m.cols();
  if (log_scale.size() != n) throw PreconditionError("graded_gram_log: scale size mismatch");
  Matrix cols = m;
  Vector s = log_scale;
  for (Eigen::Index c = 0; c < n; ++c) {
    const double len = cols.col(c).norm();
    if (!(len > 0.0)) throw PreconditionError("graded_gram_log: singular factor");
    cols.col(c) /= len;
    s(c) += std::log(len);
  }
  const double eps = std::numeric_limits<double>::epsilon();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) {
        // Order so that p carries the larger scale; r = e^{s_q − s_p} ≤ 1.
        Eigen::Index hi = p, lo = q;
        if (s(lo) > s(hi)) std::swap(hi, lo);
        const double g = cols.col(hi).dot(cols.col(lo));
        if (std::abs(g) <= eps) continue;
        rotated = true;
        const double r = std::exp(s(lo) - s(hi));
        // Columns b_hi = e^{s_hi}·u, b_lo = e^{s_lo}·v with |u| = |v| = 1.
        // The rotation zeroing their inner product has t = tan φ with
        // 1/ζ = 2rg/(r² − 1); both branches stay finite for any r.
        const double denom = r * r - 1.0;
        double t;
        if (std::abs(2.0 * r * g) <= std::abs(denom)) {
          const double inv_zeta = 2.0 * r * g / denom;
          t = inv_zeta / (1.0 + std::sqrt(1.0 + inv_zeta * inv_zeta));
        } else {
          const double zeta = denom / (2.0 * r * g);
          t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        // new b_hi = c·b_hi − c·t·b_lo, new b_lo = c·t·b_hi + c·b_lo, each
        // kept relative to its own scale. t/r stays bounded as r → 0.
        const double t_over_r = std::abs(2.0 * r * g) <= std::abs(denom)
                                    ? 2.0 * g / denom / (1.0 + std::sqrt(1.0 + std::pow(2.0 * r * g / denom, 2)))
                                    : t / r;
        const Vector u = cols.col(hi), v = cols.col(lo);
        Vector new_hi = c * (u - t * r * v);
        Vector new_lo = c * (t_over_r * u + v);
        const double lh = new_hi.norm(), ll = new_lo.norm();
        cols.col(hi) = new_hi / lh;
        cols.col(lo) = new_lo / ll;
        s(hi) += std::log(lh);
        s(lo) += std::log(ll);
      }
    if (!rotated) break;
  }
  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index c = 0; c < n; ++c) out += 2.0 * s(c) * cols.col(c) * cols.col(c).transpose();
  return out;
}

inline Matrix trace_free(const Matrix& a) {
  const auto n = a.rows();
  return a - (a.trace() / static_cast<double>(n)) * Matrix::Identity(n, n);
}

// Orthonormal basis of the null space of `a`; singular values at or below
// rel_tol·σ_max count as zero.
inline Matrix nullspace(const Matrix& a, double rel_tol) {
  const Eigen::Index cols = a.cols();
  if (cols == 0) return Matrix(0, 0);
  Matrix padded = a;
  if (a.rows() < cols) {
    padded = Matrix::Zero(cols, cols);
    padded.topRows(a.rows()) = a;
  }
  Eigen::BDCSVD<Matrix> svd(padded, Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  const double cutoff = rel_tol * (s.size() > 0 ? s(0) : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cutoff) ++rank;
  return svd.matrixV().rightCols(cols - rank);
}

// Orthonormal basis of the column span of `cols`, rank decided by a
// column-pivoted QR with threshold tol relative to the largest column.
inline Matrix orthonormal_span(const Matrix& cols, double tol) {
  if (cols.cols() == 0) return Matrix(cols.rows(), 0);
  double scale = 0.0;
  for (Eigen::Index j = 0; j < cols.cols(); ++j) scale = std::max(scale, cols.col(j).norm());
  if (scale == 0.0) return Matrix(cols.rows(), 0);
  Eigen::ColPivHouseholderQR<Matrix> qr(cols / scale);
  qr.setThreshold(tol);
  const Eigen::Index rank = qr.rank();
  Matrix q = qr.householderQ() * Matrix::Identity(cols.rows(), rank);
  return q;
}

// ‖v − QQᵀv‖ for Q with orthonormal columns.
inline double projection_residual(const Matrix& q, const Vector& v) {
  if (q.cols() == 0) return v.norm();
  return (v - q * (q.transpose() * v)).norm();
}

inline Matrix random_gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

// Uniformly random trace-free symmetric matrix with Frobenius norm `norm`.
inline Matrix random_trace_free_symmetric(Eigen::Index n, double norm, std::mt19937_64& rng) {
  Matrix s = trace_free(symmetrize(random_gaussian(n, n, rng)));
  const double len = s.norm();
  return len > 0.0 ? Matrix(s * (norm / len)) : s;
}

}  // namespace bracketflow
