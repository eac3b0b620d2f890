#pragma once

// Cartan involution and k ⊕ p decomposition read off an optimal metric.

#include "bracketflow/algebra.hpp"
#include "bracketflow/errors.hpp"
#include "bracketflow/hspace.hpp"
#include "bracketflow/kempfness.hpp"
#include "bracketflow/linalg.hpp"

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

namespace bracketflow {

struct KillingSignature {
  int positive = 0;
  int negative = 0;
  int zero = 0;
};

inline KillingSignature signature(const Matrix& form, double rel_tol = 1e-9) {
  const Vector ev = sym_eigen(form).values;
  const double scale = ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0;
  KillingSignature s;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i)) <= rel_tol * scale || scale == 0.0)
      ++s.zero;
    else if (ev(i) > 0.0)
      ++s.positive;
    else
      ++s.negative;
  }
  return s;
}

// Adjoint of A with respect to ⟨u, v⟩ = uᵀHv.
inline Matrix metric_transpose(const MetricPoint& h, const Matrix& a) {
  return h.inverse() * a.transpose() * h.matrix();
}

// Largest relative distance of T(δ) from span(δ_1..δ_r), δ_i a
// Frobenius-orthonormal family.
inline double transpose_closure_residual(const MetricPoint& h, const std::vector<Matrix>& family) {
  if (family.empty()) return 0.0;
  const auto n2 = family.front().size();
  Matrix q(n2, static_cast<Eigen::Index>(family.size()));
  for (std::size_t i = 0; i < family.size(); ++i) q.col(static_cast<Eigen::Index>(i)) = family[i].reshaped();
  q = orthonormal_span(q, 1e-12);
  double worst = 0.0;
  for (const auto& d : family) {
    const Vector v = metric_transpose(h, d).reshaped();
    const double len = v.norm();
    if (len > 0.0) worst = std::max(worst, projection_residual(q, v) / len);
  }
  return worst;
}

struct CartanSplit {
  MetricPoint h_star;
  Matrix theta;
  LinearSubspace k;
  LinearSubspace p;
  KillingSignature killing;
  double gradient_norm = 0.0;
  double ad_closure_residual = 0.0;      // ad(g) under H*-transpose
  double theta_solve_residual = 0.0;     // ‖ad_{θx} + ad_xᵀ‖ relative
  double theta_square_residual = 0.0;    // ‖θ² − I‖
  double theta_symmetry_residual = 0.0;  // θ self-adjoint for H*
  double eigen_offset = 0.0;             // max | |λ(θ)| − 1 |
};

// θ is defined by ad_{θx} = −(ad_x)ᵀ for the H*-transpose; k and p are its
// +1 and −1 eigenspaces.
inline CartanSplit split(const LieAlgebra& alg, const MetricPoint& h_star, double tol = 1e-6) {
  const int n = alg.dim();
  if (h_star.dim() != n) throw PreconditionError("metric dimension does not match the algebra");
  const std::vector<Matrix> tad = transported_ad(alg, h_star);
  const double f = functional_from(tad);
  const double gnorm = moment_from(tad).norm();
  if (gnorm > tol * std::max(1.0, f))
    throw PreconditionError("split needs a critical point of F; gradient norm is " + std::to_string(gnorm));

  const Matrix stack = ad_stack(alg);
  Eigen::JacobiSVD<Matrix> svd(stack, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-10);
  if (svd.rank() < n) throw PreconditionError("ad is not injective; θ is not determined on g");

  std::vector<Matrix> ads;
  for (int i = 0; i < n; ++i) ads.push_back(alg.ad_basis(i));
  const double closure = transpose_closure_residual(h_star, ads);
  if (closure > 10.0 * tol)
    throw PreconditionError("ad(g) is not closed under the metric transpose (residual " + std::to_string(closure) + ")");

  Matrix theta(n, n);
  double solve_res = 0.0;
  for (int j = 0; j < n; ++j) {
    const Vector target = (-metric_transpose(h_star, alg.ad_basis(j))).reshaped();
    theta.col(j) = svd.solve(target);
    solve_res = std::max(solve_res, (stack * theta.col(j) - target).norm() / std::max(target.norm(), 1e-300));
  }

  const Matrix p = h_star.sqrt();
  const Matrix pinv = h_star.inv_sqrt();
  const Matrix sym = p * theta * pinv;  // θ in H*-orthonormal coordinates
  const SymEigen e = sym_eigen(sym);

  CartanSplit out{h_star,
                  theta,
                  LinearSubspace::zero(n),
                  LinearSubspace::zero(n),
                  signature(killing_form(alg).matrix),
                  gnorm,
                  closure,
                  solve_res,
                  (theta * theta - Matrix::Identity(n, n)).norm(),
                  (sym - sym.transpose()).norm() / std::max(1.0, sym.norm()),
                  0.0};
  if (out.theta_symmetry_residual > 10.0 * tol)
    throw InvariantBreach("θ is not self-adjoint for H* (residual " + std::to_string(out.theta_symmetry_residual) + ")");

  std::vector<Eigen::Index> plus, minus;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = e.values(i);
    out.eigen_offset = std::max(out.eigen_offset, std::min(std::abs(v - 1.0), std::abs(v + 1.0)));
    (v > 0.0 ? plus : minus).push_back(i);
  }
  if (out.eigen_offset > 10.0 * tol)
    throw InvariantBreach("θ has an eigenvalue away from ±1 (offset " + std::to_string(out.eigen_offset) + ")");

  auto gather = [&](const std::vector<Eigen::Index>& idx) {
    Matrix cols(n, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) cols.col(static_cast<Eigen::Index>(c)) = pinv * e.vectors.col(idx[c]);
    return cols.cols() ? LinearSubspace(cols) : LinearSubspace::zero(n);
  };
  out.k = gather(plus);
  out.p = gather(minus);
  return out;
}

struct InclusionReport {
  double kk = 0.0;  // [k,k] ⊂ k
  double kp = 0.0;  // [k,p] ⊂ p
  double pp = 0.0;  // [p,p] ⊂ k
  std::string worst_pair;
  double worst() const { return std::max({kk, kp, pp}); }
};

// Residuals of the three bracket inclusions, measured by splitting each
// bracket along g = k ⊕ p and taking the component that should vanish,
// relative to the bracket's size.
inline InclusionReport inclusion_residuals(const LieAlgebra& alg, const CartanSplit& s) {
  const int n = alg.dim();
  const int dk = s.k.dim(), dp = s.p.dim();
  Matrix basis(n, dk + dp);
  basis.leftCols(dk) = s.k.basis();
  basis.rightCols(dp) = s.p.basis();
  const Eigen::FullPivLU<Matrix> lu(basis);
  InclusionReport r;
  double worst = -1.0;
  auto measure = [&](const Vector& x, const Vector& y, bool want_k, double& slot, const std::string& name) {
    const Vector b = bracket(alg, x, y);
    const Vector coords = lu.solve(b);
    const double off = want_k ? coords.tail(dp).norm() : coords.head(dk).norm();
    const double res = off / std::max(1.0, coords.norm());
    slot = std::max(slot, res);
    if (res > worst) {
      worst = res;
      r.worst_pair = name;
    }
  };
  for (int i = 0; i < dk; ++i)
    for (int j = 0; j < dk; ++j) measure(s.k.basis().col(i), s.k.basis().col(j), true, r.kk, "[k" + std::to_string(i) + ",k" + std::to_string(j) + "]");
  for (int i = 0; i < dk; ++i)
    for (int j = 0; j < dp; ++j) measure(s.k.basis().col(i), s.p.basis().col(j), false, r.kp, "[k" + std::to_string(i) + ",p" + std::to_string(j) + "]");
  for (int i = 0; i < dp; ++i)
    for (int j = 0; j < dp; ++j) measure(s.p.basis().col(i), s.p.basis().col(j), true, r.pp, "[p" + std::to_string(i) + ",p" + std::to_string(j) + "]");
  return r;
}

inline InclusionReport check_inclusions(const LieAlgebra& alg, const CartanSplit& s, double tol = 1e-6) {
  InclusionReport r = inclusion_residuals(alg, s);
  if (r.worst() > tol)
    throw InvariantBreach("bracket inclusion fails at " + r.worst_pair + " (residual " + std::to_string(r.worst()) + ")");
  return r;
}

// Largest ‖θ[x,y] − [θx, θy]‖ over basis pairs.
inline double involution_residual(const LieAlgebra& alg, const CartanSplit& s) {
  const int n = alg.dim();
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vector ei = Vector::Unit(n, i), ej = Vector::Unit(n, j);
      worst = std::max(worst, (s.theta * bracket(alg, ei, ej) - bracket(alg, s.theta * ei, s.theta * ej)).norm());
    }
  return worst;
}

struct Classification {
  bool compact = false;
  int dim_k = 0;
  int dim_p = 0;
  double killing_max_on_k = 0.0;  // must be < 0
  double killing_min_on_p = 0.0;  // must be > 0 when p ≠ 0
  double killing_cross = 0.0;     // max |K(k_i, p_j)|
};

inline Classification classify(const LieAlgebra& alg, const CartanSplit& s, double tol = 1e-6) {
  const Matrix kf = killing_form(alg).matrix;
  Classification c;
  c.dim_k = s.k.dim();
  c.dim_p = s.p.dim();
  c.compact = c.dim_p == 0;
  const double scale = std::max(1.0, kf.cwiseAbs().maxCoeff());
  if (c.dim_k > 0) c.killing_max_on_k = sym_eigen(s.k.basis().transpose() * kf * s.k.basis()).values.maxCoeff();
  if (c.dim_p > 0) c.killing_min_on_p = sym_eigen(s.p.basis().transpose() * kf * s.p.basis()).values.minCoeff();
  if (c.dim_k > 0 && c.dim_p > 0)
    c.killing_cross = (s.k.basis().transpose() * kf * s.p.basis()).cwiseAbs().maxCoeff();
  if (c.dim_k == 0) throw InvariantBreach("k is trivial");
  if (c.killing_max_on_k >= -tol * scale)
    throw InvariantBreach("Killing form is not negative definite on k (max " + std::to_string(c.killing_max_on_k) + ")");
  if (c.dim_p > 0 && c.killing_min_on_p <= tol * scale)
    throw InvariantBreach("Killing form is not positive definite on p (min " + std::to_string(c.killing_min_on_p) + ")");
  return c;
}

}  // namespace bracketflow
