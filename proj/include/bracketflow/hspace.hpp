#pragma once

// The symmetric space of determinant-one inner products on R^n, with the
// SL(n)-invariant metric ‖δH‖²_H = Tr((δH·H⁻¹)²). Points are stored as full
// matrices together with their eigendecomposition; tangent vectors are
// symmetric matrices δH at a base point.

#include "bracketflow/algebra.hpp"
#include "bracketflow/errors.hpp"
#include "bracketflow/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace bracketflow {

class MetricPoint {
 public:
  // Symmetrizes, checks positivity and rescales to determinant one.
  explicit MetricPoint(const Matrix& h) {
    if (h.rows() != h.cols() || h.rows() == 0) throw PreconditionError("metric must be a non-empty square matrix");
    SymEigen e = sym_eigen(h);
    if (!(e.values.minCoeff() > 0.0))
      throw PreconditionError("metric is not positive definite (min eigenvalue " + std::to_string(e.values.minCoeff()) + ")");
    const double mean_log = e.values.array().log().mean();
    e.values *= std::exp(-mean_log);
    eig_ = std::move(e);
    h_ = compose(eig_, [](double x) { return x; });
  }

  static MetricPoint identity(int n) { return MetricPoint(Matrix::Identity(n, n)); }

  // exp(L) for symmetric L, kept through the eigen-decomposition of L so that
  // small eigenvalues of a badly conditioned metric keep their accuracy.
  static MetricPoint from_log(const Matrix& l) {
    if (l.rows() != l.cols() || l.rows() == 0) throw PreconditionError("log of a metric must be a non-empty square matrix");
    SymEigen e = sym_eigen(l);
    e.values = (e.values.array() - e.values.mean()).exp().matrix();
    MetricPoint out;
    out.h_ = compose(e, [](double x) { return x; });
    out.eig_ = std::move(e);
    return out;
  }

  int dim() const { return static_cast<int>(h_.rows()); }
  const Matrix& matrix() const { return h_; }
  const SymEigen& eigen() const { return eig_; }

  Matrix sqrt() const { return compose(eig_, [](double x) { return std::sqrt(x); }); }
  Matrix inv_sqrt() const { return compose(eig_, [](double x) { return 1.0 / std::sqrt(x); }); }
  Matrix inverse() const { return compose(eig_, [](double x) { return 1.0 / x; }); }

  // H ↦ gᵀ H g.
  MetricPoint pulled_back(const Matrix& g) const { return MetricPoint(g.transpose() * h_ * g); }

 private:
  MetricPoint() = default;
  Matrix h_;
  SymEigen eig_;
};

// Tangent vector δH at `base`. `transported()` is P⁻¹·δH·P⁻¹ with P = H^{1/2},
// the same vector expressed at the identity; its Frobenius norm is the
// Riemannian norm.
class TangentDirection {
 public:
  TangentDirection(MetricPoint base, const Matrix& s, double trace_tol = 1e-8) : base_(std::move(base)) {
    if (s.rows() != base_.dim() || s.cols() != base_.dim()) throw PreconditionError("tangent vector has the wrong shape");
    if ((s - s.transpose()).norm() > trace_tol * std::max(1.0, s.norm()))
      throw PreconditionError("tangent vector is not symmetric");
    s_ = symmetrize(s);
    sigma_ = symmetrize(base_.inv_sqrt() * s_ * base_.inv_sqrt());
    if (std::abs(sigma_.trace()) > trace_tol * std::max(1.0, sigma_.norm()))
      throw PreconditionError("tangent vector is not trace-free with respect to its base");
  }

  static TangentDirection from_transported(const MetricPoint& base, const Matrix& sigma) {
    const Matrix p = base.sqrt();
    return TangentDirection(base, p * trace_free(symmetrize(sigma)) * p);
  }

  const MetricPoint& base() const { return base_; }
  const Matrix& matrix() const { return s_; }
  const Matrix& transported() const { return sigma_; }
  double norm() const { return sigma_.norm(); }

  TangentDirection scaled(double t) const { return from_transported(base_, t * sigma_); }
  TangentDirection normalized() const {
    const double len = norm();
    if (len == 0.0) throw PreconditionError("cannot normalize the zero direction");
    return scaled(1.0 / len);
  }

 private:
  MetricPoint base_;
  Matrix s_;
  Matrix sigma_;
};

// ⟨A, B⟩_H = Tr(A H⁻¹ B H⁻¹).
inline double inner(const TangentDirection& a, const TangentDirection& b) {
  return (a.transported().array() * b.transported().array()).sum();
}

inline double riemannian_norm(const MetricPoint& base, const Matrix& delta) {
  const Matrix m = delta * base.inverse();
  return std::sqrt(std::max(0.0, (m * m).trace()));
}

// P·exp(tΣ)·P with P = base^{1/2} and Σ the transported direction.
inline MetricPoint geodesic(const MetricPoint& base, const TangentDirection& dir, double t) {
  const Matrix p = base.sqrt();
  return MetricPoint(symmetrize(p * sym_exp(t * dir.transported()) * p));
}

// log(x^{-1/2} z x^{-1/2}) with z taken from its eigen-decomposition, so
// that a badly conditioned z never enters a matrix product.
inline Matrix relative_log(const MetricPoint& x, const MetricPoint& z) {
  const SymEigen& e = z.eigen();
  return graded_gram_log(x.inv_sqrt() * e.vectors, 0.5 * e.values.array().log().matrix());
}

inline double distance(const MetricPoint& a, const MetricPoint& b) { return relative_log(a, b).norm(); }

inline TangentDirection log_map(const MetricPoint& x, const MetricPoint& z) {
  return TangentDirection::from_transported(x, relative_log(x, z));
}

// Unit direction at x pointing at z.
inline TangentDirection theta(const MetricPoint& x, const MetricPoint& z) {
  const TangentDirection v = log_map(x, z);
  if (v.norm() == 0.0) throw PreconditionError("theta is undefined at z = x");
  return v.normalized();
}

// Angle between two unit directions at the same base.
inline double angle_between(const TangentDirection& a, const TangentDirection& b) {
  const double c = std::clamp(inner(a, b) / (a.norm() * b.norm()), -1.0, 1.0);
  return std::acos(c);
}

// Θ_x(exp_y(Rν)) for unit ν at y, evaluated without forming the far point:
// x^{-1/2}·exp_y(Rν)·x^{-1/2} = B Bᵀ with B = x^{-1/2}·y^{1/2}·Q·e^{RΛ/2},
// whose column scales are handed to graded_gram_log as logarithms.
inline TangentDirection far_direction(const MetricPoint& x, const TangentDirection& nu, double r) {
  const SymEigen e = sym_eigen(nu.transported());
  const Matrix m = x.inv_sqrt() * nu.base().sqrt() * e.vectors;
  const Matrix l = trace_free(graded_gram_log(m, 0.5 * r * e.values));
  return TangentDirection::from_transported(x, l / l.norm());
}

// Default radii for boundary_limit: geometric from just above 2·d.
inline std::vector<double> default_schedule(double d, int count = 10) {
  std::vector<double> out;
  double r = std::max(2.0 * d + 1.0, 4.0);
  for (int i = 0; i < count; ++i, r *= 2.0) out.push_back(r);
  return out;
}

struct BoundaryLimit {
  TangentDirection estimate;      // Θ_x(exp_y(Rν)) at the largest R
  TangentDirection extrapolated;  // polynomial extrapolation in 1/R to R = ∞
  std::vector<double> radii;
  std::vector<double> increments;  // angle between consecutive estimates
  std::vector<double> bounds;      // ∫ d/(r(r−d)) dr over the same interval
  bool certified = false;
};

// lim_{R→∞} Θ_x(exp_y(Rν)). Consecutive estimates must move by no more than
// the integrated derivative bound d/(R(R−d)) (times 1 + slack); moving by
// more than ten times that is reported as a geometry violation.
inline BoundaryLimit boundary_limit(const MetricPoint& x, const MetricPoint& y, const TangentDirection& nu,
                                    std::vector<double> radii = {}, double slack = 0.1) {
  if (std::abs(nu.norm() - 1.0) > 1e-9) throw PreconditionError("boundary_limit needs a unit direction");
  const double d = distance(x, y);
  if (radii.empty()) radii = default_schedule(d);
  if (!(radii.front() > 2.0 * d)) throw PreconditionError("first radius must exceed twice d(x, y)");
  if (!std::is_sorted(radii.begin(), radii.end()) ||
      std::adjacent_find(radii.begin(), radii.end()) != radii.end())
    throw PreconditionError("radius schedule must be strictly increasing");

  std::vector<TangentDirection> samples;
  samples.reserve(radii.size());
  for (double r : radii) samples.push_back(far_direction(x, nu, r));

  BoundaryLimit out{samples.back(), samples.back(), radii, {}, {}, true};
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double r0 = radii[i - 1], r1 = radii[i];
    const double bound = d > 0.0 ? std::log((r1 - d) * r0 / ((r0 - d) * r1)) : 0.0;
    const double inc = angle_between(samples[i - 1], samples[i]);
    out.increments.push_back(inc);
    out.bounds.push_back(bound);
    const double allowed = bound * (1.0 + slack) + 1e-9;
    if (inc > allowed) out.certified = false;
    if (inc > 10.0 * allowed)
      throw InvariantBreach("boundary_limit: increment " + std::to_string(inc) + " exceeds ten times the bound " +
                            std::to_string(allowed));
  }

  // Neville extrapolation to h = 1/R = 0 over the last few samples.
  const std::size_t m = std::min<std::size_t>(4, samples.size());
  const std::size_t first = samples.size() - m;
  std::vector<Matrix> table;
  std::vector<double> h;
  for (std::size_t i = first; i < samples.size(); ++i) {
    table.push_back(samples[i].transported());
    h.push_back(1.0 / radii[i]);
  }
  for (std::size_t level = 1; level < m; ++level)
    for (std::size_t i = 0; i + level < m; ++i)
      table[i] = (h[i + level] * table[i] - h[i] * table[i + 1]) / (h[i + level] - h[i]);
  const Matrix limit = trace_free(symmetrize(table[0]));
  out.extrapolated = TangentDirection::from_transported(x, limit / limit.norm());
  return out;
}

// Weighted flag F_1 ⊂ … ⊂ F_r = V with weights μ_1 > … > μ_r,
// Σ n_i μ_i = 0 and Σ n_i μ_i² = 1.
struct WeightedFlag {
  std::vector<LinearSubspace> subspaces;
  std::vector<double> weights;
  std::vector<int> multiplicities;
  // Orthonormal eigenvectors, grouped by decreasing weight.
  Matrix eigenbasis;

  double weight_sum() const {
    double s = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) s += multiplicities[i] * weights[i];
    return s;
  }
  double weight_square_sum() const {
    double s = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) s += multiplicities[i] * weights[i] * weights[i];
    return s;
  }
};

// Flag of a unit trace-free symmetric S at the identity: eigenvalues grouped
// where neighbours differ by less than gap_tol·max|λ|, subspaces accumulated in
// decreasing-weight order.
inline WeightedFlag flag_of_direction(const TangentDirection& s, double gap_tol = 1e-6) {
  const int n = s.base().dim();
  if ((s.base().matrix() - Matrix::Identity(n, n)).norm() > 1e-10)
    throw PreconditionError("flag_of_direction expects a direction at the identity");
  if (std::abs(s.norm() - 1.0) > 1e-8) throw PreconditionError("flag_of_direction expects a unit direction");
  const SymEigen e = sym_eigen(s.transported());
  const double scale = e.values.cwiseAbs().maxCoeff();

  // Descending order.
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::reverse(order.begin(), order.end());

  WeightedFlag f;
  f.eigenbasis = Matrix(n, n);
  std::vector<std::vector<int>> groups;
  for (int idx : order) {
    if (groups.empty() || e.values(groups.back().back()) - e.values(idx) >= gap_tol * scale)
      groups.emplace_back();
    groups.back().push_back(idx);
  }
  if (groups.size() < 2) throw PreconditionError("degenerate direction: all eigenvalues coincide");

  int col = 0;
  for (const auto& g : groups) {
    double mean = 0.0;
    for (int idx : g) {
      mean += e.values(idx);
      f.eigenbasis.col(col++) = e.vectors.col(idx);
    }
    f.weights.push_back(mean / static_cast<double>(g.size()));
    f.multiplicities.push_back(static_cast<int>(g.size()));
    f.subspaces.emplace_back(f.eigenbasis.leftCols(col));
  }
  // Renormalize so both weight identities hold to rounding.
  const double shift = f.weight_sum() / n;
  for (double& w : f.weights) w -= shift;
  const double norm = std::sqrt(f.weight_square_sum());
  for (double& w : f.weights) w /= norm;
  return f;
}

struct BoundaryActionReport {
  bool bounded = false;           // δ_R stays bounded along the R-grid
  bool block_triangular = false;  // h preserves the flag of S
  double block_residual = 0.0;    // largest entry of h below the flag blocks
  double min_gap = 0.0;           // smallest gap between adjacent eigenvalues of S
  std::vector<double> radii;
  std::vector<double> delta;  // δ_R = Tr(log(M_R M_Rᵀ))²
  bool agrees() const { return bounded == block_triangular; }
};

// Whether h ∈ SL(n) fixes the boundary point of the ray exp(RS), judged from
// δ_R with M_R = exp(−RS/2)·h·exp(RS/2), and compared with the flag criterion.
// M_R is formed entrywise in the eigenbasis of S, where conjugation by the
// exponential is a diagonal scaling. Entries approach their limits like
// e^{−R·gap/2}, so R_max should be several times 1/min_gap (the report
// carries min_gap).
inline BoundaryActionReport boundary_action_test(const Matrix& h, const TangentDirection& s, double r_max,
                                                 int grid = 16, double gap_tol = 1e-6) {
  const int n = s.base().dim();
  if (h.rows() != n || h.cols() != n) throw PreconditionError("h has the wrong shape");
  if (grid < 2 || grid % 2 != 0) throw PreconditionError("grid must be an even number of at least 2 points");
  if (!(r_max > 0.0)) throw PreconditionError("r_max must be positive");
  const WeightedFlag flag = flag_of_direction(s, gap_tol);
  const Matrix& q = flag.eigenbasis;
  const Matrix ht = q.transpose() * h * q;
  Vector lambda(n);
  std::vector<int> block(static_cast<std::size_t>(n));
  {
    int col = 0;
    for (std::size_t b = 0; b < flag.weights.size(); ++b)
      for (int k = 0; k < flag.multiplicities[b]; ++k, ++col) {
        lambda(col) = flag.weights[b];
        block[static_cast<std::size_t>(col)] = static_cast<int>(b);
      }
  }
  // Rescaling the flag weights changes S only by a positive factor, which
  // reparametrizes the ray; use S's own eigenvalues for the grid.
  const SymEigen es = sym_eigen(s.transported());
  const double factor = es.values.cwiseAbs().maxCoeff() / lambda.cwiseAbs().maxCoeff();
  lambda *= factor;

  BoundaryActionReport rep;
  const double hscale = std::max(1.0, ht.cwiseAbs().maxCoeff());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (block[static_cast<std::size_t>(i)] > block[static_cast<std::size_t>(j)])
        rep.block_residual = std::max(rep.block_residual, std::abs(ht(i, j)));
  rep.block_triangular = rep.block_residual <= 1e-8 * hscale;
  // Below-block entries at the criterion's own tolerance are rounding left
  // over from the change of basis; e^{R·gap/2} would otherwise amplify them
  // into spurious growth.
  Matrix hc = ht;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (block[static_cast<std::size_t>(i)] > block[static_cast<std::size_t>(j)] && std::abs(hc(i, j)) <= 1e-8 * hscale)
        hc(i, j) = 0.0;
  if (0.5 * r_max * (lambda.maxCoeff() - lambda.minCoeff()) > 600.0)
    throw PreconditionError("r_max is too large for the eigenvalue spread of S");

  for (int g = 1; g <= grid; ++g) {
    const double r = r_max * g / grid;
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = std::exp(0.5 * r * (lambda(j) - lambda(i))) * hc(i, j);
    rep.radii.push_back(r);
    rep.delta.push_back(gram_log(m).squaredNorm());
  }
  // Unbounded growth is linear in R for sqrt(δ), with slope at least of the
  // order of the smallest weight gap; a bounded profile has converged by the
  // second half of the grid.
  rep.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t b = 1; b < flag.weights.size(); ++b)
    rep.min_gap = std::min(rep.min_gap, (flag.weights[b - 1] - flag.weights[b]) * factor);
  const double growth = std::sqrt(rep.delta.back()) - std::sqrt(rep.delta[static_cast<std::size_t>(grid / 2 - 1)]);
  rep.bounded = growth <= 0.1 * rep.min_gap * r_max / 2.0;
  return rep;
}

}  // namespace bracketflow
