#pragma once

// Helpers shared by the test files: seeded random objects and small
// hand-rolled generators for property tests.

#include "bracketflow/bracketflow.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace testing_support {

using bracketflow::LieAlgebra;
using bracketflow::Matrix;
using bracketflow::MetricPoint;
using bracketflow::Vector;

inline std::vector<std::string> real_corpus() {
  std::vector<std::string> out;
  for (const auto& name : bracketflow::corpus_names())
    if (!bracketflow::corpus_is_complex(name)) out.push_back(name);
  return out;
}

inline std::vector<std::string> simple_corpus() { return {"sl2R", "su2", "so3", "sl3R", "su3"}; }

inline Vector random_vector(int n, std::mt19937_64& rng) { return bracketflow::random_gaussian(n, 1, rng).col(0); }

// Random element of SL(n), kept well conditioned.
inline Matrix random_sl(int n, std::mt19937_64& rng, double spread = 0.5) {
  Matrix g = Matrix::Identity(n, n) + spread * bracketflow::random_gaussian(n, n, rng) / std::sqrt(double(n));
  double det = g.determinant();
  if (det < 0.0) {
    g.col(0) *= -1.0;
    det = -det;
  }
  return g / std::pow(det, 1.0 / n);
}

inline MetricPoint random_metric(int n, std::mt19937_64& rng, double radius = 1.0) {
  return MetricPoint(bracketflow::sym_exp(bracketflow::random_trace_free_symmetric(n, radius, rng)));
}

// Same algebra in the basis given by the columns of g.
inline LieAlgebra change_basis(const LieAlgebra& alg, const Matrix& g) {
  const Matrix ginv = g.inverse();
  std::vector<Matrix> ad;
  for (int i = 0; i < alg.dim(); ++i) ad.push_back(ginv * bracketflow::ad_matrix(alg, g.col(i)) * g);
  return LieAlgebra::from_ad(std::move(ad));
}

// Direct evaluation of the Jacobi sums from the raw tensor.
inline double brute_jacobi(const std::vector<double>& c, int n) {
  auto at = [&](int k, int i, int j) { return c[(std::size_t(k) * n + i) * n + j]; };
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        // [[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j], coordinate by coordinate.
        std::vector<double> sum(std::size_t(n), 0.0);
        for (int m = 0; m < n; ++m)
          for (int l = 0; l < n; ++l)
            sum[std::size_t(l)] += at(m, i, j) * at(l, m, k) + at(m, j, k) * at(l, m, i) + at(m, k, i) * at(l, m, j);
        for (double v : sum) worst = std::max(worst, std::abs(v));
      }
  return worst;
}

// Random antisymmetric tensor; Jacobi generally fails.
inline std::vector<double> random_antisymmetric(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  const auto un = std::size_t(n);
  std::vector<double> c(un * un * un, 0.0);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double v = g(rng);
        c[(k * un + i) * un + j] = v;
        c[(k * un + j) * un + i] = -v;
      }
  return c;
}

// Matrices of sl(2,R) in the corpus basis (h, e, f).
inline std::vector<Matrix> sl2_matrices() {
  Matrix h(2, 2), e(2, 2), f(2, 2);
  h << 1, 0, 0, -1;
  e << 0, 1, 0, 0;
  f << 0, 0, 1, 0;
  return {h, e, f};
}

inline std::vector<Matrix> sl3_matrices() { return bracketflow::detail::sl3_basis(); }

// Dimensions of the ±1 eigenspaces of X ↦ −Xᵀ restricted to the span of a
// matrix basis: the classical Cartan decomposition.
struct ClassicalSplit {
  int dim_k = 0;
  int dim_p = 0;
};

inline ClassicalSplit classical_split(const std::vector<Matrix>& basis) {
  const auto d = static_cast<Eigen::Index>(basis.size());
  Matrix coords(basis.front().size(), d);
  for (Eigen::Index i = 0; i < d; ++i) coords.col(i) = basis[std::size_t(i)].reshaped();
  Matrix antisym(coords.rows(), d), sym(coords.rows(), d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const Matrix& x = basis[std::size_t(i)];
    antisym.col(i) = (0.5 * (x - x.transpose())).reshaped();
    sym.col(i) = (0.5 * (x + x.transpose())).reshaped();
  }
  Eigen::FullPivLU<Matrix> a(antisym), s(sym);
  a.setThreshold(1e-12);
  s.setThreshold(1e-12);
  return {static_cast<int>(a.rank()), static_cast<int>(s.rank())};
}

// A unit direction S at the identity and h ∈ SL(n) for the boundary-action
// test. Sample t has n = 3 + t % 2, a repeated eigenvalue pair when t is
// even, and h block upper triangular for the flag of S unless t % 3 == 0.
struct BoundaryPair {
  bracketflow::Matrix h;
  bracketflow::TangentDirection s;
  bool block_triangular = false;
};

inline BoundaryPair random_boundary_pair(int t, std::mt19937_64& rng) {
  using namespace bracketflow;
  std::uniform_real_distribution<double> spacing(0.3, 1.0);
  const int n = 3 + t % 2;
  Vector ev(n);
  ev(0) = 0.0;
  for (int i = 1; i < n; ++i) ev(i) = ev(i - 1) + (t % 2 == 0 && i == 1 ? 0.0 : spacing(rng));
  const Matrix q = Eigen::HouseholderQR<Matrix>(random_gaussian(n, n, rng)).householderQ();
  const TangentDirection s =
      TangentDirection::from_transported(MetricPoint::identity(n), q * ev.asDiagonal() * q.transpose()).normalized();
  const WeightedFlag f = flag_of_direction(s);
  Matrix ht = random_gaussian(n, n, rng);
  const bool block = t % 3 != 0;
  if (block) {
    int row0 = 0;
    for (int m : f.multiplicities) {
      ht.block(row0 + m, row0, n - row0 - m, m).setZero();
      row0 += m;
    }
  }
  if (ht.determinant() < 0) ht.col(0) *= -1.0;
  ht /= std::pow(ht.determinant(), 1.0 / n);
  return {f.eigenbasis * ht * f.eigenbasis.transpose(), s, block};
}

}  // namespace testing_support
