#pragma once

// Numerical checks of the facts the flow relies on: the exponential map of
// the space of metrics does not decrease distances, and the linear ODE
// dV/dt = [S, V] + α that controls its derivative.

#include "bracketflow/errors.hpp"
#include "bracketflow/hspace.hpp"
#include "bracketflow/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace bracketflow {

struct OdeProblem {
  Matrix s;
  Matrix alpha;
  double t_max = 1.0;
  int steps = 2000;
};

// (e^x − 1)/x with the removable singularity filled in.
inline double expm1_ratio(double x) { return std::abs(x) < 1e-8 ? 1.0 + 0.5 * x : std::expm1(x) / x; }

// V(t) from the eigenbasis of S: V_ij = t·((e^{λ_ij t} − 1)/(λ_ij t))·α_ij.
inline Matrix ode_closed_form(const Matrix& s, const Matrix& alpha, double t) {
  const SymEigen e = sym_eigen(s);
  const Matrix a = e.vectors.transpose() * alpha * e.vectors;
  Matrix v(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      v(i, j) = t * expm1_ratio((e.values(i) - e.values(j)) * t) * a(i, j);
  return e.vectors * v * e.vectors.transpose();
}

struct OdeSolution {
  std::vector<double> t;
  std::vector<Matrix> v;       // closed form at each sample
  double max_mismatch = 0.0;   // relative gap to the RK4 integrator
};

inline OdeSolution solve_ode(const OdeProblem& p, int samples = 10) {
  if ((p.s - p.s.transpose()).norm() > 1e-12 * std::max(1.0, p.s.norm()) ||
      (p.alpha - p.alpha.transpose()).norm() > 1e-12 * std::max(1.0, p.alpha.norm()))
    throw PreconditionError("S and alpha must be symmetric");
  if (p.steps < 1 || samples < 1) throw PreconditionError("need at least one step and one sample");
  const int per_sample = std::max(1, p.steps / samples);
  const double h = p.t_max / (per_sample * samples);
  auto rhs = [&](const Matrix& v) -> Matrix { return p.s * v - v * p.s + p.alpha; };

  OdeSolution out;
  Matrix v = Matrix::Zero(p.s.rows(), p.s.cols());
  double t = 0.0;
  for (int k = 1; k <= samples; ++k) {
    for (int i = 0; i < per_sample; ++i) {
      const Matrix k1 = rhs(v);
      const Matrix k2 = rhs(v + 0.5 * h * k1);
      const Matrix k3 = rhs(v + 0.5 * h * k2);
      const Matrix k4 = rhs(v + h * k3);
      v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    t = h * per_sample * k;
    Matrix exact = ode_closed_form(p.s, p.alpha, t);
    const double scale = exact.norm();
    if (scale > 0.0) out.max_mismatch = std::max(out.max_mismatch, (exact - v).norm() / scale);
    else out.max_mismatch = std::max(out.max_mismatch, v.norm());
    out.t.push_back(t);
    out.v.push_back(std::move(exact));
  }
  if (out.max_mismatch > 1e-6)
    throw InvariantBreach("closed-form and RK4 solutions disagree (relative " + std::to_string(out.max_mismatch) + ")");
  return out;
}

// Q(x) = 2(cosh x − 1)/x², Q(0) = 1.
inline double q_factor(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-4) return 1.0 + x * x / 12.0 + x * x * x * x / 360.0;
  const double half = std::sinh(0.5 * ax) / (0.5 * ax);
  return half * half;
}

struct Lemma7Report {
  double min_margin = 0.0;       // min over t of Tr V(t)² − t²·Tr α²
  double min_relative_margin = 0.0;
  std::vector<double> t;
  std::vector<double> lhs;       // Tr V(t)²
  std::vector<double> rhs;       // t²·Tr α²
};

// Tr V(t)² ≥ t²·Tr α² on the grid, allowing 1e−10 of rounding per unit
// magnitude of the right-hand side.
inline Lemma7Report lemma7_check(const OdeProblem& p, const std::vector<double>& t_grid) {
  Lemma7Report r;
  r.min_margin = r.min_relative_margin = std::numeric_limits<double>::infinity();
  const double alpha_sq = (p.alpha * p.alpha).trace();
  for (double t : t_grid) {
    const Matrix v = ode_closed_form(p.s, p.alpha, t);
    const double lhs = (v * v).trace();
    const double rhs = t * t * alpha_sq;
    const double margin = lhs - rhs;
    r.t.push_back(t);
    r.lhs.push_back(lhs);
    r.rhs.push_back(rhs);
    r.min_margin = std::min(r.min_margin, margin);
    r.min_relative_margin = std::min(r.min_relative_margin, margin / std::max(1.0, rhs));
    if (margin < -1e-10 * std::max(1.0, rhs))
      throw InvariantBreach("Tr V² < t² Tr α² at t = " + std::to_string(t) + " (margin " + std::to_string(margin) + ")");
  }
  return r;
}

struct PropertyStarReport {
  int n = 0;
  int samples = 0;
  std::uint64_t seed = 0;
  int violations = 0;
  double min_margin = 0.0;            // min of d(exp S1, exp S2) − ‖S1 − S2‖
  int commuting_samples = 0;
  double max_commuting_gap = 0.0;     // |margin| on commuting samples
  double min_noncommuting_gap = 0.0;  // smallest margin among the others
  double lemma7_min_margin = 0.0;     // infinitesimal form at t = 1
  bool passed() const { return violations == 0; }
};

// exp_p is distance non-decreasing: d(exp_p S1, exp_p S2) ≥ ‖S1 − S2‖_p for
// random base points and tangent pairs. Every fifth sample uses commuting
// tangents, where equality holds. Also runs the derivative form
// Tr v² ≥ Tr α² at t = 1 on each sample.
inline PropertyStarReport property_star_suite(int n, int samples, std::uint64_t seed, double slack = 1e-8) {
  if (n < 2) throw PreconditionError("property_star_suite needs n >= 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> len(0.1, 2.5);
  PropertyStarReport r;
  r.n = n;
  r.samples = samples;
  r.seed = seed;
  r.min_margin = r.min_noncommuting_gap = r.lemma7_min_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    const MetricPoint base(sym_exp(random_trace_free_symmetric(n, len(rng), rng)));
    Matrix s1 = random_trace_free_symmetric(n, len(rng), rng);
    Matrix s2 = random_trace_free_symmetric(n, len(rng), rng);
    const bool commuting = k % 5 == 0;
    if (commuting) {
      const SymEigen e = sym_eigen(s1);
      const Matrix d = random_gaussian(n, 1, rng);
      s2 = trace_free(e.vectors * d.col(0).asDiagonal() * e.vectors.transpose());
    }
    const auto t1 = TangentDirection::from_transported(base, s1);
    const auto t2 = TangentDirection::from_transported(base, s2);
    const double lhs = distance(geodesic(base, t1, 1.0), geodesic(base, t2, 1.0));
    const double rhs = (t1.transported() - t2.transported()).norm();
    const double margin = lhs - rhs;
    r.min_margin = std::min(r.min_margin, margin);
    if (margin < -slack) ++r.violations;
    if (commuting) {
      ++r.commuting_samples;
      r.max_commuting_gap = std::max(r.max_commuting_gap, std::abs(margin));
    } else {
      r.min_noncommuting_gap = std::min(r.min_noncommuting_gap, margin);
    }
    const OdeProblem ode{s1, symmetrize(s2 - s1), 1.0, 1};
    r.lemma7_min_margin = std::min(r.lemma7_min_margin, lemma7_check(ode, {1.0}).min_margin);
  }
  if (r.violations > 0)
    throw InvariantBreach("exp_p decreased a distance in " + std::to_string(r.violations) + " of " +
                          std::to_string(samples) + " samples (min margin " + std::to_string(r.min_margin) + ")");
  return r;
}

}  // namespace bracketflow
