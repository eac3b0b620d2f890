#pragma once

// The squared norm of the Lie bracket as a function of the metric, its
// moment-map gradient, and the geodesic gradient flow that either converges
// to an optimal metric or runs off to a point at infinity whose flag yields
// ideals.

#include "bracketflow/algebra.hpp"
#include "bracketflow/errors.hpp"
#include "bracketflow/hspace.hpp"
#include "bracketflow/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace bracketflow {

// Adjoint matrices of the bracket transported to the identity: with
// P = H^{1/2}, entry a is P·ad(P⁻¹e_a)·P⁻¹, so that the standard basis is
// orthonormal for the transported metric.
inline std::vector<Matrix> transported_ad(const LieAlgebra& alg, const MetricPoint& h) {
  const Matrix p = h.sqrt();
  const Matrix pinv = h.inv_sqrt();
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(alg.dim()));
  for (int a = 0; a < alg.dim(); ++a) out.push_back(p * ad_matrix(alg, pinv.col(a)) * pinv);
  return out;
}

inline double functional_from(const std::vector<Matrix>& ad) {
  double s = 0.0;
  for (const auto& a : ad) s += a.squaredNorm();
  return 0.5 * s;
}

// F(H) = Σ_{a<b} |[u_a, u_b]|²_H over an H-orthonormal basis.
inline double functional_F(const LieAlgebra& alg, const MetricPoint& h) {
  if (h.dim() != alg.dim()) throw PreconditionError("metric dimension does not match the algebra");
  return functional_from(transported_ad(alg, h));
}

// Moment map at the identity for transported adjoints: the trace-free part of
// ½·Σ_a ad_a ad_aᵀ − Gram(ad_a). Tr(m·ξ) is the derivative of F along exp(tξ).
inline Matrix moment_from(const std::vector<Matrix>& ad) {
  const auto n = static_cast<Eigen::Index>(ad.size());
  Matrix outer = Matrix::Zero(n, n);
  Matrix gram(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    outer.noalias() += ad[a] * ad[a].transpose();
    for (Eigen::Index b = 0; b <= a; ++b) gram(a, b) = gram(b, a) = (ad[a].array() * ad[b].array()).sum();
  }
  return trace_free(symmetrize(0.5 * outer - gram));
}

// Riemannian gradient of F at H: d/dt F(geodesic(H, ξ, t)) at t = 0 equals
// inner(gradient, ξ).
inline TangentDirection gradient(const LieAlgebra& alg, const MetricPoint& h) {
  if (h.dim() != alg.dim()) throw PreconditionError("metric dimension does not match the algebra");
  return TangentDirection::from_transported(h, moment_from(transported_ad(alg, h)));
}

struct ConvexityReport {
  std::vector<double> t;
  std::vector<double> profile;
  double min_second_difference = 0.0;
  double scale = 0.0;
};

// Samples F along the geodesic and requires every discrete second difference
// to be ≥ −1e−8·scale. The grid must be uniform.
inline ConvexityReport convexity_check(const LieAlgebra& alg, const MetricPoint& h, const TangentDirection& dir,
                                       const std::vector<double>& t_grid) {
  if (t_grid.size() < 3) throw PreconditionError("convexity_check needs at least three samples");
  ConvexityReport r;
  r.t = t_grid;
  for (double t : t_grid) r.profile.push_back(functional_F(alg, geodesic(h, dir, t)));
  for (double v : r.profile) r.scale = std::max(r.scale, std::abs(v));
  r.min_second_difference = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < r.profile.size(); ++i)
    r.min_second_difference = std::min(r.min_second_difference, r.profile[i - 1] - 2.0 * r.profile[i] + r.profile[i + 1]);
  if (r.min_second_difference < -1e-8 * std::max(r.scale, 1e-300))
    throw InvariantBreach("F is not convex along the geodesic: second difference " +
                          std::to_string(r.min_second_difference));
  return r;
}

struct FlowStep {
  double t = 0.0;
  MetricPoint h;
  double f = 0.0;
  double gradnorm = 0.0;
  double dist_to_start = 0.0;
};

struct FlowTrace {
  enum class Verdict { Minimum, Divergent, Inconclusive };
  std::vector<FlowStep> steps;
  Verdict verdict = Verdict::Inconclusive;
  std::optional<MetricPoint> minimum;             // set for Minimum
  std::optional<TangentDirection> direction;      // set for Divergent: unit direction at the start
  std::string note;

  const MetricPoint& start() const { return steps.front().h; }
  const FlowStep& last() const { return steps.back(); }
};

inline const char* to_string(FlowTrace::Verdict v) {
  switch (v) {
    case FlowTrace::Verdict::Minimum: return "minimum";
    case FlowTrace::Verdict::Divergent: return "divergent";
    case FlowTrace::Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

struct MinimizeOptions {
  enum class StepRule { Armijo, FixedTime };
  StepRule rule = StepRule::Armijo;
  double fixed_dt = 1e-3;      // continuous time per step for FixedTime
  int max_steps = 20000;
  // Minimum when ‖m‖ ≤ grad_tol·min(1, F): absolute for ordinary scales,
  // relative when F itself is small.
  double grad_tol = 1e-7;
  double divergence_radius = 25.0;
  int window = 10;
  double angular_tol = 1e-3;
  double max_step = 2.0;       // largest geodesic step length
  double armijo_c = 1e-4;
  std::function<void(const FlowStep&)> on_step;
};

// Continuous-time gradient flow, discretized by geodesic steps
// H ← geodesic(H, −m/‖m‖, δ) with time advancing by δ/‖m‖.
//
// The flow carries a factor H = AᵀA and the adjoint matrices in the frame of
// A. A step multiplies A by B = exp(X/2) and conjugates the adjoints by B,
// which is well conditioned, so F keeps its relative accuracy even when it
// has decayed far below the size of the structure constants.
inline FlowTrace minimize(const LieAlgebra& alg, const MetricPoint& h0, const MinimizeOptions& opts = {}) {
  if (h0.dim() != alg.dim()) throw PreconditionError("metric dimension does not match the algebra");
  if (opts.max_steps < 1) throw PreconditionError("max_steps must be at least 1");
  const int n = alg.dim();
  FlowTrace trace;

  MetricPoint h = h0;
  Matrix a = h0.sqrt();
  std::vector<Matrix> ad = transported_ad(alg, h);
  double f = functional_from(ad);
  Matrix m = moment_from(ad);
  double gnorm = m.norm();
  double t = 0.0;
  double tau = 1.0;  // step length per unit gradient norm, adapted
  std::vector<TangentDirection> recent;

  auto record = [&](double dist) {
    trace.steps.push_back(FlowStep{t, h, f, gnorm, dist});
    if (opts.on_step) opts.on_step(trace.steps.back());
  };
  record(0.0);

  struct Candidate {
    Matrix a;
    std::vector<Matrix> ad;
    double f = 0.0;
  };

  for (int step = 0; step < opts.max_steps; ++step) {
    if (gnorm <= opts.grad_tol * std::min(1.0, f)) {
      trace.verdict = FlowTrace::Verdict::Minimum;
      trace.minimum = h;
      return trace;
    }
    const Matrix dir = -m / gnorm;
    auto move = [&](double delta) {
      const SymEigen e = sym_eigen(0.5 * delta * dir);
      const Matrix b = compose(e, [](double x) { return std::exp(x); });
      const Matrix binv = compose(e, [](double x) { return std::exp(-x); });
      Candidate c{b * a, std::vector<Matrix>(ad.size()), 0.0};
      for (int i = 0; i < n; ++i) {
        Matrix mixed = Matrix::Zero(n, n);
        for (int j = 0; j < n; ++j) mixed += binv(j, i) * ad[static_cast<std::size_t>(j)];
        c.ad[static_cast<std::size_t>(i)] = b * mixed * binv;
      }
      c.f = functional_from(c.ad);
      return c;
    };

    double delta = 0.0;
    Candidate next;
    Matrix next_m;

    if (opts.rule == MinimizeOptions::StepRule::FixedTime) {
      delta = opts.fixed_dt * gnorm;
      next = move(delta);
      next_m = moment_from(next.ad);
    } else {
      tau *= 2.0;
      // Below this predicted decrease the change in F is lost in rounding and
      // acceptance falls back to a non-increasing gradient norm. It is also
      // the largest uphill move ever accepted.
      const double noise = 1e-12 * std::min(1.0, std::max(f, 1e-300));
      for (;;) {
        delta = std::min(tau * gnorm, opts.max_step);
        tau = delta / gnorm;
        if (delta < 1e-15) {
          if (gnorm <= std::sqrt(opts.grad_tol) * std::min(1.0, f)) {
            trace.verdict = FlowTrace::Verdict::Inconclusive;
            trace.note = "step size underflow near a critical point";
            return trace;
          }
          throw StalledFlow("no decrease of F at the smallest step (F = " + std::to_string(f) +
                            ", |grad| = " + std::to_string(gnorm) + ")");
        }
        Candidate cand = move(delta);
        const double predicted = opts.armijo_c * delta * gnorm;
        bool ok = false;
        Matrix cand_m;
        if (predicted > noise) {
          ok = cand.f <= f - predicted;
          if (ok) cand_m = moment_from(cand.ad);
        } else {
          cand_m = moment_from(cand.ad);
          ok = cand.f <= f + noise && cand_m.norm() <= gnorm;
        }
        if (ok) {
          next = std::move(cand);
          next_m = std::move(cand_m);
          break;
        }
        tau *= 0.5;
      }
    }

    t += delta / gnorm;
    a = std::move(next.a);
    ad = std::move(next.ad);
    f = next.f;
    m = std::move(next_m);
    gnorm = m.norm();
    // log H from the rows of A, which carry its grading.
    h = MetricPoint::from_log(graded_gram_log(a.transpose(), Vector::Zero(n)));
    const double dist = distance(h0, h);
    record(dist);

    if (dist > 0.0) {
      recent.push_back(theta(h0, h));
      if (static_cast<int>(recent.size()) > opts.window) recent.erase(recent.begin());
    }
    if (dist > opts.divergence_radius && static_cast<int>(recent.size()) == opts.window) {
      double spread = 0.0;
      for (const auto& d : recent) spread = std::max(spread, angle_between(d, recent.back()));
      if (spread <= opts.angular_tol) {
        trace.verdict = FlowTrace::Verdict::Divergent;
        trace.direction = recent.back();
        return trace;
      }
    }
    if (dist > 3.0 * opts.divergence_radius) {
      trace.note = "left the trusted region without a settled direction";
      return trace;
    }
  }
  trace.note = "step budget exhausted";
  return trace;
}

struct ContractionReport {
  std::vector<double> t;
  std::vector<double> distance;
  double initial = 0.0;
  double max_excess = 0.0;  // max over steps of d(t) − d(0) − slack·t
  bool passed = false;
};

// Largest ‖g[e_i,e_j] − [ge_i, ge_j]‖.
inline double automorphism_residual(const LieAlgebra& alg, const Matrix& g) {
  double worst = 0.0;
  const int n = alg.dim();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const Vector ei = Vector::Unit(n, i), ej = Vector::Unit(n, j);
      worst = std::max(worst, (g * bracket(alg, ei, ej) - bracket(alg, g.col(i), g.col(j))).norm());
    }
  return worst;
}

// Two fixed-time flows from H0 and gᵀH0g for an automorphism g; their
// distance may not grow beyond d(0) + slack·t.
inline ContractionReport equivariance_contraction_test(const LieAlgebra& alg, const MetricPoint& h0, const Matrix& g,
                                                       int steps, double dt = 1e-3, double slack = 1e-6,
                                                       double tol = 1e-9) {
  const double scale = std::max(1.0, alg.max_abs_constant()) * std::max(1.0, g.norm() * g.norm());
  if (automorphism_residual(alg, g) > tol * scale) throw PreconditionError("g is not an automorphism of the algebra");
  MinimizeOptions opts;
  opts.rule = MinimizeOptions::StepRule::FixedTime;
  opts.fixed_dt = dt;
  opts.max_steps = steps;
  opts.grad_tol = 0.0;
  opts.divergence_radius = std::numeric_limits<double>::infinity();

  const FlowTrace a = minimize(alg, h0, opts);
  const FlowTrace b = minimize(alg, h0.pulled_back(g), opts);
  ContractionReport r;
  const std::size_t count = std::min(a.steps.size(), b.steps.size());
  for (std::size_t k = 0; k < count; ++k) {
    r.t.push_back(a.steps[k].t);
    r.distance.push_back(distance(a.steps[k].h, b.steps[k].h));
  }
  r.initial = r.distance.front();
  r.max_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < count; ++k)
    r.max_excess = std::max(r.max_excess, r.distance[k] - r.initial - slack * r.t[k]);
  r.passed = r.max_excess <= 1e-12;
  return r;
}

struct Destabilization {
  WeightedFlag flag;                        // flag of S∞ in start-orthonormal coordinates
  std::vector<LinearSubspace> candidates;   // reversed-chain subspaces, original coordinates
  std::vector<double> candidate_residuals;
  std::vector<LinearSubspace> ideals;       // certified proper ideals
};

// Ideals from the point at infinity of a divergent flow. Aut(g) fixes the
// ray under H ↦ gᵀHg, so the invariant subspaces come from the flag of −S∞:
// sums of eigenspaces taken in increasing-weight order. Each candidate is
// certified with is_ideal.
inline Destabilization destabilize(const LieAlgebra& alg, const FlowTrace& trace, double gap_tol = 1e-6,
                                   double tol = 1e-9) {
  if (trace.verdict != FlowTrace::Verdict::Divergent || !trace.direction)
    throw PreconditionError("destabilize needs a divergent flow");
  const MetricPoint& h0 = trace.start();
  const int n = alg.dim();
  const TangentDirection at_identity =
      TangentDirection::from_transported(MetricPoint::identity(n), trace.direction->transported());
  Destabilization out{flag_of_direction(at_identity, gap_tol), {}, {}, {}};

  // Transported coordinates v ↦ P0·v; map subspaces back with P0⁻¹.
  const Matrix back = h0.inv_sqrt();
  const Matrix& basis = out.flag.eigenbasis;
  int taken = 0;
  for (std::size_t b = out.flag.multiplicities.size() - 1; b >= 1; --b) {
    taken += out.flag.multiplicities[b];
    LinearSubspace cand(back * basis.rightCols(taken));
    const IdealCheck check = is_ideal(alg, cand, tol);
    out.candidates.push_back(cand);
    out.candidate_residuals.push_back(check.residual);
    if (check.is_ideal) out.ideals.push_back(std::move(cand));
  }
  return out;
}

}  // namespace bracketflow
