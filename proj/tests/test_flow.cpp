#include "support.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>

using namespace bracketflow;
using namespace testing_support;

namespace {

Matrix diag(std::initializer_list<double> v) {
  Vector d(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) d(i++) = x;
  return d.asDiagonal();
}

// F from its definition: an H-orthonormal basis u_a = g e_a with gᵀHg = I,
// rotated by a random orthogonal matrix, and Σ_{a<b} |[u_a,u_b]|²_H.
double functional_oracle(const LieAlgebra& alg, const MetricPoint& h, std::mt19937_64& rng) {
  const int n = alg.dim();
  const Matrix o = Eigen::HouseholderQR<Matrix>(random_gaussian(n, n, rng)).householderQ();
  const Matrix g = h.inv_sqrt() * o;
  double f = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      const Vector v = bracket(alg, g.col(a), g.col(b));
      f += v.dot(h.matrix() * v);
    }
  return f;
}

// Scaling and squaring with a truncated Taylor series.
Matrix matrix_exp(const Matrix& a) {
  int squarings = 0;
  double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  while (norm > 0.25) {
    norm /= 2;
    ++squarings;
  }
  const Matrix b = a / std::ldexp(1.0, squarings);
  Matrix term = Matrix::Identity(a.rows(), a.cols()), sum = term;
  for (int k = 1; k <= 20; ++k) {
    term = term * b / k;
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

const FlowTrace& cached_flow(const std::string& name) {
  static std::map<std::string, FlowTrace> cache;
  auto it = cache.find(name);
  if (it == cache.end()) {
    const LieAlgebra alg = corpus(name);
    it = cache.emplace(name, minimize(alg, MetricPoint::identity(alg.dim()))).first;
  }
  return it->second;
}

// Chevalley involution X ↦ −Xᵀ written in a matrix basis.
Matrix chevalley(const std::vector<Matrix>& basis) {
  const auto d = static_cast<Eigen::Index>(basis.size());
  Matrix coords(basis.front().size(), d);
  for (Eigen::Index i = 0; i < d; ++i) coords.col(i) = basis[std::size_t(i)].reshaped();
  Matrix out(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    out.col(i) = coords.colPivHouseholderQr().solve(Vector((-basis[std::size_t(i)].transpose()).reshaped()));
  return out;
}

}  // namespace

TEST(Functional, ClosedForms) {
  const LieAlgebra heis = corpus("heisenberg");
  EXPECT_NEAR(functional_F(heis, MetricPoint::identity(3)), 1.0, 1e-15);
  for (double t : {-1.0, 0.3, 2.0})
    EXPECT_NEAR(functional_F(heis, MetricPoint(matrix_exp(t * diag({1, 1, -2})))), std::exp(-4 * t), 1e-13 * std::exp(-4 * t));
  std::mt19937_64 rng(40);
  EXPECT_EQ(functional_F(corpus("abelian2"), random_metric(2, rng)), 0.0);
  EXPECT_THROW(functional_F(heis, MetricPoint::identity(2)), PreconditionError);
}

TEST(Functional, MatchesDefinitionAndIsPositive) {
  std::mt19937_64 rng(42);
  for (const auto& name : real_corpus()) {
    const LieAlgebra alg = corpus(name);
    for (int t = 0; t < 5; ++t) {
      const MetricPoint h = random_metric(alg.dim(), rng);
      const double f = functional_F(alg, h);
      EXPECT_NEAR(f, functional_oracle(alg, h, rng), 1e-11 * std::max(1.0, f)) << name;
      if (name != "abelian2") {
        EXPECT_GT(f, 0.0) << name;
      }
    }
  }
}

TEST(Functional, AutomorphismInvariance) {
  std::mt19937_64 rng(44);
  Matrix shear = Matrix::Identity(3, 3);
  shear(2, 0) = 1.0;  // x ↦ x + z
  std::vector<std::pair<std::string, Matrix>> cases{{"heisenberg", shear}, {"heisenberg", diag({2, 0.5, 1})}};
  for (const auto& name : simple_corpus()) {
    const LieAlgebra alg = corpus(name);
    cases.emplace_back(name, matrix_exp(ad_matrix(alg, 0.7 * random_vector(alg.dim(), rng))));
  }
  for (const auto& [name, g] : cases) {
    const LieAlgebra alg = corpus(name);
    ASSERT_LE(automorphism_residual(alg, g), 1e-10) << name;
    for (int t = 0; t < 5; ++t) {
      const MetricPoint h = random_metric(alg.dim(), rng);
      EXPECT_NEAR(functional_F(alg, h.pulled_back(g)), functional_F(alg, h), 1e-9 * std::max(1.0, functional_F(alg, h))) << name;
    }
  }
}

TEST(Gradient, HeisenbergAtIdentity) {
  const TangentDirection m = gradient(corpus("heisenberg"), MetricPoint::identity(3));
  // d/dt e^{−4t} = −4 along diag(1,1,−2) fixes the scale: m = diag(−2/3, −2/3, 4/3).
  EXPECT_LE((m.transported() - diag({-2.0 / 3, -2.0 / 3, 4.0 / 3})).norm(), 1e-14);
  const Matrix target = diag({-4.0 / 3, -4.0 / 3, 8.0 / 3});
  EXPECT_NEAR(std::abs(m.transported().cwiseProduct(target).sum()) / (m.norm() * target.norm()), 1.0, 1e-14);
  std::mt19937_64 rng(46);
  EXPECT_EQ(gradient(corpus("abelian2"), random_metric(2, rng)).norm(), 0.0);
}

TEST(Gradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(48);
  const auto names = real_corpus();
  for (int t = 0; t < 50; ++t) {
    const LieAlgebra alg = change_basis(corpus(names[std::size_t(t) % names.size()]), random_sl(corpus(names[std::size_t(t) % names.size()]).dim(), rng, 0.2));
    const int n = alg.dim();
    const MetricPoint h = random_metric(n, rng);
    const TangentDirection xi = TangentDirection::from_transported(h, random_trace_free_symmetric(n, 1.0, rng));
    const double eps = 1e-5;
    const double fd = (functional_F(alg, geodesic(h, xi, eps)) - functional_F(alg, geodesic(h, xi, -eps))) / (2 * eps);
    const double analytic = inner(gradient(alg, h), xi);
    EXPECT_NEAR(analytic, fd, 1e-5 * std::max(1e-3, std::abs(fd)) + 1e-9 * functional_F(alg, h)) << "sample " << t;
  }
}

TEST(Convexity, HeisenbergRayClosedForm) {
  const LieAlgebra heis = corpus("heisenberg");
  const MetricPoint id = MetricPoint::identity(3);
  const TangentDirection dir(id, diag({1, 1, -2}) / std::sqrt(6.0));
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(-2.0 + 0.25 * i);
  const ConvexityReport r = convexity_check(heis, id, dir, grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    EXPECT_NEAR(r.profile[i], std::exp(-4 * grid[i] / std::sqrt(6.0)), 1e-12 * r.profile[i]);
  EXPECT_GT(r.min_second_difference, 0.0);
  EXPECT_THROW(convexity_check(heis, id, dir, {0.0, 1.0}), PreconditionError);
}

TEST(Convexity, AbelianIsZero) {
  const ConvexityReport r = convexity_check(corpus("abelian2"), MetricPoint::identity(2),
                                            TangentDirection(MetricPoint::identity(2), diag({1, -1})), {0.0, 1.0, 2.0});
  for (double v : r.profile) EXPECT_EQ(v, 0.0);
}

TEST(Convexity, ConstantAlongAutomorphismOrbit) {
  // At the optimal metric of sl(2,R), ad_x for x in p is H*-symmetric; the
  // geodesic with direction P·ad_x·P⁻¹ is the orbit H*·exp(2t·ad_x) of the
  // automorphisms exp(t·ad_x).
  const LieAlgebra sl2 = corpus("sl2R");
  const FlowTrace& flow = cached_flow("sl2R");
  ASSERT_TRUE(flow.minimum);
  const MetricPoint& hs = *flow.minimum;
  const CartanSplit s = split(sl2, hs);
  const Matrix adx = ad_matrix(sl2, s.p.basis().col(0));
  const TangentDirection dir = TangentDirection::from_transported(hs, hs.sqrt() * adx * hs.inv_sqrt());
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(-1.0 + 0.1 * i);
  const ConvexityReport r = convexity_check(sl2, hs, dir, grid);
  const double f0 = functional_F(sl2, hs);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_NEAR(r.profile[i], f0, 1e-9 * f0);
    const Matrix g = matrix_exp(grid[i] * adx);
    EXPECT_NEAR(functional_F(sl2, hs.pulled_back(g)), f0, 1e-9 * f0);
  }
}

TEST(Convexity, RandomGeodesicsOnCorpus) {
  std::mt19937_64 rng(50);
  for (const auto& name : real_corpus()) {
    const LieAlgebra alg = corpus(name);
    for (int t = 0; t < 10; ++t) {
      const MetricPoint h = random_metric(alg.dim(), rng);
      const TangentDirection dir = TangentDirection::from_transported(h, random_trace_free_symmetric(alg.dim(), 1.0, rng));
      std::vector<double> grid;
      for (int i = 0; i <= 30; ++i) grid.push_back(-1.5 + 0.1 * i);
      EXPECT_NO_THROW(convexity_check(alg, h, dir, grid)) << name;
    }
  }
}

TEST(Minimize, Sl2RConvergesFromIdentity) {
  const FlowTrace& flow = cached_flow("sl2R");
  ASSERT_EQ(flow.verdict, FlowTrace::Verdict::Minimum) << flow.note;
  EXPECT_LE(gradient(corpus("sl2R"), *flow.minimum).norm(), 1e-7);
  // Der(sl2) = ad(sl2) is closed under the H*-transpose.
  EXPECT_LE(transpose_closure_residual(*flow.minimum, derivations(corpus("sl2R"))), 1e-6);
}

TEST(Minimize, Su2StartsAtItsMinimum) {
  const LieAlgebra su2 = corpus("su2");
  EXPECT_LE(gradient(su2, MetricPoint::identity(3)).norm(), 1e-15);
  const FlowTrace& flow = cached_flow("su2");
  ASSERT_EQ(flow.verdict, FlowTrace::Verdict::Minimum);
  EXPECT_EQ(flow.steps.size(), 1u);
  EXPECT_EQ(flow.minimum->matrix(), Matrix::Identity(3, 3));
  EXPECT_DOUBLE_EQ(flow.last().f, 3.0);
}

TEST(Minimize, HeisenbergDiverges) {
  const FlowTrace& flow = cached_flow("heisenberg");
  ASSERT_EQ(flow.verdict, FlowTrace::Verdict::Divergent) << flow.note;
  const TangentDirection expected(MetricPoint::identity(3), diag({1, 1, -2}) / std::sqrt(6.0));
  EXPECT_LE(angle_between(*flow.direction, expected), 1e-3);
  EXPECT_GT(flow.last().dist_to_start, 25.0);
}

TEST(Minimize, TracesDescendWithIncreasingTime) {
  std::mt19937_64 rng(52);
  for (const auto& name : real_corpus()) {
    const LieAlgebra alg = corpus(name);
    const FlowTrace flow = minimize(alg, random_metric(alg.dim(), rng));
    for (std::size_t k = 1; k < flow.steps.size(); ++k) {
      EXPECT_LE(flow.steps[k].f, flow.steps[k - 1].f + 1e-12) << name << " step " << k;
      EXPECT_GT(flow.steps[k].t, flow.steps[k - 1].t) << name << " step " << k;
    }
    EXPECT_NE(flow.verdict, FlowTrace::Verdict::Inconclusive) << name << ": " << flow.note;
  }
}

TEST(Minimize, FixedTimeRuleAndBudget) {
  const LieAlgebra sl2 = corpus("sl2R");
  MinimizeOptions opts;
  opts.rule = MinimizeOptions::StepRule::FixedTime;
  opts.fixed_dt = 0.01;
  const FlowTrace fixed = minimize(sl2, MetricPoint::identity(3), opts);
  EXPECT_EQ(fixed.verdict, FlowTrace::Verdict::Minimum);
  EXPECT_NEAR(fixed.last().f, cached_flow("sl2R").last().f, 1e-9 * fixed.last().f);

  opts = {};
  opts.max_steps = 3;
  const FlowTrace short_run = minimize(sl2, MetricPoint::identity(3), opts);
  EXPECT_EQ(short_run.verdict, FlowTrace::Verdict::Inconclusive);
  EXPECT_EQ(short_run.note, "step budget exhausted");

  int seen = 0;
  opts = {};
  opts.on_step = [&](const FlowStep&) { ++seen; };
  const FlowTrace observed = minimize(sl2, MetricPoint::identity(3), opts);
  EXPECT_EQ(seen, static_cast<int>(observed.steps.size()));
  EXPECT_THROW(minimize(sl2, MetricPoint::identity(2)), PreconditionError);
}

TEST(Minimize, RecordedValuesMatchDirectEvaluation) {
  std::mt19937_64 rng(53);
  for (const std::string name : {"heisenberg", "sl3R", "solvable2"}) {
    const LieAlgebra alg = change_basis(corpus(name), random_sl(corpus(name).dim(), rng, 0.3));
    const FlowTrace flow = minimize(alg, random_metric(alg.dim(), rng));
    for (const FlowStep& s : flow.steps) {
      const Vector& ev = s.h.eigen().values;
      if (ev.maxCoeff() / ev.minCoeff() > 1e6) continue;
      EXPECT_NEAR(s.f, functional_F(alg, s.h), 1e-8 * s.f) << name << " t = " << s.t;
      EXPECT_NEAR(s.gradnorm, gradient(alg, s.h).norm(), 1e-8 * s.gradnorm + 1e-13 * s.f) << name;
    }
  }
}

TEST(Minimize, FarDivergentFlowsKeepRelativeAccuracy) {
  // Along the heisenberg ray F = e^{−4d/√6}, far below rounding of the constants.
  const FlowTrace& flow = cached_flow("heisenberg");
  for (const FlowStep& s : flow.steps)
    EXPECT_NEAR(s.f, std::exp(-4 * s.dist_to_start / std::sqrt(6.0)), 1e-9 * s.f) << "d = " << s.dist_to_start;
  EXPECT_LT(flow.last().f, 1e-16);
}

TEST(MetricFromLog, KeepsSmallEigenvalues) {
  const Matrix l = diag({30, -10, -20});
  const MetricPoint h = MetricPoint::from_log(l);
  EXPECT_NEAR(h.eigen().values(0), std::exp(-20.0), 1e-15 * std::exp(-20.0));
  EXPECT_NEAR(distance(MetricPoint::identity(3), h), l.norm(), 1e-12);
  std::mt19937_64 rng(55);
  const Matrix s = random_trace_free_symmetric(4, 2.0, rng);
  EXPECT_LE((MetricPoint::from_log(s).matrix() - sym_exp(s)).norm(), 1e-12 * sym_exp(s).norm());
}

TEST(Contraction, IdentityAutomorphism) {
  std::mt19937_64 rng(54);
  const LieAlgebra heis = corpus("heisenberg");
  const ContractionReport r = equivariance_contraction_test(heis, random_metric(3, rng), Matrix::Identity(3, 3), 200);
  for (double d : r.distance) EXPECT_LE(d, 1e-12);
  EXPECT_TRUE(r.passed);
}

TEST(Contraction, HeisenbergShearAndSl2Rotation) {
  std::mt19937_64 rng(56);
  Matrix shear = Matrix::Identity(3, 3);
  shear(2, 0) = 1.0;
  const ContractionReport heis = equivariance_contraction_test(corpus("heisenberg"), random_metric(3, rng), shear, 2000);
  EXPECT_TRUE(heis.passed) << heis.max_excess;
  EXPECT_GT(heis.initial, 0.0);

  const LieAlgebra sl2 = corpus("sl2R");
  const Matrix rot = matrix_exp(0.8 * ad_matrix(sl2, Vector::Unit(3, 1) - Vector::Unit(3, 2)));
  const ContractionReport s = equivariance_contraction_test(sl2, random_metric(3, rng), rot, 4000, 2e-3);
  EXPECT_TRUE(s.passed) << s.max_excess;
  EXPECT_LT(s.distance.back(), s.initial);

  Matrix not_auto = Matrix::Identity(3, 3);
  not_auto(0, 1) = 1.0;
  EXPECT_THROW(equivariance_contraction_test(sl2, MetricPoint::identity(3), not_auto, 10), PreconditionError);
}

TEST(Invariance, FiniteAutomorphismGroupsArePreserved) {
  std::mt19937_64 rng(58);
  struct Case {
    std::string name;
    Matrix g;
  };
  Matrix cyc = Matrix::Zero(3, 3);
  cyc(1, 0) = cyc(2, 1) = cyc(0, 2) = 1.0;  // e1 → e2 → e3 → e1
  const std::vector<Case> cases{{"sl2R", chevalley(sl2_matrices())},
                                {"sl3R", chevalley(sl3_matrices())},
                                {"su2", cyc},
                                {"heisenberg", diag({-1, 1, -1})}};
  for (const auto& c : cases) {
    const LieAlgebra alg = corpus(c.name);
    ASSERT_LE(automorphism_residual(alg, c.g), 1e-12) << c.name;
    ASSERT_LE((c.g * c.g * c.g * c.g * c.g * c.g - Matrix::Identity(alg.dim(), alg.dim())).norm(), 1e-12) << c.name;
    // Average a random metric over the group generated by g.
    const MetricPoint seed = random_metric(alg.dim(), rng);
    Matrix sum = Matrix::Zero(alg.dim(), alg.dim());
    Matrix power = Matrix::Identity(alg.dim(), alg.dim());
    for (int k = 0; k < 6; ++k, power = power * c.g) sum += power.transpose() * seed.matrix() * power;
    const MetricPoint h0(sum);
    MinimizeOptions opts;
    double worst = 0.0;
    opts.on_step = [&](const FlowStep& s) {
      worst = std::max(worst, (c.g.transpose() * s.h.matrix() * c.g - s.h.matrix()).norm());
    };
    const FlowTrace flow = minimize(alg, h0, opts);
    EXPECT_LE(worst, 1e-7) << c.name;
    if (flow.minimum) {
      EXPECT_LE((c.g.transpose() * flow.minimum->matrix() * c.g - flow.minimum->matrix()).norm(), 1e-7);
    }
  }
}

TEST(Destabilize, HeisenbergCenter) {
  const LieAlgebra heis = corpus("heisenberg");
  const FlowTrace& flow = cached_flow("heisenberg");
  const Destabilization d = destabilize(heis, flow);
  EXPECT_EQ(d.flag.multiplicities, (std::vector<int>{2, 1}));
  EXPECT_NEAR(d.flag.weight_sum(), 0.0, 1e-10);
  EXPECT_NEAR(d.flag.weight_square_sum(), 1.0, 1e-10);
  ASSERT_EQ(d.ideals.size(), 1u);
  EXPECT_EQ(d.ideals[0].dim(), 1);
  EXPECT_LE(d.ideals[0].residual(Vector::Unit(3, 2)), 1e-6);
  // The forward chain's first subspace span(x, y) is not an ideal.
  EXPECT_FALSE(is_ideal(heis, d.flag.subspaces[0], 1e-6).is_ideal);
}

TEST(Destabilize, SolvableAndBasisChanges) {
  const LieAlgebra solv = corpus("solvable2");
  const FlowTrace& flow = cached_flow("solvable2");
  ASSERT_EQ(flow.verdict, FlowTrace::Verdict::Divergent) << flow.note;
  const Destabilization d = destabilize(solv, flow);
  ASSERT_EQ(d.ideals.size(), 1u);
  EXPECT_LE(d.ideals[0].residual(Vector::Unit(2, 1)), 1e-6);

  std::mt19937_64 rng(60);
  for (const std::string name : {"heisenberg", "solvable2"}) {
    for (int t = 0; t < 3; ++t) {
      const LieAlgebra alg = change_basis(corpus(name), random_sl(corpus(name).dim(), rng, 0.3));
      const FlowTrace f = minimize(alg, random_metric(alg.dim(), rng));
      ASSERT_EQ(f.verdict, FlowTrace::Verdict::Divergent) << name << ": " << f.note;
      const Destabilization dd = destabilize(alg, f);
      EXPECT_GE(dd.ideals.size(), 1u) << name;
      for (const auto& u : dd.ideals) {
        EXPECT_TRUE(is_ideal(alg, u, 1e-9).is_ideal);
        EXPECT_LT(u.dim(), alg.dim());
      }
    }
  }
}

TEST(Destabilize, NeedsADivergentFlow) {
  EXPECT_THROW(destabilize(corpus("sl2R"), cached_flow("sl2R")), PreconditionError);
}

// ---- Cartan ----

TEST(Split, Su2AtIdentity) {
  const LieAlgebra su2 = corpus("su2");
  const CartanSplit s = split(su2, MetricPoint::identity(3));
  EXPECT_EQ(s.k.dim(), 3);
  EXPECT_EQ(s.p.dim(), 0);
  EXPECT_LE((s.theta - Matrix::Identity(3, 3)).norm(), 1e-12);
  const Classification c = classify(su2, s);
  EXPECT_TRUE(c.compact);
  EXPECT_NEAR(c.killing_max_on_k, -2.0, 1e-12);
  EXPECT_LE(check_inclusions(su2, s).worst(), 1e-14);
}

TEST(Split, Sl2RMatchesClassicalDecomposition) {
  const LieAlgebra sl2 = corpus("sl2R");
  const CartanSplit s = split(sl2, *cached_flow("sl2R").minimum);
  const ClassicalSplit oracle = classical_split(sl2_matrices());
  EXPECT_EQ(oracle.dim_k, 1);
  EXPECT_EQ(oracle.dim_p, 2);
  EXPECT_EQ(s.k.dim(), oracle.dim_k);
  EXPECT_EQ(s.p.dim(), oracle.dim_p);
  // The flow from I keeps the symmetry X ↦ −Xᵀ, so k is spanned by e − f.
  EXPECT_LE(s.k.residual(Vector::Unit(3, 1) - Vector::Unit(3, 2)), 1e-6);
  EXPECT_LE(check_inclusions(sl2, s).worst(), 1e-8);
  const Classification c = classify(sl2, s);
  EXPECT_FALSE(c.compact);
  EXPECT_LT(c.killing_max_on_k, 0.0);
  EXPECT_GT(c.killing_min_on_p, 0.0);
}

TEST(Split, HeisenbergHasNoCriticalPoint) {
  EXPECT_THROW(split(corpus("heisenberg"), MetricPoint::identity(3)), PreconditionError);
}

TEST(Split, InvariantsOnConvergingCorpus) {
  for (const std::string name : {"sl2R", "su2", "so3", "sl3R", "su3", "sl2R+sl2R"}) {
    const LieAlgebra alg = corpus(name);
    const FlowTrace& flow = cached_flow(name);
    ASSERT_TRUE(flow.minimum) << name;
    const CartanSplit s = split(alg, *flow.minimum);
    EXPECT_LE(s.theta_square_residual, 1e-6) << name;
    EXPECT_LE(involution_residual(alg, s), 1e-5) << name;
    EXPECT_EQ(s.k.dim() + s.p.dim(), alg.dim());
    Matrix both(alg.dim(), alg.dim());
    both << s.k.basis(), s.p.basis();
    EXPECT_EQ(Eigen::FullPivLU<Matrix>(both).rank(), alg.dim()) << name;
    const Classification c = classify(alg, s);
    EXPECT_LE(c.killing_cross, 1e-6 * std::max(1.0, killing_form(alg).matrix.cwiseAbs().maxCoeff())) << name;
    EXPECT_EQ(s.killing.negative, s.k.dim()) << name;
    EXPECT_EQ(s.killing.positive, s.p.dim()) << name;
    EXPECT_EQ(s.killing.zero, 0) << name;
  }
}

TEST(Split, Sl3RAgainstClassicalOracle) {
  const ClassicalSplit oracle = classical_split(sl3_matrices());
  EXPECT_EQ(oracle.dim_k, 3);
  EXPECT_EQ(oracle.dim_p, 5);
  const CartanSplit s = split(corpus("sl3R"), *cached_flow("sl3R").minimum);
  EXPECT_EQ(s.k.dim(), oracle.dim_k);
  EXPECT_EQ(s.p.dim(), oracle.dim_p);
}

TEST(Inclusions, CorruptedSplitFails) {
  const LieAlgebra sl3 = corpus("sl3R");
  CartanSplit s = split(sl3, *cached_flow("sl3R").minimum);
  Matrix k = s.k.basis(), p = s.p.basis();
  k.col(0).swap(p.col(0));
  s.k = LinearSubspace(k);
  s.p = LinearSubspace(p);
  EXPECT_GT(inclusion_residuals(sl3, s).worst(), 1e-3);
  EXPECT_THROW(check_inclusions(sl3, s), InvariantBreach);
}

TEST(CompactForm, Sl2CRealified) {
  const Realification r = realify(complex_corpus("sl2C"));
  const FlowTrace flow = minimize(r.algebra, MetricPoint::identity(6));
  ASSERT_EQ(flow.verdict, FlowTrace::Verdict::Minimum);
  const CartanSplit s = split(r.algebra, *flow.minimum);
  const CompactFormReport cf = check_compact_form(r.algebra, r.j, s);
  EXPECT_TRUE(cf.passed) << cf.failure;
  EXPECT_EQ(cf.dim_k, 3);
  EXPECT_EQ(cf.dim_p, 3);
  EXPECT_LE(std::max(cf.jk_in_p, cf.jp_in_k), 1e-6);
  const Classification c = classify(r.algebra, s);
  EXPECT_FALSE(c.compact);
  EXPECT_LT(c.killing_max_on_k, 0.0);
  // k is a compact form: its own Killing form is negative definite.
  EXPECT_TRUE(check_compact_form(r.algebra, s).passed);

  std::mt19937_64 rng(62);
  CartanSplit bad = s;
  bad.k = LinearSubspace(random_gaussian(6, 3, rng));
  const CompactFormReport f = check_compact_form(r.algebra, r.j, bad);
  EXPECT_FALSE(f.passed);
  EXPECT_NE(f.failure.find("J(k)"), std::string::npos) << f.failure;
}

TEST(CompactForm, NeedsAComplexStructure) {
  const LieAlgebra su2 = corpus("su2");
  const CartanSplit s = split(su2, MetricPoint::identity(3));
  EXPECT_THROW(check_compact_form(su2, s), PreconditionError);
}

TEST(Reports, SplitSerializes) {
  const CartanSplit s = split(corpus("su2"), MetricPoint::identity(3));
  const json j = to_json(s);
  EXPECT_EQ(j["dim_k"], 3);
  EXPECT_EQ(j["killing_signature"]["negative"], 3);
  EXPECT_TRUE(j["residuals"].contains("theta_square"));
}
