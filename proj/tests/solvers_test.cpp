#include "convexcorr/solvers.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace convexcorr;

namespace {

Vector vec1(double a) {
  Vector v(1);
  v << a;
  return v;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

// 1-d instance: X1 = R, X2 = X3 = {0}, L = (1).
ProblemInstance instance_1d(const BuiltinFn& b, NormPair np = NormPair::l2()) {
  StructuredPhi sp(Subspace::full(1), Subspace::trivial(1), Subspace::trivial(1), b.fn,
                   *b.minimizer);
  return ProblemInstance(sp, LinearMap::identity(1), np);
}

ProblemInstance gdemo() { return instance_1d(make_piecewise_gdemo()); }
ProblemInstance remark2() { return instance_1d(make_piecewise_remark2(-4.0)); }
ProblemInstance burg() { return instance_1d(make_burg_shift()); }

// 2-d instance: quadratic phi on X1 = span{e1} with minimizer 4, X2 = span{e2},
// L = identity; c = 4, d = 4, g(tau) = 4 - tau.
ProblemInstance quad2d() {
  BuiltinFn q = make_quadratic(Matrix::Identity(1, 1), vec1(4.0));
  StructuredPhi sp(Subspace::coordinate_span(2, {0}), Subspace::coordinate_span(2, {1}),
                   Subspace::trivial(2), q.fn, *q.minimizer);
  return ProblemInstance(sp, LinearMap::identity(2), NormPair::l2());
}

}  // namespace

TEST(ProblemInstance, HypothesisViolationsAreRejected) {
  // X2 ∩ N(L) nontrivial: L = [[1, 1]] kills e2 - e1... use L = [1 0]: N(L) = span{e2} = X2.
  BuiltinFn q = make_quadratic(Matrix::Identity(1, 1), vec1(4.0));
  StructuredPhi sp(Subspace::coordinate_span(2, {0}), Subspace::coordinate_span(2, {1}),
                   Subspace::trivial(2), q.fn, *q.minimizer);
  Matrix l(1, 2);
  l << 1.0, 0.0;
  EXPECT_THROW(ProblemInstance(sp, LinearMap(l), NormPair::l2()), InvariantViolation);

  // argmin Phi meets N(L): minimizer at the origin.
  BuiltinFn q0 = make_quadratic(Matrix::Identity(1, 1), vec1(0.0));
  StructuredPhi sp0(Subspace::full(1), Subspace::trivial(1), Subspace::trivial(1), q0.fn,
                    *q0.minimizer);
  EXPECT_THROW(ProblemInstance(sp0, LinearMap::identity(1), NormPair::l2()), InvariantViolation);
}

TEST(SolvePenalized, Remark2Table) {
  ProblemInstance pi = remark2();
  SolveReport r1 = solve_penalized(pi, 1.0);
  ASSERT_TRUE(r1.converged);
  EXPECT_NEAR(r1.minimizer(0), 1.5, 1e-6);  // 2 - lambda/2

  SolveReport r5 = solve_penalized(pi, 5.0);
  ASSERT_TRUE(r5.converged);
  EXPECT_NEAR(r5.minimizer(0), 0.0, 1e-6);

  SolveReport r0 = solve_penalized(pi, 0.0);
  ASSERT_TRUE(r0.converged);
  EXPECT_NEAR(r0.minimizer(0), 2.0, 1e-12);  // canonical representative of argmin Phi
}

TEST(SolveConstrained, ClosedFormValues) {
  SolveReport r = solve_constrained(remark2(), 1.0);
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.minimizer(0), 1.0, 1e-6);

  SolveReport g = solve_constrained(gdemo(), 2.5);
  ASSERT_TRUE(g.converged);
  EXPECT_NEAR(g.minimizer(0), 2.5, 1e-6);

  // tau >= c: solutions saturate into argmin Phi
  SolveReport sat = solve_constrained(gdemo(), 5.0);
  ASSERT_TRUE(sat.converged);
  EXPECT_NEAR(sat.minimizer(0), 3.0, 1e-6);
  EXPECT_NEAR(sat.dual_norm, 0.0, 1e-8);
}

TEST(SolveDualPenalized, GdemoDualNorms) {
  SolveReport r = solve_dual_penalized(gdemo(), 1.0);
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.dual_norm, 6.0, 1e-6);  // g(1) = 2(4-1)

  SolveReport sat = solve_dual_penalized(gdemo(), 5.0);
  ASSERT_TRUE(sat.converged);
  EXPECT_NEAR(sat.dual_norm, 0.0, 1e-8);

  SolveReport rm = solve_dual_penalized(remark2(), 1.0);
  ASSERT_TRUE(rm.converged);
  EXPECT_GE(rm.dual_norm, 2.0 - 1e-6);  // Lagrange multiplier interval [2, 4]
  EXPECT_LE(rm.dual_norm, 4.0 + 1e-6);
}

TEST(SolveDualPenalized, BurgAtTauZeroIsDualUnbounded) {
  EXPECT_THROW(solve_dual_penalized(burg(), 0.0), DualUnbounded);
}

TEST(SolveDualPenalized, GdemoAtTauZeroFindsDualArgmin) {
  SolveReport r = solve_dual_penalized(gdemo(), 0.0);
  EXPECT_NEAR(r.dual_norm, 8.0, 1e-5);
}

TEST(SolveDualConstrained, Examples) {
  SolveReport r0 = solve_dual_constrained(gdemo(), 0.0);
  EXPECT_NEAR(r0.dual_norm, 0.0, 0.0);

  // lambda >= d = 8: dual solutions reach the dual argmin {8}
  SolveReport r10 = solve_dual_constrained(gdemo(), 10.0);
  ASSERT_TRUE(r10.converged);
  EXPECT_NEAR(r10.dual_norm, 8.0, 1e-6);

  // lambda = 6 = g(1): recovered primal is 1
  SolveReport r6 = solve_dual_constrained(gdemo(), 6.0);
  ASSERT_TRUE(r6.converged);
  ASSERT_TRUE(r6.recovered_primal.has_value());
  EXPECT_NEAR((*r6.recovered_primal)(0), 1.0, 1e-6);
  EXPECT_NEAR(recover_primal_from_dual(gdemo(), r6.minimizer)(0), 1.0, 1e-6);
}

TEST(SolveConstrained, TauZeroRestrictsToNullspace) {
  SolveReport r = solve_constrained(gdemo(), 0.0);
  EXPECT_NEAR(r.minimizer(0), 0.0, 1e-12);
  EXPECT_NEAR(r.objective, 16.0, 1e-12);  // Phi(0) = (0-4)^2

  EXPECT_THROW(solve_constrained(burg(), 0.0), Infeasible);  // dom phi = (0, inf)
}

TEST(CertificateCheck, JointOptimalityAtTheAbsShiftInstance) {
  // Phi = |x-2|, lambda = 1: argmin(Phi + |.|) = [0,2]. The optimal dual
  // witness at x = 1 is p = +1: <p, x> = ||x||, ||p||_* = 1 and
  // -p = -1 ∈ ∂|.-2|(1).
  ProblemInstance pi = instance_1d(make_abs_shift(2.0));
  Residuals good = certificate_check(pi, vec1(1.0), vec1(1.0), CertificateMode::penalized(1.0));
  EXPECT_LE(good.max_residual(), 1e-8);

  // sign-flipped candidate fails the membership
  Residuals flipped = certificate_check(pi, vec1(1.0), vec1(-1.0), CertificateMode::penalized(1.0));
  EXPECT_GT(flipped.max_residual(), 1e-3);

  // x = 3 is not a minimizer: the Phi membership fails (3 outside [0,2])
  Residuals bad = certificate_check(pi, vec1(3.0), vec1(1.0), CertificateMode::penalized(1.0));
  EXPECT_GT(bad.dual_membership_phi, 1e-3);
}

TEST(CertificateCheck, RoundTripFromConvergedDualSolve) {
  for (double tau : {0.5, 1.0, 2.0}) {
    SolveReport r = solve_dual_penalized(gdemo(), tau);
    ASSERT_TRUE(r.converged);
    Residuals res = certificate_check(gdemo(), *r.dual_witness, r.minimizer,
                                      CertificateMode::constrained(tau));
    EXPECT_LE(res.max_residual(), 1e-7);
  }
}

TEST(BruteForce, AbsShiftPenalizedIntervalIsZeroTwo) {
  ProblemInstance pi = instance_1d(make_abs_shift(2.0));
  ConvexFn obj(
      1, [&pi](const Vector& x) { return pi.penalized_objective(x, 1.0); }, Caps{}, vec1(1.0));
  ArgminSet s = brute_force_argmin(obj, vec1(-1.0), vec1(4.0), 1e-3, 1e-9);
  ASSERT_EQ(s.rep, ArgminSet::Rep::Interval1d);
  EXPECT_NEAR(s.lo, 0.0, 2e-3);
  EXPECT_NEAR(s.hi, 2.0, 2e-3);
}

TEST(BruteForce, SquaredNormSingleton) {
  BuiltinFn q = make_sqnorm(2);
  ArgminSet s = brute_force_argmin(q.fn, vec2(-1.0, -1.0), vec2(1.0, 1.0), 1e-2, 1e-9);
  ASSERT_EQ(s.rep, ArgminSet::Rep::Singleton);
  EXPECT_LT(s.representative().norm(), 1e-6);
}

TEST(BruteForce, Remark2AtLambdaFourGivesZeroOneInterval) {
  ProblemInstance pi = remark2();
  ConvexFn obj(
      1, [&pi](const Vector& x) { return pi.penalized_objective(x, 4.0); }, Caps{}, vec1(1.0));
  ArgminSet s = brute_force_argmin(obj, vec1(-1.0), vec1(4.0), 1e-3, 1e-9);
  ASSERT_EQ(s.rep, ArgminSet::Rep::Interval1d);
  EXPECT_NEAR(s.lo, 0.0, 2e-3);
  EXPECT_NEAR(s.hi, 1.0, 2e-3);
}

TEST(BruteForce, BoxTooLargeThrows) {
  BuiltinFn q = make_sqnorm(2);
  EXPECT_THROW(brute_force_argmin(q.fn, vec2(-100.0, -100.0), vec2(100.0, 100.0), 1e-3, 1e-9),
               BoxTooLarge);
}

TEST(SolverInvariants, OracleAgreementAcrossLambdaGrid) {
  // the solver's minimizer must land inside the brute-force argmin set
  // inflated by 2 grid steps, across lambdas spanning (0, d)
  struct Case {
    ProblemInstance pi;
    double d;
  };
  std::vector<Case> cases{{gdemo(), 8.0}, {remark2(), 4.0}, {instance_1d(make_abs_shift(2.0)), 1.0}};
  const double grid = 1e-3;
  for (const auto& c : cases) {
    for (int i = 1; i <= 20; ++i) {
      double lambda = c.d * i / 21.0;
      SolveReport r = solve_penalized(c.pi, lambda);
      ASSERT_TRUE(r.converged) << "lambda=" << lambda;
      ConvexFn obj(
          1, [&](const Vector& x) { return c.pi.penalized_objective(x, lambda); }, Caps{},
          vec1(1.0));
      ArgminSet s = brute_force_argmin(obj, vec1(-2.0), vec1(6.0), grid, 1e-9);
      EXPECT_TRUE(s.contains_near(r.minimizer, 2.0 * grid))
          << "lambda=" << lambda << " x=" << r.minimizer(0);
    }
  }
}

TEST(SolverInvariants, WeakDualityOnConvergedPairs) {
  for (double lambda : {0.5, 1.0, 3.0, 6.0}) {
    SolveReport p = solve_penalized(gdemo(), lambda);
    SolveReport d = solve_dual_constrained(gdemo(), lambda);
    ASSERT_TRUE(p.converged && d.converged);
    EXPECT_GE(p.objective, -d.objective - 1e-6);
    EXPECT_NEAR(p.objective, -d.objective, 1e-5);  // strong duality at desk scale
  }
}

TEST(SolverInvariants, CertificateSoundnessUnderPerturbation) {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> gauss;
  SolverOptions opts;
  for (double lambda : {1.0, 4.0}) {
    SolveReport r = solve_penalized(quad2d(), lambda);
    ASSERT_TRUE(r.converged);
    double base = r.objective;
    for (int k = 0; k < 16; ++k) {
      Vector d(2);
      d << gauss(rng), gauss(rng);
      d.normalize();
      Vector x = r.minimizer + 10.0 * opts.cert_tol * d;
      EXPECT_GE(quad2d().penalized_objective(x, lambda), base - 1e-6);
    }
  }
}

TEST(SolverInvariants, PenalizedSolutionSolvesConstrainedAtItsOwnLevel) {
  // a converged penalized minimizer also solves
  // the constrained problem at tau = ||L x_hat||, with equal Phi value
  for (double lambda : {1.0, 2.0, 5.0}) {
    SolveReport p = solve_penalized(gdemo(), lambda);
    ASSERT_TRUE(p.converged);
    if (p.lx_norm <= 1e-9) continue;  // lambda >= d: tau = 0 row
    SolveReport c = solve_constrained(gdemo(), p.lx_norm);
    ASSERT_TRUE(c.converged);
    EXPECT_NEAR(gdemo().phi_value(c.minimizer), gdemo().phi_value(p.minimizer), 1e-6);
  }
}

TEST(SolverInvariants, ExistenceAcrossLogGrid) {
  SolverOptions opts;
  opts.max_iter = 2000000;  // extreme parameters need the larger budget
  std::vector<ProblemInstance> instances{gdemo(), remark2(), burg(),
                                         instance_1d(make_abs_shift(2.0)), quad2d()};
  for (const auto& pi : instances) {
    for (double v : {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3}) {
      SolveReport rc = solve_constrained(pi, v, opts);
      EXPECT_TRUE(rc.converged) << "constrained at " << v;
      SolveReport rp = solve_penalized(pi, v, opts);
      EXPECT_TRUE(rp.converged) << "penalized at " << v;
    }
  }
}

TEST(SolverInvariants, DifferentSeedsAgreeOnLxNormAndValue) {
  SolverOptions a, b;
  a.seed = 1;
  b.seed = 2;
  a.start_jitter = b.start_jitter = 0.5;
  for (double lambda : {1.0, 3.0}) {
    SolveReport ra = solve_penalized(quad2d(), lambda, a);
    SolveReport rb = solve_penalized(quad2d(), lambda, b);
    ASSERT_TRUE(ra.converged && rb.converged);
    EXPECT_NEAR(ra.lx_norm, rb.lx_norm, 1e-5);
    EXPECT_NEAR(quad2d().phi_value(ra.minimizer), quad2d().phi_value(rb.minimizer), 1e-6);
  }
}
