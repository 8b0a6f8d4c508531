#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "convexcorr/builtins.hpp"
#include "convexcorr/convex_fn.hpp"
#include "convexcorr/norms.hpp"
#include "convexcorr/structured.hpp"
#include "convexcorr/subspace.hpp"

namespace convexcorr {

struct SolverOptions {
  int max_iter = 200000;
  double cert_tol = 1e-7;
  int check_every = 25;
  unsigned seed = 0;
  int power_iters = 50;
  /// ||Lx|| below this counts as "x in the nullspace of L" in regime tests.
  double nullspace_tol = 1e-6;
  /// Gaussian perturbation of the starting point (scaled by seed draws);
  /// distinct seeds then give genuinely different trajectories.
  double start_jitter = 0.0;
};

struct Residuals {
  double primal_feas = 0.0;
  double dual_membership_phi = kInf;
  double dual_membership_psi = kInf;

  double max_residual() const {
    return std::max(primal_feas, std::max(dual_membership_phi, dual_membership_psi));
  }
};

struct CertificateMode {
  enum class Kind { Constrained, Penalized };
  Kind kind;
  double param;  // tau or lambda

  static CertificateMode constrained(double tau) { return {Kind::Constrained, tau}; }
  static CertificateMode penalized(double lambda) { return {Kind::Penalized, lambda}; }
};

/// Operator norm estimate by power iteration (50 rounds by default).
inline double operator_norm_estimate(const LinearMap& l, unsigned seed, int iters) {
  std::mt19937_64 rng(seed ^ 0xa0761d6478bd642fULL);
  std::normal_distribution<double> gauss;
  Vector v(l.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = gauss(rng);
  if (v.norm() == 0.0) v.setOnes();
  v.normalize();
  double sigma = 0.0;
  for (int k = 0; k < iters; ++k) {
    Vector w = l.apply_adjoint(l.apply(v));
    double n = w.norm();
    if (n <= 1e-300) return 0.0;
    v = w / n;
    sigma = std::sqrt(n);
  }
  return sigma;
}

/// min over t of ||K t + b|| for the given norm; exact least squares for L2,
/// a small primal-dual iteration otherwise. Returns the attained value.
inline double min_norm_affine(const Matrix& k, const Vector& b, const NormPair& np) {
  if (k.cols() == 0) return np.primal(b);
  if (np.tag() == NormTag::L2) {
    Vector t = k.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(-b);
    return (k * t + b).norm();
  }
  double knorm = LinearMap(k).largest_singular_value();
  if (knorm == 0.0) return np.primal(b);
  double step = 0.99 / knorm;
  Vector t = Vector::Zero(k.cols()), tbar = t, p = Vector::Zero(k.rows());
  double best = np.primal(b);
  for (int it = 0; it < 20000; ++it) {
    Vector q = p + step * (k * tbar + b);
    p = np.project_dual_ball(q, 1.0);  // prox of the norm's conjugate
    Vector tnew = t - step * (k.transpose() * p);
    tbar = 2.0 * tnew - t;
    t = tnew;
    if (it % 50 == 0) best = std::min(best, np.primal(k * t + b));
  }
  return std::min(best, np.primal(k * t + b));
}

/// The problem family data: structured Phi, linear map L, norm with dual.
/// Construction validates the standing hypotheses
///   X2 ∩ N(L) = {0},  X3 ∩ R(L*) = {0},  argmin Phi ∩ N(L) = ∅,
/// the last one numerically as min over X2 of ||L(x_check + x2)|| > tol.
class ProblemInstance {
 public:
  ProblemInstance(StructuredPhi phi, LinearMap l, NormPair norm)
      : phi_(std::move(phi)), l_(std::move(l)), norm_(norm) {
    if (l_.cols() != phi_.ambient_dim())
      throw DimensionMismatch("ProblemInstance: L must act on the ambient space");
    if (intersect(phi_.X2(), nullspace(l_)).dim() > 0)
      throw InvariantViolation("ProblemInstance: X2 ∩ N(L) must be trivial");
    if (intersect(phi_.X3(), range_of_adjoint(l_)).dim() > 0)
      throw InvariantViolation("ProblemInstance: X3 ∩ R(L*) must be trivial");
    min_lx_argmin_ = compute_min_lx_over_argmin();
    if (min_lx_argmin_ <= kFeasTol)
      throw InvariantViolation(
          "ProblemInstance: argmin Phi meets N(L); the correspondence hypotheses fail");
  }

  const StructuredPhi& phi() const { return phi_; }
  const LinearMap& L() const { return l_; }
  const NormPair& norm() const { return norm_; }
  Eigen::Index ambient_dim() const { return phi_.ambient_dim(); }

  /// min over argmin Phi of ||Lx||; this is the threshold c.
  double min_lx_over_argmin() const { return min_lx_argmin_; }

  double phi_value(const Vector& x) const { return phi_.eval(x); }

  /// Phi*(y), using the closed-form conjugate of phi where present.
  double phi_conjugate(const Vector& y) const {
    if (!phi_.X2().is_trivial() && phi_.X2().project(y).norm() > StructuredPhi::kX3Tol)
      return kInf;
    return phi_conjugate_value(phi_.phi(), phi_.X1().coords(y), true);
  }

  bool conjugate_available() const {
    return phi_.phi().has_conjugate() || phi_.phi().conjugate_box().has_value();
  }

  double penalized_objective(const Vector& x, double lambda) const {
    double v = phi_.eval(x);
    if (v == kInf) return kInf;
    return v + lambda * norm_.primal(l_.apply(x));
  }

  double dual_objective_constrained_family(const Vector& p, double tau) const {
    double v = phi_conjugate(-l_.apply_adjoint(p));
    if (v == kInf) return kInf;
    return v + tau * norm_.dual(p);
  }

 private:
  double compute_min_lx_over_argmin() const {
    Vector x0 = phi_.canonical_minimizer();
    const Subspace& x2 = phi_.X2();
    if (x2.is_trivial()) return norm_.primal(l_.apply(x0));
    Matrix k = l_.entries() * x2.basis();
    return min_norm_affine(k, l_.apply(x0), norm_);
  }

  StructuredPhi phi_;
  LinearMap l_;
  NormPair norm_;
  double min_lx_argmin_ = 0.0;
};

/// Residual triple for the joint optimality relation
///   (1/mu) p ∈ ∂Psi(mu L x)  and  -L* p ∈ ∂Phi(x)
/// with mu = 1/tau for the constrained family and mu = lambda for the
/// penalized one. Residuals at or below cert_tol certify both x and p.
inline Residuals certificate_check(const ProblemInstance& pi, const Vector& x, const Vector& p,
                                   CertificateMode mode) {
  Residuals res;
  Vector y = pi.L().apply(x);
  double ynorm = pi.norm().primal(y);
  double pnorm = pi.norm().dual(p);

  if (mode.kind == CertificateMode::Kind::Constrained) {
    const double tau = mode.param;
    res.primal_feas = std::max(0.0, ynorm - tau);
    if (tau <= 0.0) {
      res.primal_feas = ynorm;
      res.dual_membership_psi = 0.0;  // the mu = 1/tau relation degenerates at tau = 0
    } else if (ynorm < tau - 1e-6 * std::max(1.0, tau)) {
      // strict interior: tau*p must lie in the zero subgradient of Psi1
      res.dual_membership_psi = pnorm;
    } else {
      // boundary face: <p, Lx> = tau ||p||_*
      res.dual_membership_psi = std::abs(p.dot(y) - tau * pnorm);
    }
  } else {
    const double lambda = mode.param;
    if (lambda <= 0.0) {
      res.dual_membership_psi = pnorm;
    } else if (ynorm <= 1e-12) {
      res.dual_membership_psi = std::max(0.0, pnorm - lambda);
    } else {
      res.dual_membership_psi =
          std::max(std::abs(pnorm - lambda), std::abs(p.dot(y) - lambda * ynorm));
    }
  }

  SubgradientDescriptor dphi = pi.phi().subgradient(x);
  if (dphi.is_empty()) {
    res.dual_membership_phi = kInf;
  } else {
    res.dual_membership_phi = dphi.membership(-pi.L().apply_adjoint(p)).residual;
  }
  return res;
}

struct SolveReport {
  Vector minimizer;
  double objective = kInf;
  std::optional<Vector> dual_witness;
  Residuals residuals;
  int iterations = 0;
  bool converged = false;
  double lx_norm = 0.0;    // ||L x_hat||
  double dual_norm = 0.0;  // ||p_hat||_*
  std::optional<Vector> recovered_primal;
};

namespace detail {

struct PdhgState {
  Vector x, p;
  int iterations = 0;
  bool converged = false;
  Residuals residuals;
};

/// Expected magnitude of the optimal dual variable, used to split the fixed
/// step product between the primal and dual updates. For the penalized
/// problem ||p_hat||_* <= lambda; for the constrained one the subgradient of
/// phi at a radially scaled feasible point gives the scale.
inline double dual_scale_heuristic(const ProblemInstance& pi, CertificateMode mode) {
  if (mode.kind == CertificateMode::Kind::Penalized) return std::max(1.0, mode.param);
  double tau = mode.param;
  double c = pi.min_lx_over_argmin();
  if (tau >= c) return 1.0;
  Vector probe = (0.99 * tau / c) * pi.phi().canonical_minimizer();
  SubgradientDescriptor d = pi.phi().subgradient(probe);
  if (d.is_empty()) return 1.0;
  return std::min(1e7, std::max(1.0, d.representative().norm()));
}

/// Chambolle-Pock style primal-dual iteration with fixed steps whose product
/// is bounded by 1/||L||^2, stopping on the certificate residuals.
inline PdhgState pdhg_iterate(const ProblemInstance& pi, CertificateMode mode,
                              const SolverOptions& opts, std::optional<Vector> x_start = {},
                              std::optional<Vector> p_start = {}) {
  const Eigen::Index m = pi.L().rows();
  double lnorm = operator_norm_estimate(pi.L(), opts.seed, opts.power_iters);
  if (lnorm <= 0.0) lnorm = 1.0;
  double scale = dual_scale_heuristic(pi, mode);
  double sigma = 0.99 * scale / lnorm;   // dual step
  double tstep = 0.99 / (scale * lnorm); // primal step

  PdhgState st;
  st.x = x_start.value_or(pi.phi().canonical_minimizer());
  st.p = p_start.value_or(Vector::Zero(m));
  if (opts.start_jitter > 0.0 && !x_start) {
    std::mt19937_64 rng(opts.seed ^ 0xe7037ed1a0b428dbULL);
    std::normal_distribution<double> gauss;
    for (Eigen::Index i = 0; i < st.x.size(); ++i) st.x(i) += opts.start_jitter * gauss(rng);
  }
  Vector xbar = st.x;

  const bool penalized = mode.kind == CertificateMode::Kind::Penalized;
  const double param = mode.param;

  for (int k = 1; k <= opts.max_iter; ++k) {
    Vector q = st.p + sigma * pi.L().apply(xbar);
    if (penalized) {
      st.p = pi.norm().project_dual_ball(q, param);
    } else {
      st.p = q - sigma * pi.norm().project_primal_ball(q / sigma, param);
    }
    Vector v = st.x - tstep * pi.L().apply_adjoint(st.p);
    Vector xnew = pi.phi().prox(v, tstep);
    xbar = 2.0 * xnew - st.x;
    st.x = xnew;
    st.iterations = k;
    if (k % opts.check_every == 0 || k == opts.max_iter) {
      st.residuals = certificate_check(pi, st.x, st.p, mode);
      if (st.residuals.max_residual() <= opts.cert_tol) {
        st.converged = true;
        break;
      }
    }
  }
  if (!st.converged) st.residuals = certificate_check(pi, st.x, st.p, mode);
  return st;
}

/// Diminishing-step subgradient descent used when phi exposes no prox; the
/// iteration budget is tripled. Constraints enter through an exact penalty.
inline PdhgState subgradient_fallback(const ProblemInstance& pi, CertificateMode mode,
                                      const SolverOptions& opts) {
  PdhgState st;
  st.x = pi.phi().canonical_minimizer();
  const bool penalized = mode.kind == CertificateMode::Kind::Penalized;
  const double param = mode.param;
  double lnorm = operator_norm_estimate(pi.L(), opts.seed, opts.power_iters);
  double base = 1.0 / std::max(1.0, lnorm * lnorm);
  const double beta = penalized ? param : 10.0 * (1.0 + lnorm);  // exact-penalty weight

  Vector best = st.x;
  double best_val = kInf;
  const int budget = 3 * opts.max_iter;
  for (int k = 1; k <= budget; ++k) {
    SubgradientDescriptor dphi = pi.phi().subgradient(st.x);
    if (dphi.is_empty()) break;
    Vector g = dphi.representative();
    Vector y = pi.L().apply(st.x);
    double ynorm = pi.norm().primal(y);
    if (penalized) {
      if (ynorm > 0) g += param * pi.L().apply_adjoint(pi.norm().norm_gradient_representative(y));
    } else if (ynorm > param) {
      g += beta * pi.L().apply_adjoint(pi.norm().norm_gradient_representative(y));
    }
    st.x -= base / std::sqrt(static_cast<double>(k)) * g;
    st.iterations = k;
    double val = penalized ? pi.penalized_objective(st.x, param)
                           : (pi.norm().primal(pi.L().apply(st.x)) <= param + kFeasTol
                                  ? pi.phi_value(st.x)
                                  : kInf);
    if (val < best_val) {
      best_val = val;
      best = st.x;
    }
  }
  st.x = best;
  // recover a dual candidate from the norm face at L x
  Vector y = pi.L().apply(st.x);
  double scale = penalized ? param : 0.0;
  if (!penalized) {
    SubgradientDescriptor dphi = pi.phi().subgradient(st.x);
    if (!dphi.is_empty()) scale = pi.norm().dual(pi.L().apply(st.x)) > 0 ? 1.0 : 0.0;
  }
  st.p = scale * pi.norm().norm_gradient_representative(y);
  st.residuals = certificate_check(pi, st.x, st.p, mode);
  st.converged = st.residuals.max_residual() <= opts.cert_tol;
  return st;
}

inline PdhgState run_engine(const ProblemInstance& pi, CertificateMode mode,
                            const SolverOptions& opts, std::optional<Vector> x_start = {},
                            std::optional<Vector> p_start = {}) {
  if (pi.phi().has_prox()) return pdhg_iterate(pi, mode, opts, std::move(x_start), std::move(p_start));
  return subgradient_fallback(pi, mode, opts);
}

}  // namespace detail

/// (P_{2,lambda}): argmin Phi(x) + lambda ||Lx||.
inline SolveReport solve_penalized(const ProblemInstance& pi, double lambda,
                                   const SolverOptions& opts = {}) {
  if (lambda < 0.0) throw InvariantViolation("solve_penalized: lambda must be >= 0");
  SolveReport rep;
  if (lambda == 0.0) {
    rep.minimizer = pi.phi().canonical_minimizer();
    rep.dual_witness = Vector::Zero(pi.L().rows());
    rep.residuals = certificate_check(pi, rep.minimizer, *rep.dual_witness,
                                      CertificateMode::penalized(0.0));
    rep.converged = rep.residuals.max_residual() <= opts.cert_tol;
    rep.iterations = 0;
  } else {
    detail::PdhgState st =
        detail::run_engine(pi, CertificateMode::penalized(lambda), opts);
    rep.minimizer = st.x;
    rep.dual_witness = st.p;
    rep.residuals = st.residuals;
    rep.iterations = st.iterations;
    rep.converged = st.converged;
  }
  rep.objective = pi.penalized_objective(rep.minimizer, lambda);
  rep.lx_norm = pi.norm().primal(pi.L().apply(rep.minimizer));
  rep.dual_norm = pi.norm().dual(*rep.dual_witness);
  return rep;
}

namespace detail {

/// tau = 0 constrained solve: minimize Phi over N(L) by restricting the
/// coordinates to a nullspace basis.
inline SolveReport solve_constrained_tau_zero(const ProblemInstance& pi,
                                              const SolverOptions& opts) {
  const Eigen::Index n = pi.ambient_dim();
  Subspace nl = nullspace(pi.L());
  Subspace feas = intersect(nl, sum(pi.phi().X1(), pi.phi().X2()).space);
  SolveReport rep;
  rep.dual_witness = Vector::Zero(pi.L().rows());
  if (feas.is_trivial()) {
    Vector zero = Vector::Zero(n);
    if (!std::isfinite(pi.phi_value(zero)))
      throw Infeasible("solve_constrained: dom Phi ∩ N(L) is empty at tau = 0");
    rep.minimizer = zero;
    rep.objective = pi.phi_value(zero);
    rep.converged = true;
  } else {
    // diminishing-step subgradient descent in nullspace coordinates
    Vector z = feas.coords(pi.phi().canonical_minimizer());
    Vector best = z;
    double best_val = pi.phi_value(feas.from_coords(z));
    int budget = 3 * opts.max_iter;
    for (int k = 1; k <= budget; ++k) {
      Vector x = feas.from_coords(z);
      SubgradientDescriptor d = pi.phi().subgradient(x);
      if (d.is_empty()) break;
      Vector g = feas.coords(d.representative());
      z -= 0.5 / std::sqrt(static_cast<double>(k)) * g;
      double val = pi.phi_value(feas.from_coords(z));
      if (val < best_val) {
        best_val = val;
        best = z;
      }
      rep.iterations = k;
    }
    if (!std::isfinite(best_val))
      throw Infeasible("solve_constrained: dom Phi ∩ N(L) is empty at tau = 0");
    rep.minimizer = feas.from_coords(best);
    rep.objective = best_val;
    rep.converged = true;
  }
  rep.residuals = certificate_check(pi, rep.minimizer, *rep.dual_witness,
                                    CertificateMode::constrained(0.0));
  rep.lx_norm = pi.norm().primal(pi.L().apply(rep.minimizer));
  rep.dual_norm = 0.0;
  return rep;
}

}  // namespace detail

/// (P_{1,tau}): argmin Phi(x) subject to ||Lx|| <= tau.
inline SolveReport solve_constrained(const ProblemInstance& pi, double tau,
                                     const SolverOptions& opts = {}) {
  if (tau < 0.0) throw InvariantViolation("solve_constrained: tau must be >= 0");
  if (tau == 0.0) return detail::solve_constrained_tau_zero(pi, opts);

  detail::PdhgState st = detail::run_engine(pi, CertificateMode::constrained(tau), opts);
  double val = pi.phi_value(st.x);
  double feas_violation = pi.norm().primal(pi.L().apply(st.x)) - tau;
  if (!st.converged && (!std::isfinite(val) || feas_violation > 1e-3 * std::max(1.0, tau))) {
    // probe along the scaled canonical minimizer before declaring infeasibility
    Vector x0 = pi.phi().canonical_minimizer();
    double c0 = pi.norm().primal(pi.L().apply(x0));
    bool feasible_point_exists = c0 <= tau;
    if (!feasible_point_exists && c0 > 0.0) {
      Vector probe = (0.99 * tau / c0) * x0;
      feasible_point_exists = std::isfinite(pi.phi_value(probe));
    }
    if (!feasible_point_exists)
      throw Infeasible("solve_constrained: no feasible point with finite Phi found");
  }
  SolveReport rep;
  rep.minimizer = st.x;
  rep.dual_witness = st.p;
  rep.residuals = st.residuals;
  rep.iterations = st.iterations;
  rep.converged = st.converged;
  rep.objective = val;
  rep.lx_norm = pi.norm().primal(pi.L().apply(st.x));
  rep.dual_norm = pi.norm().dual(st.p);
  return rep;
}

/// Primal point recovered from a dual solution via x ∈ ∂Phi*(-L*p), using
/// the closed-form conjugate subgradient when present, otherwise re-solving
/// the inner sup. The free X2 component is fixed to zero.
inline Vector recover_primal_from_dual(const ProblemInstance& pi, const Vector& p) {
  Vector y = -pi.L().apply_adjoint(p);
  Vector c1 = phi_conjugate_argmax(pi.phi().phi(), pi.phi().X1().coords(y));
  return pi.phi().X1().from_coords(c1);
}

/// (D_{1,tau}): argmin Phi*(-L*p) + tau ||p||_*. Solved jointly with its
/// primal (P_{1,tau}); the report is written from the dual perspective.
/// tau = 0 is outside the precondition: the solve then probes for a dual
/// argmin and throws DualUnbounded when Phi*(-L* .) has none.
inline SolveReport solve_dual_penalized(const ProblemInstance& pi, double tau,
                                        const SolverOptions& opts = {}) {
  if (tau < 0.0) throw InvariantViolation("solve_dual_penalized: tau must be >= 0");
  SolveReport rep;
  if (tau == 0.0) {
    // doubling probe for argmin of the unpenalized dual objective
    double prev_norm = -1.0;
    for (double radius = 1.0; radius <= 4.0e6; radius *= 2.0) {
      detail::PdhgState st =
          detail::run_engine(pi, CertificateMode::penalized(radius), opts);
      if (!st.converged) continue;  // no argmin evidence from an unfinished solve
      double pn = pi.norm().dual(st.p);
      if (pn <= 0.9 * radius) {
        if (prev_norm >= 0.0 && std::abs(pn - prev_norm) <= 1e-6 * std::max(1.0, pn)) {
          rep.minimizer = st.p;
          rep.dual_witness = st.x;
          rep.recovered_primal = st.x;
          rep.residuals = st.residuals;
          rep.iterations = st.iterations;
          rep.converged = st.converged;
          rep.objective = pi.phi_conjugate(-pi.L().apply_adjoint(st.p));
          rep.lx_norm = pi.norm().primal(pi.L().apply(st.x));
          rep.dual_norm = pn;
          return rep;
        }
        prev_norm = pn;
      } else {
        prev_norm = -1.0;
      }
    }
    throw DualUnbounded("solve_dual_penalized: Phi*(-L* .) has no minimizer (tau = 0)");
  }
  detail::PdhgState st = detail::run_engine(pi, CertificateMode::constrained(tau), opts);
  rep.minimizer = st.p;
  rep.dual_witness = st.x;
  rep.recovered_primal = st.x;
  rep.residuals = st.residuals;
  rep.iterations = st.iterations;
  rep.converged = st.converged;
  rep.objective = pi.dual_objective_constrained_family(st.p, tau);
  rep.lx_norm = pi.norm().primal(pi.L().apply(st.x));
  rep.dual_norm = pi.norm().dual(st.p);
  return rep;
}

/// (D_{2,lambda}): argmin Phi*(-L*p) subject to ||p||_* <= lambda. Solved
/// jointly with (P_{2,lambda}); written from the dual perspective.
inline SolveReport solve_dual_constrained(const ProblemInstance& pi, double lambda,
                                          const SolverOptions& opts = {}) {
  if (lambda < 0.0) throw InvariantViolation("solve_dual_constrained: lambda must be >= 0");
  SolveReport rep;
  if (lambda == 0.0) {
    rep.minimizer = Vector::Zero(pi.L().rows());
    Vector x = pi.phi().canonical_minimizer();
    rep.dual_witness = x;
    rep.recovered_primal = x;
    rep.residuals = certificate_check(pi, x, rep.minimizer, CertificateMode::penalized(0.0));
    rep.converged = rep.residuals.max_residual() <= opts.cert_tol;
    rep.objective = pi.phi_conjugate(Vector::Zero(pi.ambient_dim()));
    rep.lx_norm = pi.norm().primal(pi.L().apply(x));
    rep.dual_norm = 0.0;
    return rep;
  }
  detail::PdhgState st = detail::run_engine(pi, CertificateMode::penalized(lambda), opts);
  rep.minimizer = st.p;
  rep.dual_witness = st.x;
  rep.recovered_primal = st.x;
  rep.residuals = st.residuals;
  rep.iterations = st.iterations;
  rep.converged = st.converged;
  rep.objective = pi.phi_conjugate(-pi.L().apply_adjoint(st.p));
  rep.lx_norm = pi.norm().primal(pi.L().apply(st.x));
  rep.dual_norm = pi.norm().dual(st.p);
  return rep;
}

/// A minimizing set reported by the brute-force oracle.
struct ArgminSet {
  enum class Rep { Singleton, Interval1d, SampleCloud };

  Rep rep = Rep::Singleton;
  std::vector<Vector> points;  // all grid points within value_tol of the minimum
  double lo = 0.0, hi = 0.0;   // 1-d interval consolidation
  double value = kInf;         // the common minimal value
  double tol = 0.0;

  const Vector& representative() const { return points.front(); }

  bool contains_near(const Vector& x, double dist_tol) const {
    for (const Vector& pt : points)
      if ((pt - x).norm() <= dist_tol) return true;
    return false;
  }
};

/// Independent grid-search argmin oracle for dims <= 3 (at most 1e7 points).
/// Collects every grid point whose value is within value_tol of the grid
/// minimum; in one dimension a contiguous point set becomes an interval.
inline ArgminSet brute_force_argmin(const ConvexFn& f, const Vector& lo, const Vector& hi,
                                    double grid_step, double value_tol) {
  const Eigen::Index dim = f.dim();
  if (lo.size() != dim || hi.size() != dim)
    throw DimensionMismatch("brute_force_argmin: box must match the function dimension");
  if (dim > 3) throw BoxTooLarge("brute_force_argmin: only dims <= 3 are supported");
  if (grid_step <= 0.0) throw InvariantViolation("brute_force_argmin: grid_step must be positive");
  double total = 1.0;
  std::vector<Eigen::Index> counts(static_cast<std::size_t>(dim));
  for (Eigen::Index d = 0; d < dim; ++d) {
    if (!(lo(d) < hi(d))) throw InvariantViolation("brute_force_argmin: empty box");
    counts[static_cast<std::size_t>(d)] =
        static_cast<Eigen::Index>(std::floor((hi(d) - lo(d)) / grid_step)) + 1;
    total *= static_cast<double>(counts[static_cast<std::size_t>(d)]);
  }
  if (total > 1e7) throw BoxTooLarge("brute_force_argmin: more than 1e7 grid points");

  // two sweeps over the grid: locate the minimum, then collect the level set
  auto sweep = [&](auto&& visit) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(dim), 0);
    Vector x(dim);
    while (true) {
      for (Eigen::Index d = 0; d < dim; ++d)
        x(d) = lo(d) + grid_step * static_cast<double>(idx[static_cast<std::size_t>(d)]);
      visit(x, idx);
      Eigen::Index d = 0;
      while (d < dim && ++idx[static_cast<std::size_t>(d)] >= counts[static_cast<std::size_t>(d)]) {
        idx[static_cast<std::size_t>(d)] = 0;
        ++d;
      }
      if (d == dim) break;
    }
  };

  double best = kInf;
  sweep([&](const Vector& x, const std::vector<Eigen::Index>&) {
    double v = f(x);
    if (v < best) best = v;
  });
  if (!std::isfinite(best))
    throw Infeasible("brute_force_argmin: the objective is +inf on the whole box");

  ArgminSet out;
  out.value = best;
  out.tol = value_tol;
  std::vector<Eigen::Index> flat_indices;
  sweep([&](const Vector& x, const std::vector<Eigen::Index>& indices) {
    if (f(x) <= best + value_tol) {
      out.points.push_back(x);
      if (dim == 1) flat_indices.push_back(indices[0]);
    }
  });
  if (dim == 1 && out.points.size() > 1) {
    bool contiguous = true;
    for (std::size_t i = 1; i < flat_indices.size(); ++i)
      if (flat_indices[i] != flat_indices[i - 1] + 1) contiguous = false;
    if (contiguous) {
      out.rep = ArgminSet::Rep::Interval1d;
      out.lo = out.points.front()(0);
      out.hi = out.points.back()(0);
      return out;
    }
    out.rep = ArgminSet::Rep::SampleCloud;
    return out;
  }
  out.rep = out.points.size() == 1 ? ArgminSet::Rep::Singleton : ArgminSet::Rep::SampleCloud;
  if (out.rep == ArgminSet::Rep::Interval1d || dim == 1) {
    out.lo = out.points.front()(0);
    out.hi = out.points.back()(0);
  }
  return out;
}

}  // namespace convexcorr
