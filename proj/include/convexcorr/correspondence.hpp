#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "convexcorr/solvers.hpp"

namespace convexcorr {

struct Thresholds {
  /// c = min over argmin Phi of ||Lx||; always positive and attained.
  double c = 0.0;
  /// d = inf over argmin Phi*(-L* .) of ||p||_*; +inf when that argmin is empty.
  double d = kInf;

  bool d_finite() const { return std::isfinite(d); }
};

/// c, computed as min over x2 in X2 of ||L(x_check + x2)||.
inline double compute_c(const ProblemInstance& pi) {
  double c = pi.min_lx_over_argmin();
  if (c <= 1e-12)
    throw NonPositiveC("compute_c: argmin Phi meets N(L); the hypotheses are violated");
  return c;
}

/// g(tau) = ||p_hat||_* from the dual solve of the constrained problem.
inline double g_of_tau(const ProblemInstance& pi, double tau, const SolverOptions& opts = {}) {
  double c = pi.min_lx_over_argmin();
  if (!(tau > 0.0 && tau < c))
    throw InvariantViolation("g_of_tau: tau must lie in (0, c)");
  SolveReport r = solve_dual_penalized(pi, tau, opts);
  if (!r.converged) throw NotConverged("g_of_tau: dual solve did not converge");
  return r.dual_norm;
}

/// f(lambda) = ||L x_hat|| from the penalized solve; the inverse of g.
inline double f_of_lambda(const ProblemInstance& pi, double lambda,
                          const SolverOptions& opts = {}) {
  if (!(lambda > 0.0)) throw InvariantViolation("f_of_lambda: lambda must be positive");
  SolveReport r = solve_penalized(pi, lambda, opts);
  if (!r.converged) throw NotConverged("f_of_lambda: penalized solve did not converge");
  return r.lx_norm;
}

struct DReport {
  double value = kInf;
  double route_dual_argmin = kInf;  // norm of a computed dual argmin element
  double route_bisection = kInf;    // smallest lambda driving the solution into N(L)
  double route_g_limit = kInf;      // extrapolation of g(tau) for tau -> 0+
  bool g_limit_available = false;
};

namespace detail {

inline double bisect_d(const ProblemInstance& pi, const SolverOptions& opts) {
  auto in_nullspace = [&](double lambda) {
    SolveReport r = solve_penalized(pi, lambda, opts);
    return r.converged && r.lx_norm <= opts.nullspace_tol;
  };
  double hi = 1.0;
  while (hi <= 1.0e6 && !in_nullspace(hi)) hi *= 2.0;
  if (hi > 1.0e6) return kInf;
  double lo = hi / 2.0;
  if (hi == 1.0) lo = 0.0;
  while (hi - lo > 2e-5) {
    double mid = 0.5 * (lo + hi);
    if (in_nullspace(mid))
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

struct GLimit {
  double value = kInf;
  bool available = false;
};

inline GLimit g_limit_extrapolation(const ProblemInstance& pi, const SolverOptions& opts) {
  GLimit out;
  double c = pi.min_lx_over_argmin();
  double t1 = 1e-3 * c, t2 = 2e-3 * c, t3 = 4e-3 * c;
  double y[3];
  double ts[3] = {t1, t2, t3};
  for (int i = 0; i < 3; ++i) {
    SolveReport r = solve_dual_penalized(pi, ts[i], opts);
    if (!r.converged) {
      // a runaway dual norm near tau = 0 is divergence evidence, d = +inf
      if (r.dual_norm > 100.0) return out;
      throw NotConverged("compute_d: dual solve for the g-limit route did not converge");
    }
    y[i] = r.dual_norm;
  }
  // quadratic (Lagrange) extrapolation to tau = 0, cross-checked against the
  // linear one; the route is only trusted when the two agree.
  double quad = y[0] * (0.0 - t2) * (0.0 - t3) / ((t1 - t2) * (t1 - t3)) +
                y[1] * (0.0 - t1) * (0.0 - t3) / ((t2 - t1) * (t2 - t3)) +
                y[2] * (0.0 - t1) * (0.0 - t2) / ((t3 - t1) * (t3 - t2));
  double lin = y[0] + (y[0] - y[1]) * t1 / (t2 - t1);
  if (quad > 1e5) return out;  // unbounded growth, no finite limit claim
  if (std::abs(quad - lin) > std::max(1e-3, 0.01 * std::abs(quad))) return out;
  out.value = quad;
  out.available = true;
  return out;
}

}  // namespace detail

/// d by three redundant routes: the norm of a dual argmin element, bisection
/// on the smallest lambda whose penalized solution lies in N(L), and the
/// limit of g(tau) as tau -> 0+. Finite routes must agree within 1e-3;
/// disagreement fails loudly.
inline DReport compute_d_report(const ProblemInstance& pi, const SolverOptions& opts = {}) {
  DReport rep;
  rep.route_bisection = detail::bisect_d(pi, opts);
  try {
    rep.route_dual_argmin = solve_dual_penalized(pi, 0.0, opts).dual_norm;
  } catch (const DualUnbounded&) {
    rep.route_dual_argmin = kInf;
  }
  detail::GLimit gl = detail::g_limit_extrapolation(pi, opts);
  rep.route_g_limit = gl.value;
  rep.g_limit_available = gl.available;

  const bool b_fin = std::isfinite(rep.route_bisection);
  const bool a_fin = std::isfinite(rep.route_dual_argmin);
  if (!b_fin) {
    if (a_fin)
      throw RouteDisagreement("compute_d: bisection reports +inf but a dual argmin exists");
    if (gl.available)
      throw RouteDisagreement("compute_d: bisection reports +inf but g(tau) has a finite limit");
    rep.value = kInf;
    return rep;
  }
  if (!a_fin)
    throw RouteDisagreement("compute_d: dual argmin route reports +inf against finite bisection");
  if (std::abs(rep.route_dual_argmin - rep.route_bisection) > 1e-3)
    throw RouteDisagreement("compute_d: dual argmin and bisection routes disagree beyond 1e-3");
  if (gl.available && std::abs(rep.route_g_limit - rep.route_bisection) > 1e-3)
    throw RouteDisagreement("compute_d: g-limit route disagrees beyond 1e-3");
  rep.value = rep.route_dual_argmin;
  return rep;
}

inline double compute_d(const ProblemInstance& pi, const SolverOptions& opts = {}) {
  return compute_d_report(pi, opts).value;
}

inline Thresholds compute_thresholds(const ProblemInstance& pi, const SolverOptions& opts = {}) {
  return Thresholds{compute_c(pi), compute_d(pi, opts)};
}

/// Bisection inverse of g on (0, c), using its strict monotone decrease.
inline double invert_g(const ProblemInstance& pi, const Thresholds& th, double lambda_target,
                       double tol, const SolverOptions& opts = {}) {
  if (tol <= 0.0) throw InvariantViolation("invert_g: tol must be positive");
  double lo = 1e-4 * th.c, hi = (1.0 - 1e-4) * th.c;
  double g_lo = g_of_tau(pi, lo, opts);   // g is large near 0
  double g_hi = g_of_tau(pi, hi, opts);   // g is small near c
  if (lambda_target > g_lo + tol || lambda_target < g_hi - tol)
    throw NotBracketed("invert_g: lambda target outside the sampled range of g");
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double val = g_of_tau(pi, mid, opts);
    if (std::abs(val - lambda_target) <= tol) return mid;
    if (val > lambda_target)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-14 * th.c) return 0.5 * (lo + hi);
  }
  return 0.5 * (lo + hi);
}

struct RegimeLabel {
  enum class Param { Tau, Lambda };
  enum class Zone { AtZero, Interior, Saturated };

  Param param;
  double value = 0.0;
  Zone zone;
  std::string containment;               // the containment asserted by the localization result
  std::optional<bool> numeric_check_ok;  // set when a verification solve was requested

  const char* zone_name() const {
    switch (zone) {
      case Zone::AtZero:
        return "at_zero";
      case Zone::Interior:
        return "interior";
      case Zone::Saturated:
        return "saturated";
    }
    return "?";
  }
};

namespace detail {

inline bool near_argmin_phi(const ProblemInstance& pi, const Vector& x, double tol) {
  // argmin Phi = {x_check} ⊕ X2
  Vector x1 = pi.phi().X1().coords(x);
  double d1 = (x1 - pi.phi().phi_minimizer_coords()).norm();
  double d3 = pi.phi().X3().is_trivial() ? 0.0 : pi.phi().X3().project(x).norm();
  return d1 <= tol && d3 <= tol;
}

}  // namespace detail

/// Locates the solution sets for the given parameter relative to the
/// thresholds; with check_numerically the asserted containment is verified
/// on an actual solve at tolerance check_tol.
inline RegimeLabel classify_regime(const ProblemInstance& pi, const Thresholds& th,
                                   RegimeLabel::Param param, double value,
                                   bool check_numerically = false, double check_tol = 1e-4,
                                   const SolverOptions& opts = {}) {
  RegimeLabel label;
  label.param = param;
  label.value = value;
  if (param == RegimeLabel::Param::Tau) {
    if (value < 0.0) throw InvariantViolation("classify_regime: tau must be >= 0");
    if (value == 0.0) {
      label.zone = RegimeLabel::Zone::AtZero;
      label.containment = "SOL(P1,tau) within N(L); SOL(D1,tau) within argmin Phi*(-L*.)";
    } else if (value < th.c) {
      label.zone = RegimeLabel::Zone::Interior;
      label.containment = "SOL(P1,tau) disjoint from N(L) and from argmin Phi";
    } else {
      label.zone = RegimeLabel::Zone::Saturated;
      label.containment = "SOL(P1,tau) within argmin Phi; SOL(D1,tau) = {0}";
    }
    if (check_numerically) {
      SolveReport r = solve_constrained(pi, value, opts);
      bool ok = r.converged || value == 0.0;
      if (label.zone == RegimeLabel::Zone::AtZero)
        ok = ok && r.lx_norm <= check_tol;
      else if (label.zone == RegimeLabel::Zone::Interior)
        ok = ok && r.lx_norm > opts.nullspace_tol &&
             !detail::near_argmin_phi(pi, r.minimizer, check_tol);
      else
        ok = ok && detail::near_argmin_phi(pi, r.minimizer, check_tol) &&
             r.dual_norm <= check_tol;
      label.numeric_check_ok = ok;
    }
  } else {
    if (value < 0.0) throw InvariantViolation("classify_regime: lambda must be >= 0");
    if (value == 0.0) {
      label.zone = RegimeLabel::Zone::Saturated;
      label.containment = "SOL(P2,lambda) within argmin Phi; SOL(D2,lambda) = {0}";
    } else if (value < th.d) {
      label.zone = RegimeLabel::Zone::Interior;
      label.containment = "SOL(P2,lambda) disjoint from N(L) and from argmin Phi";
    } else {
      label.zone = RegimeLabel::Zone::AtZero;
      label.containment = "SOL(P2,lambda) within N(L); SOL(D2,lambda) within argmin Phi*(-L*.)";
    }
    if (check_numerically) {
      SolveReport r = solve_penalized(pi, value, opts);
      bool ok = r.converged;
      if (label.zone == RegimeLabel::Zone::AtZero)
        ok = ok && r.lx_norm <= check_tol;
      else if (label.zone == RegimeLabel::Zone::Interior)
        ok = ok && r.lx_norm > opts.nullspace_tol &&
             !detail::near_argmin_phi(pi, r.minimizer, check_tol);
      else
        ok = ok && detail::near_argmin_phi(pi, r.minimizer, check_tol);
      label.numeric_check_ok = ok;
    }
  }
  return label;
}

struct SolEqualityReport {
  double hausdorff = kInf;     // between the two brute-force argmin sets
  double min_distance = kInf;  // smallest pairwise distance
  bool equal = false;          // Hausdorff <= 2 * grid_step
  bool disjoint = false;       // min distance > 2 * grid_step

  explicit operator bool() const { return equal; }
};

/// Brute-force check of the solution-set equality along the graph of g:
/// the penalized and constrained argmin sets coincide on-graph and are
/// disjoint off-graph. Oracle-based, dims <= 2 by construction.
inline SolEqualityReport verify_sol_equality(const ProblemInstance& pi, double tau, double lambda,
                                             const Vector& lo, const Vector& hi, double grid_step,
                                             double value_tol = 1e-9) {
  if (pi.ambient_dim() > 2)
    throw BoxTooLarge("verify_sol_equality: oracle route is limited to dims <= 2");
  ProblemInstance local = pi;
  Caps caps;
  caps.proper = false;  // skip the probe validation; the canonical minimizer
                        // need not be feasible for the constrained objective
  ConvexFn penal_obj(
      pi.ambient_dim(), [local, lambda](const Vector& x) {
        return local.penalized_objective(x, lambda);
      },
      caps, pi.phi().canonical_minimizer());
  ConvexFn constr_obj(
      pi.ambient_dim(),
      [local, tau](const Vector& x) {
        double v = local.phi_value(x);
        if (v == kInf) return kInf;
        return local.norm().primal(local.L().apply(x)) <= tau + kFeasTol ? v : kInf;
      },
      caps, pi.phi().canonical_minimizer());

  ArgminSet ps = brute_force_argmin(penal_obj, lo, hi, grid_step, value_tol);
  ArgminSet cs = brute_force_argmin(constr_obj, lo, hi, grid_step, value_tol);

  auto directed = [](const ArgminSet& a, const ArgminSet& b) {
    double worst = 0.0;
    for (const Vector& x : a.points) {
      double best = kInf;
      for (const Vector& y : b.points) best = std::min(best, (x - y).norm());
      worst = std::max(worst, best);
    }
    return worst;
  };
  SolEqualityReport rep;
  rep.hausdorff = std::max(directed(ps, cs), directed(cs, ps));
  rep.min_distance = kInf;
  for (const Vector& x : ps.points)
    for (const Vector& y : cs.points) rep.min_distance = std::min(rep.min_distance, (x - y).norm());
  rep.equal = rep.hausdorff <= 2.0 * grid_step;
  rep.disjoint = rep.min_distance > 2.0 * grid_step;
  return rep;
}

struct CurveSample {
  double tau = 0.0;
  double lambda = 0.0;
  double primal_obj = 0.0;  // Phi value of the recovered primal solution
  double dual_obj = 0.0;    // dual objective of (D1,tau)
  double max_residual = 0.0;
  bool converged = false;
};

struct CorrespondenceCurve {
  std::vector<CurveSample> samples;  // ordered by strictly increasing tau
  Thresholds thresholds;

  bool lambdas_strictly_decreasing(double noise = 1e-5) const {
    for (std::size_t i = 1; i < samples.size(); ++i)
      if (!(samples[i].lambda < samples[i - 1].lambda + noise)) return false;
    return true;
  }

  /// Extrapolation of g toward tau = 0+ from the three smallest samples.
  double extrapolated_d() const {
    if (samples.size() < 3) return kInf;
    double t1 = samples[0].tau, t2 = samples[1].tau, t3 = samples[2].tau;
    double y1 = samples[0].lambda, y2 = samples[1].lambda, y3 = samples[2].lambda;
    return y1 * (0.0 - t2) * (0.0 - t3) / ((t1 - t2) * (t1 - t3)) +
           y2 * (0.0 - t1) * (0.0 - t3) / ((t2 - t1) * (t2 - t3)) +
           y3 * (0.0 - t1) * (0.0 - t2) / ((t3 - t1) * (t3 - t2));
  }

  double g_near_c() const { return samples.empty() ? kInf : samples.back().lambda; }
};

/// Samples (tau, g(tau)) over the given taus, fanning the independent dual
/// solves out to a worker pool; results are merged in tau order.
inline CorrespondenceCurve sample_curve(const ProblemInstance& pi, std::vector<double> taus,
                                        const SolverOptions& opts = {}, int workers = 0,
                                        std::optional<Thresholds> thresholds = std::nullopt) {
  std::sort(taus.begin(), taus.end());
  double c = pi.min_lx_over_argmin();
  for (double t : taus)
    if (!(t > 0.0 && t < c))
      throw InvariantViolation("sample_curve: all taus must lie in (0, c)");
  for (std::size_t i = 1; i < taus.size(); ++i)
    if (taus[i] == taus[i - 1])
      throw InvariantViolation("sample_curve: taus must be strictly increasing");

  CorrespondenceCurve curve;
  curve.thresholds = thresholds ? *thresholds : compute_thresholds(pi, opts);
  curve.samples.resize(taus.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto work = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= taus.size()) break;
      try {
        SolveReport r = solve_dual_penalized(pi, taus[i], opts);
        CurveSample s;
        s.tau = taus[i];
        s.lambda = r.dual_norm;
        s.primal_obj = r.recovered_primal ? pi.phi_value(*r.recovered_primal) : kInf;
        s.dual_obj = r.objective;
        s.max_residual = r.residuals.max_residual();
        s.converged = r.converged;
        curve.samples[i] = s;
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  int nthreads = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
  nthreads = std::max(1, std::min<int>(nthreads, static_cast<int>(taus.size())));
  std::vector<std::thread> pool;
  for (int i = 0; i < nthreads - 1; ++i) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
  return curve;
}

}  // namespace convexcorr
