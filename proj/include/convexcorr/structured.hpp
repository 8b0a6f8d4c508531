#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "convexcorr/convex_fn.hpp"
#include "convexcorr/subspace.hpp"

namespace convexcorr {

namespace detail {

/// sup over [lo,hi] of a concave function, by coarse bracketing plus golden
/// section. Handles +inf plateaus of -g by skipping infeasible samples.
inline double maximize_concave_1d(const std::function<double(double)>& g, double lo, double hi) {
  const int coarse = 512;
  double best = -kInf, best_x = lo;
  for (int i = 0; i <= coarse; ++i) {
    double x = lo + (hi - lo) * i / coarse;
    double v = g(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  if (!std::isfinite(best)) return best;
  double a = std::max(lo, best_x - (hi - lo) / coarse);
  double b = std::min(hi, best_x + (hi - lo) / coarse);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = g(x1), f2 = g(x2);
  for (int it = 0; it < 200 && b - a > 1e-13 * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = g(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = g(x1);
    }
  }
  return std::max(std::max(f1, f2), best);
}

struct BoxMaxResult {
  double value = -kInf;
  Vector argmax;
};

/// sup over a box of x -> <p,x> - f(x), for dim <= 3: coarse grid then
/// cyclic coordinate golden-section sweeps.
inline BoxMaxResult maximize_over_box(const ConvexFn& f, const Vector& p, const Vector& lo,
                                      const Vector& hi) {
  const Eigen::Index n = f.dim();
  BoxMaxResult out;
  auto obj = [&](const Vector& x) {
    double v = f(x);
    return std::isfinite(v) ? p.dot(x) - v : -kInf;
  };
  if (n == 1) {
    double best_x = lo(0);
    auto g = [&](double t) {
      Vector x(1);
      x(0) = t;
      return obj(x);
    };
    // track the maximizer alongside the golden-section value
    const int coarse = 512;
    double best = -kInf;
    for (int i = 0; i <= coarse; ++i) {
      double t = lo(0) + (hi(0) - lo(0)) * i / coarse;
      double v = g(t);
      if (v > best) {
        best = v;
        best_x = t;
      }
    }
    double a = std::max(lo(0), best_x - (hi(0) - lo(0)) / coarse);
    double b = std::min(hi(0), best_x + (hi(0) - lo(0)) / coarse);
    for (int it = 0; it < 300 && b - a > 1e-14 * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
      double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
      if (g(m1) < g(m2))
        a = m1;
      else
        b = m2;
    }
    best_x = 0.5 * (a + b);
    out.value = std::max(best, g(best_x));
    out.argmax = Vector(1);
    out.argmax(0) = best_x;
    return out;
  }
  if (n > 3) throw ConjugateUnavailable("numeric conjugation fallback limited to dim <= 3");
  const int steps = n == 2 ? 64 : 24;
  Vector x = lo, best_x = lo;
  double best = -kInf;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  while (true) {
    for (Eigen::Index d = 0; d < n; ++d)
      x(d) = lo(d) + (hi(d) - lo(d)) * idx[static_cast<std::size_t>(d)] / steps;
    double v = obj(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
    Eigen::Index d = 0;
    while (d < n && ++idx[static_cast<std::size_t>(d)] > steps) {
      idx[static_cast<std::size_t>(d)] = 0;
      ++d;
    }
    if (d == n) break;
  }
  // coordinate refinement
  Vector cur = best_x;
  for (int sweep = 0; sweep < 12; ++sweep) {
    for (Eigen::Index d = 0; d < n; ++d) {
      double span = (hi(d) - lo(d)) / steps;
      double a = std::max(lo(d), cur(d) - span), b = std::min(hi(d), cur(d) + span);
      auto g = [&](double t) {
        Vector y = cur;
        y(d) = t;
        return obj(y);
      };
      for (int it = 0; it < 120 && b - a > 1e-13; ++it) {
        double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
        if (g(m1) < g(m2))
          a = m1;
        else
          b = m2;
      }
      cur(d) = 0.5 * (a + b);
    }
  }
  double refined = obj(cur);
  if (refined > best) {
    best = refined;
    best_x = cur;
  }
  out.value = best;
  out.argmax = best_x;
  return out;
}

}  // namespace detail

/// Semidirect sum (F1 ⊞ F2)(x1 + x2) = F1(x1) + F2(x2) on S1 ⊕ S2.
/// Points are decomposed by solving the (possibly oblique) linear system in
/// the joint basis; points outside S1 + S2 evaluate to +inf.
inline ConvexFn semidirect_sum(const ConvexFn& f1, const Subspace& s1, const ConvexFn& f2,
                               const Subspace& s2) {
  if (s1.ambient_dim() != s2.ambient_dim())
    throw DimensionMismatch("semidirect_sum: ambient dimensions differ");
  if (s1.is_trivial() || s2.is_trivial())
    throw DimensionMismatch("semidirect_sum: summand subspaces must be nontrivial");
  if (f1.dim() != s1.dim()) throw DimensionMismatch("semidirect_sum: F1 dim != dim(S1)");
  if (f2.dim() != s2.dim()) throw DimensionMismatch("semidirect_sum: F2 dim != dim(S2)");
  SubspaceSum joint = sum(s1, s2);
  if (!joint.is_direct) throw NotDirect("semidirect_sum: S1 + S2 is not direct");

  const Eigen::Index n = s1.ambient_dim();
  const Eigen::Index k1 = s1.dim(), k2 = s2.dim();
  Matrix joined(n, k1 + k2);
  joined.leftCols(k1) = s1.basis();
  joined.rightCols(k2) = s2.basis();
  Eigen::CompleteOrthogonalDecomposition<Matrix> dec(joined);

  Caps caps;
  caps.proper = f1.caps().proper && f2.caps().proper;
  caps.lsc = f1.caps().lsc && f2.caps().lsc;
  caps.convex = f1.caps().convex && f2.caps().convex;
  caps.bounded_below = f1.caps().bounded_below && f2.caps().bounded_below;

  Vector probe = s1.from_coords(f1.probe_point()) + s2.from_coords(f2.probe_point());
  if (!caps.proper) probe = Vector::Zero(n);

  auto f1c = f1;  // capture copies; oracles are shareable values
  auto f2c = f2;
  return ConvexFn(
      n,
      [f1c, f2c, dec, joined, k1, k2](const Vector& x) {
        Vector coeff = dec.solve(x);
        if ((joined * coeff - x).norm() > 1e-9 * std::max(1.0, x.norm())) return kInf;
        double v1 = f1c(coeff.head(k1));
        double v2 = f2c(coeff.tail(k2));
        if (v1 == kInf || v2 == kInf) return kInf;
        return v1 + v2;
      },
      caps, probe);
}

/// Phi meeting the structured setting: R^n = X1 ⊕ X2 ⊕ X3 pairwise
/// orthogonal, Phi(x) = phi(x1) when x3 = 0 and +inf otherwise. Construction
/// enforces the decomposition and the proper/lsc/convex flags; strict
/// convexity and essential smoothness stay declared capabilities that
/// meets_setting_demands() reports.
class StructuredPhi {
 public:
  StructuredPhi(Subspace x1, Subspace x2, Subspace x3, ConvexFn phi, Vector phi_minimizer)
      : x1_(std::move(x1)),
        x2_(std::move(x2)),
        x3_(std::move(x3)),
        phi_(std::move(phi)),
        phi_min_(std::move(phi_minimizer)) {
    const Eigen::Index n = x1_.ambient_dim();
    if (x2_.ambient_dim() != n || x3_.ambient_dim() != n)
      throw AmbientMismatch("StructuredPhi: ambient dims differ");
    if (x1_.dim() + x2_.dim() + x3_.dim() != n)
      throw InvariantViolation("StructuredPhi: subspace dims must sum to the ambient dim");
    if (!is_orthogonal_pair(x1_, x2_) || !is_orthogonal_pair(x1_, x3_) ||
        !is_orthogonal_pair(x2_, x3_))
      throw InvariantViolation("StructuredPhi: subspaces must be pairwise orthogonal");
    if (x1_.is_trivial()) throw InvariantViolation("StructuredPhi: X1 must be nontrivial");
    if (phi_.dim() != x1_.dim())
      throw DimensionMismatch("StructuredPhi: phi dim != dim(X1)");
    if (phi_min_.size() != x1_.dim())
      throw DimensionMismatch("StructuredPhi: minimizer must be given in X1 coordinates");
    if (!phi_.caps().proper || !phi_.caps().lsc || !phi_.caps().convex)
      throw CapabilityMissing("StructuredPhi: phi must declare proper, lsc and convex");
    if (!std::isfinite(phi_(phi_min_)))
      throw InvariantViolation("StructuredPhi: phi not finite at its declared minimizer");
    if (phi_.caps().strictly_convex_on_ri && !spot_check_strict_convexity(phi_))
      throw CapabilityMissing(
          "StructuredPhi: declared strict convexity failed the midpoint spot check");
  }

  const Subspace& X1() const { return x1_; }
  const Subspace& X2() const { return x2_; }
  const Subspace& X3() const { return x3_; }
  const ConvexFn& phi() const { return phi_; }
  Eigen::Index ambient_dim() const { return x1_.ambient_dim(); }

  /// Whether phi carries all capability demands of the structured setting.
  bool meets_setting_demands() const {
    const Caps& c = phi_.caps();
    return c.proper && c.lsc && c.convex && c.strictly_convex_on_ri && c.essentially_smooth;
  }

  /// x3-component tolerance below which a point counts as feasible.
  static constexpr double kX3Tol = 1e-9;

  double eval(const Vector& x) const {
    if (!x3_.is_trivial() && x3_.project(x).norm() > kX3Tol) return kInf;
    return phi_(x1_.coords(x));
  }

  /// Canonical minimizer x_check = the declared phi minimizer embedded in X1.
  Vector canonical_minimizer() const { return x1_.from_coords(phi_min_); }
  const Vector& phi_minimizer_coords() const { return phi_min_; }

  bool has_prox() const { return phi_.has_prox(); }

  /// prox of Phi decomposes along the orthogonal pieces: prox of phi on the
  /// X1 coordinates, identity on X2, projection to zero on X3.
  Vector prox(const Vector& v, double step) const {
    Vector c1 = phi_.prox(x1_.coords(v), step);
    return x1_.from_coords(c1) + x2_.project(v);
  }

  SubgradientDescriptor subgradient(const Vector& x) const {
    const Eigen::Index n = ambient_dim();
    if (!x3_.is_trivial() && x3_.project(x).norm() > kX3Tol)
      return SubgradientDescriptor::empty(n);
    std::vector<SubgradientDescriptor::Part> parts;
    parts.push_back({x1_, phi_.subgradient(x1_.coords(x))});
    if (!x2_.is_trivial())
      parts.push_back({x2_, SubgradientDescriptor::singleton(Vector::Zero(x2_.dim()))});
    if (!x3_.is_trivial()) parts.push_back({x3_, SubgradientDescriptor::whole(x3_.dim())});
    if (parts.front().desc.is_empty()) return SubgradientDescriptor::empty(n);
    return SubgradientDescriptor::direct_sum(n, std::move(parts));
  }

  /// Phi as a plain ConvexFn (evaluation, subgradient and prox oracles).
  ConvexFn as_convex_fn() const {
    StructuredPhi self = *this;
    Caps caps = phi_.caps();
    ConvexFn f(
        ambient_dim(), [self](const Vector& x) { return self.eval(x); }, caps,
        canonical_minimizer());
    f.with_subgradient([self](const Vector& x) { return self.subgradient(x); });
    if (phi_.has_prox())
      f.with_prox([self](const Vector& v, double t) { return self.prox(v, t); });
    return f;
  }

 private:
  Subspace x1_, x2_, x3_;
  ConvexFn phi_;
  Vector phi_min_;
};

inline SubgradientDescriptor structured_subgradient(const StructuredPhi& sp, const Vector& x) {
  return sp.subgradient(x);
}

/// Value of phi* at a point of X1 (coordinates), using the closed form when
/// present and otherwise the declared-box numeric fallback.
inline double phi_conjugate_value(const ConvexFn& phi, const Vector& p, bool numeric_fallback) {
  if (phi.has_conjugate()) return phi.conjugate(p);
  if (!numeric_fallback)
    throw ConjugateUnavailable("phi has no closed-form conjugate and fallback is disabled");
  if (!phi.conjugate_box())
    throw ConjugateUnavailable("numeric conjugation requires a declared box");
  return detail::maximize_over_box(phi, p, phi.conjugate_box()->first, phi.conjugate_box()->second)
      .value;
}

/// A maximizer of <p,x> - phi(x), i.e. an element of the subdifferential of
/// phi* at p. Closed form when available, else the numeric inner sup.
inline Vector phi_conjugate_argmax(const ConvexFn& phi, const Vector& p) {
  if (phi.has_conjugate_subgradient()) {
    SubgradientDescriptor d = phi.conjugate_subgradient(p);
    if (!d.is_empty()) return d.representative();
  }
  if (!phi.conjugate_box())
    throw ConjugateUnavailable("cannot recover conjugate argmax without closed form or box");
  return detail::maximize_over_box(phi, p, phi.conjugate_box()->first, phi.conjugate_box()->second)
      .argmax;
}

/// Conjugate of the structured Phi: the same structure with the roles of X2
/// and X3 interchanged, Phi*(y) = phi*(y1) when the X2 component vanishes.
inline ConvexFn conjugate_of_structured(const StructuredPhi& sp, bool numeric_fallback = true) {
  if (!sp.phi().has_conjugate() && !numeric_fallback)
    throw ConjugateUnavailable("conjugate_of_structured: no closed form and fallback disabled");
  if (!sp.phi().has_conjugate() && !sp.phi().conjugate_box())
    throw ConjugateUnavailable("conjugate_of_structured: numeric fallback needs a declared box");
  StructuredPhi self = sp;
  Caps caps;  // proper, lsc, convex by conjugacy
  const Eigen::Index n = sp.ambient_dim();
  Vector probe = Vector::Zero(n);
  bool fallback = numeric_fallback;
  return ConvexFn(
      n,
      [self, fallback](const Vector& y) {
        if (!self.X2().is_trivial() && self.X2().project(y).norm() > StructuredPhi::kX3Tol)
          return kInf;
        return phi_conjugate_value(self.phi(), self.X1().coords(y), fallback);
      },
      caps, probe);
}

}  // namespace convexcorr
