#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "convexcorr/errors.hpp"
#include "convexcorr/norms.hpp"
#include "convexcorr/subspace.hpp"

namespace convexcorr {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
/// Absolute feasibility tolerance for indicator functions.
inline constexpr double kFeasTol = 1e-8;
/// Default tolerance for subgradient membership residuals.
inline constexpr double kMembershipTol = 1e-8;

/// Values of our functions live in R ∪ {+inf}. -inf and NaN are rejected at
/// the oracle boundary, which keeps them unrepresentable downstream.
inline double checked_value(double v) {
  if (std::isnan(v) || v == -kInf)
    throw InvariantViolation("function value must be finite or +inf");
  return v;
}

struct SubgradCheck {
  bool member = false;
  double residual = kInf;
};

/// Declared analytic capabilities of a function. Proper/lsc/convex are
/// validated by construction-time probes where cheap; the rest are trusted
/// declarations that downstream criteria consume as hypotheses.
struct Caps {
  bool proper = true;
  bool lsc = true;
  bool convex = true;
  bool strictly_convex_on_ri = false;
  bool essentially_smooth = false;
  bool coercive = false;
  bool locally_bounded_below = false;
  bool bounded_below = false;
};

/// Subdifferential of a function at a point, exposed as a membership test
/// plus one representative element. Closed forms cover everything the
/// certificates need; no polytope enumeration.
class SubgradientDescriptor {
 public:
  enum class Kind { Empty, Whole, Singleton, Interval1d, Ray, DualBallScaled, DualFace, DirectSum };

  struct Part;  // (space, descriptor-in-subspace-coordinates), defined below

  static SubgradientDescriptor empty(Eigen::Index dim) {
    SubgradientDescriptor d(Kind::Empty, dim);
    return d;
  }

  static SubgradientDescriptor whole(Eigen::Index dim) {
    SubgradientDescriptor d(Kind::Whole, dim);
    return d;
  }

  static SubgradientDescriptor singleton(Vector g) {
    SubgradientDescriptor d(Kind::Singleton, g.size());
    d.point_ = std::move(g);
    return d;
  }

  static SubgradientDescriptor interval_1d(double lo, double hi) {
    if (lo > hi) throw InvariantViolation("interval_1d: lo > hi");
    SubgradientDescriptor d(Kind::Interval1d, 1);
    d.lo_ = lo;
    d.hi_ = hi;
    return d;
  }

  /// The cone { s*g : s >= 0 } spanned by a single direction.
  static SubgradientDescriptor ray(Vector g) {
    SubgradientDescriptor d(Kind::Ray, g.size());
    d.point_ = std::move(g);
    return d;
  }

  /// { p : ||p||_* <= radius }
  static SubgradientDescriptor dual_ball_scaled(NormPair np, Eigen::Index dim, double radius) {
    SubgradientDescriptor d(Kind::DualBallScaled, dim);
    d.normpair_ = np;
    d.radius_ = radius;
    return d;
  }

  /// { p : <p,x> = ||x||, ||p||_* = 1 } for a fixed x != 0.
  static SubgradientDescriptor dual_face(NormPair np, Vector x) {
    SubgradientDescriptor d(Kind::DualFace, x.size());
    d.normpair_ = np;
    d.point_ = std::move(x);
    return d;
  }

  /// Direct sum over pairwise orthogonal subspaces; a membership candidate
  /// must also lie in the span of the parts.
  static SubgradientDescriptor direct_sum(Eigen::Index ambient, std::vector<Part> parts);

  Kind kind() const { return kind_; }
  Eigen::Index dim() const { return dim_; }
  bool is_empty() const { return kind_ == Kind::Empty; }
  double interval_lo() const { return lo_; }
  double interval_hi() const { return hi_; }

  SubgradCheck membership(const Vector& p, double tol = kMembershipTol) const;

  /// One element of the set (throws on Empty).
  Vector representative() const;

 private:
  SubgradientDescriptor(Kind kind, Eigen::Index dim) : kind_(kind), dim_(dim) {}

  Kind kind_;
  Eigen::Index dim_;
  Vector point_;
  double lo_ = 0.0, hi_ = 0.0;
  std::optional<NormPair> normpair_;
  double radius_ = 0.0;
  std::shared_ptr<std::vector<Part>> parts_;
};

struct SubgradientDescriptor::Part {
  Subspace space;
  SubgradientDescriptor desc;  // descriptor in the subspace's coordinates
};

inline SubgradientDescriptor SubgradientDescriptor::direct_sum(Eigen::Index ambient,
                                                               std::vector<Part> parts) {
  SubgradientDescriptor d(Kind::DirectSum, ambient);
  d.parts_ = std::make_shared<std::vector<Part>>(std::move(parts));
  return d;
}

inline SubgradCheck SubgradientDescriptor::membership(const Vector& p, double tol) const {
  if (p.size() != dim_) throw DimensionMismatch("SubgradientDescriptor: wrong candidate dim");
  SubgradCheck out;
  switch (kind_) {
    case Kind::Empty:
      out.member = false;
      out.residual = kInf;
      break;
    case Kind::Whole:
      out.member = true;
      out.residual = 0.0;
      break;
    case Kind::Singleton:
      out.residual = (p - point_).norm();
      out.member = out.residual <= tol;
      break;
    case Kind::Interval1d: {
      double v = p(0);
      out.residual = v < lo_ ? lo_ - v : (v > hi_ ? v - hi_ : 0.0);
      out.member = out.residual <= tol;
      break;
    }
    case Kind::Ray: {
      double g2 = point_.squaredNorm();
      double s = g2 > 0 ? std::max(0.0, p.dot(point_) / g2) : 0.0;
      out.residual = (p - s * point_).norm();
      out.member = out.residual <= tol;
      break;
    }
    case Kind::DualBallScaled: {
      out.residual = std::max(0.0, normpair_->dual(p) - radius_);
      out.member = out.residual <= tol;
      break;
    }
    case Kind::DualFace: {
      double pairing = std::abs(point_.dot(p) - normpair_->primal(point_));
      double unit = std::abs(normpair_->dual(p) - 1.0);
      out.residual = std::max(pairing, unit);
      out.member = out.residual <= tol;
      break;
    }
    case Kind::DirectSum: {
      double res = 0.0;
      Vector covered = Vector::Zero(dim_);
      for (const Part& part : *parts_) {
        Vector proj = part.space.project(p);
        covered += proj;
        SubgradCheck c = part.desc.membership(part.space.coords(p), tol);
        res = std::max(res, c.residual);
      }
      res = std::max(res, (p - covered).norm());
      out.residual = res;
      out.member = res <= tol;
      break;
    }
  }
  return out;
}

inline Vector SubgradientDescriptor::representative() const {
  switch (kind_) {
    case Kind::Empty:
      throw InvariantViolation("representative of empty subdifferential");
    case Kind::Whole:
      return Vector::Zero(dim_);
    case Kind::Singleton:
      return point_;
    case Kind::Interval1d: {
      Vector v(1);
      v(0) = (lo_ <= 0.0 && 0.0 <= hi_) ? 0.0 : (std::abs(lo_) < std::abs(hi_) ? lo_ : hi_);
      return v;
    }
    case Kind::Ray:
      return point_;
    case Kind::DualBallScaled:
      return Vector::Zero(dim_);
    case Kind::DualFace:
      return normpair_->norm_gradient_representative(point_);
    case Kind::DirectSum: {
      Vector out = Vector::Zero(dim_);
      for (const Part& part : *parts_) out += part.space.from_coords(part.desc.representative());
      return out;
    }
  }
  return Vector::Zero(dim_);
}

/// An evaluable function R^k -> R ∪ {+inf} carrying the oracles used across
/// the library. All oracles must be pure; ConvexFn values are shareable
/// read-only objects.
class ConvexFn {
 public:
  using EvalFn = std::function<double(const Vector&)>;
  using SubgradFn = std::function<SubgradientDescriptor(const Vector&)>;
  using ProxFn = std::function<Vector(const Vector&, double)>;

  ConvexFn(Eigen::Index dim, EvalFn eval, Caps caps, Vector probe_point)
      : dim_(dim), eval_(std::move(eval)), caps_(caps), probe_(std::move(probe_point)) {
    if (dim_ <= 0) throw DimensionMismatch("ConvexFn: dim must be positive");
    if (probe_.size() != dim_) throw DimensionMismatch("ConvexFn: probe point has wrong dim");
    if (caps_.proper && !(std::isfinite((*this)(probe_))))
      throw InvariantViolation("ConvexFn: declared proper but probe point value not finite");
  }

  ConvexFn& with_subgradient(SubgradFn f) {
    subgrad_ = std::move(f);
    return *this;
  }

  ConvexFn& with_conjugate(EvalFn f) {
    conjugate_ = std::move(f);
    return *this;
  }

  /// Subdifferential of the conjugate, used to recover primal points from
  /// dual solutions.
  ConvexFn& with_conjugate_subgradient(SubgradFn f) {
    conj_subgrad_ = std::move(f);
    return *this;
  }

  ConvexFn& with_prox(ProxFn f) {
    prox_ = std::move(f);
    return *this;
  }

  /// Box for the numeric conjugation fallback sup_x <p,x> - f(x).
  ConvexFn& with_conjugate_box(Vector lo, Vector hi) {
    if (lo.size() != dim_ || hi.size() != dim_)
      throw DimensionMismatch("with_conjugate_box: wrong dim");
    conj_box_ = std::make_pair(std::move(lo), std::move(hi));
    return *this;
  }

  Eigen::Index dim() const { return dim_; }
  const Caps& caps() const { return caps_; }
  Caps& mutable_caps() { return caps_; }
  const Vector& probe_point() const { return probe_; }

  double operator()(const Vector& x) const {
    if (x.size() != dim_) throw DimensionMismatch("ConvexFn: wrong argument dim");
    return checked_value(eval_(x));
  }

  bool has_subgradient() const { return static_cast<bool>(subgrad_); }
  SubgradientDescriptor subgradient(const Vector& x) const {
    if (!subgrad_) throw InvariantViolation("ConvexFn: no subgradient oracle");
    if (x.size() != dim_) throw DimensionMismatch("ConvexFn: wrong argument dim");
    return subgrad_(x);
  }

  SubgradCheck subgrad_membership(const Vector& x, const Vector& candidate,
                                  double tol = kMembershipTol) const {
    return subgradient(x).membership(candidate, tol);
  }

  bool has_conjugate() const { return static_cast<bool>(conjugate_); }
  double conjugate(const Vector& p) const {
    if (!conjugate_) throw ConjugateUnavailable("ConvexFn: no conjugate oracle");
    if (p.size() != dim_) throw DimensionMismatch("ConvexFn: wrong argument dim");
    return checked_value(conjugate_(p));
  }

  bool has_conjugate_subgradient() const { return static_cast<bool>(conj_subgrad_); }
  SubgradientDescriptor conjugate_subgradient(const Vector& p) const {
    if (!conj_subgrad_) throw ConjugateUnavailable("ConvexFn: no conjugate subgradient oracle");
    return conj_subgrad_(p);
  }

  bool has_prox() const { return static_cast<bool>(prox_); }
  Vector prox(const Vector& v, double step) const {
    if (!prox_) throw InvariantViolation("ConvexFn: no prox oracle");
    if (v.size() != dim_) throw DimensionMismatch("ConvexFn: wrong argument dim");
    return prox_(v, step);
  }

  const std::optional<std::pair<Vector, Vector>>& conjugate_box() const { return conj_box_; }

 private:
  Eigen::Index dim_;
  EvalFn eval_;
  Caps caps_;
  Vector probe_;
  SubgradFn subgrad_;
  EvalFn conjugate_;
  SubgradFn conj_subgrad_;
  ProxFn prox_;
  std::optional<std::pair<Vector, Vector>> conj_box_;
};

/// Numeric spot check of a declared strict-convexity flag: 200 random
/// midpoint tests f((x+y)/2) < (f(x)+f(y))/2 - eps near the probe point.
/// Essential smoothness has no such check and stays trusted.
inline bool spot_check_strict_convexity(const ConvexFn& f, unsigned seed = 0) {
  std::mt19937_64 rng(seed ^ 0x853c49e6748fea9bULL);
  std::normal_distribution<double> gauss;
  int done = 0;
  for (int attempt = 0; attempt < 5000 && done < 200; ++attempt) {
    Vector x = f.probe_point(), y = f.probe_point();
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      x(i) += gauss(rng);
      y(i) += gauss(rng);
    }
    if ((x - y).norm() < 1e-6) continue;
    double fx = f(x), fy = f(y);
    if (!std::isfinite(fx) || !std::isfinite(fy)) continue;
    double mid = f(0.5 * (x + y));
    double scale = std::max({1.0, std::abs(fx), std::abs(fy)});
    if (!(mid < 0.5 * (fx + fy) - 1e-12 * scale)) return false;
    ++done;
  }
  return done > 0;
}

/// View of f restricted to a subspace, expressed in the subspace's
/// orthonormal coordinates.
inline ConvexFn restrict_to_subspace(const ConvexFn& f, const Subspace& s) {
  if (f.dim() != s.ambient_dim())
    throw DimensionMismatch("restrict_to_subspace: f must live on the ambient space");
  if (s.is_trivial()) throw DimensionMismatch("restrict_to_subspace: subspace is trivial");
  ConvexFn fc = f;
  Subspace sc = s;
  Caps caps = f.caps();
  Vector probe = s.coords(f.probe_point());
  if (caps.proper && !std::isfinite(f(s.from_coords(probe)))) caps.proper = false;
  return ConvexFn(
      s.dim(), [fc, sc](const Vector& c) { return fc(sc.from_coords(c)); }, caps, probe);
}

/// The constant zero function (bounded below, not coercive for dim >= 1).
inline ConvexFn zero_fn(Eigen::Index dim) {
  Caps caps;
  caps.bounded_below = true;
  caps.locally_bounded_below = true;
  caps.essentially_smooth = true;
  ConvexFn f(dim, [](const Vector&) { return 0.0; }, caps, Vector::Zero(dim));
  f.with_subgradient([dim](const Vector&) {
     return SubgradientDescriptor::singleton(Vector::Zero(dim));
   })
      .with_conjugate([](const Vector& p) { return p.norm() <= kMembershipTol ? 0.0 : kInf; })
      .with_prox([](const Vector& v, double) { return v; });
  return f;
}

/// Subdifferential of the norm itself (Psi_2 in the problem family):
/// the unit dual ball at 0, else the dual face at x.
inline SubgradientDescriptor norm_subgradient(const NormPair& np, const Vector& x) {
  if (np.primal(x) <= kMembershipTol)
    return SubgradientDescriptor::dual_ball_scaled(np, x.size(), 1.0);
  return SubgradientDescriptor::dual_face(np, x);
}

/// Indicator of { x : ||Ax|| <= tau } as a ConvexFn (plus a normal-cone
/// membership test adequate for boundary certificates at desk scale).
inline ConvexFn indicator_levelset(const NormPair& np, const LinearMap& a, double tau) {
  if (tau < 0.0) throw InvariantViolation("indicator_levelset: tau must be >= 0");
  Caps caps;
  caps.bounded_below = true;
  caps.locally_bounded_below = true;
  Vector probe = Vector::Zero(a.cols());
  Matrix ae = a.entries();
  ConvexFn f(
      a.cols(),
      [np, ae, tau](const Vector& x) {
        return norm_value(np.tag(), ae * x) <= tau + kFeasTol ? 0.0 : kInf;
      },
      caps, probe);
  f.with_subgradient([np, ae, tau](const Vector& x) -> SubgradientDescriptor {
    const Eigen::Index n = ae.cols();
    Vector y = ae * x;
    double r = norm_value(np.tag(), y);
    if (r > tau + kFeasTol) return SubgradientDescriptor::empty(n);
    if (tau == 0.0) {
      // level set = N(A); the normal cone at any of its points is R(A*)
      std::vector<SubgradientDescriptor::Part> parts;
      Subspace ra = range_of_adjoint(LinearMap(ae));
      if (ra.is_trivial()) return SubgradientDescriptor::singleton(Vector::Zero(n));
      parts.push_back({ra, SubgradientDescriptor::whole(ra.dim())});
      return SubgradientDescriptor::direct_sum(n, std::move(parts));
    }
    if (r < tau - kFeasTol) return SubgradientDescriptor::singleton(Vector::Zero(n));
    // boundary: normal cone, represented by its outward gradient ray
    Vector g = ae.transpose() * np.norm_gradient_representative(y);
    return SubgradientDescriptor::ray(g);
  });
  return f;
}

}  // namespace convexcorr
