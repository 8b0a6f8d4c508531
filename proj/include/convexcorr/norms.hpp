#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "convexcorr/errors.hpp"
#include "convexcorr/subspace.hpp"

namespace convexcorr {

enum class NormTag { L1, L2, Linf };

inline double norm_value(NormTag tag, const Vector& x) {
  switch (tag) {
    case NormTag::L1:
      return x.lpNorm<1>();
    case NormTag::L2:
      return x.norm();
    case NormTag::Linf:
      return x.size() ? x.lpNorm<Eigen::Infinity>() : 0.0;
  }
  return 0.0;
}

inline NormTag dual_tag(NormTag tag) {
  switch (tag) {
    case NormTag::L1:
      return NormTag::Linf;
    case NormTag::Linf:
      return NormTag::L1;
    case NormTag::L2:
      return NormTag::L2;
  }
  return NormTag::L2;
}

namespace detail {

/// Euclidean projection onto { x : ||x||_1 <= radius } (sort-based).
inline Vector project_l1_ball(const Vector& x, double radius) {
  if (radius <= 0.0) return Vector::Zero(x.size());
  if (x.lpNorm<1>() <= radius) return x;
  std::vector<double> u(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) u[static_cast<std::size_t>(i)] = std::abs(x(i));
  std::sort(u.begin(), u.end(), std::greater<double>());
  double csum = 0.0, theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    csum += u[k];
    double t = (csum - radius) / static_cast<double>(k + 1);
    if (t >= (k + 1 < u.size() ? u[k + 1] : 0.0)) {
      theta = t;
      break;
    }
  }
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double mag = std::max(std::abs(x(i)) - theta, 0.0);
    out(i) = x(i) >= 0 ? mag : -mag;
  }
  return out;
}

}  // namespace detail

inline Vector project_norm_ball(NormTag tag, const Vector& x, double radius) {
  if (radius < 0.0) throw InvariantViolation("project_norm_ball: negative radius");
  switch (tag) {
    case NormTag::L2: {
      double n = x.norm();
      return n <= radius ? x : Vector(x * (radius / n));
    }
    case NormTag::Linf:
      return x.cwiseMax(-radius).cwiseMin(radius);
    case NormTag::L1:
      return detail::project_l1_ball(x, radius);
  }
  return x;
}

/// A norm together with its dual norm, tagged by one of the supported pairs:
/// L1 <-> Linf, L2 <-> L2.
class NormPair {
 public:
  explicit NormPair(NormTag tag) : tag_(tag) {}

  static NormPair l1() { return NormPair(NormTag::L1); }
  static NormPair l2() { return NormPair(NormTag::L2); }
  static NormPair linf() { return NormPair(NormTag::Linf); }

  static NormPair from_name(const std::string& name) {
    if (name == "L1" || name == "l1") return l1();
    if (name == "L2" || name == "l2") return l2();
    if (name == "Linf" || name == "linf" || name == "Loo") return linf();
    throw UnknownName("NormPair: unknown norm tag '" + name + "'");
  }

  NormTag tag() const { return tag_; }

  const char* name() const {
    switch (tag_) {
      case NormTag::L1:
        return "L1";
      case NormTag::L2:
        return "L2";
      case NormTag::Linf:
        return "Linf";
    }
    return "?";
  }

  double primal(const Vector& x) const { return norm_value(tag_, x); }
  double dual(const Vector& p) const { return norm_value(dual_tag(tag_), p); }

  Vector project_primal_ball(const Vector& x, double radius) const {
    return project_norm_ball(tag_, x, radius);
  }
  Vector project_dual_ball(const Vector& p, double radius) const {
    return project_norm_ball(dual_tag(tag_), p, radius);
  }

  /// A canonical element of the subdifferential of the primal norm at x.
  Vector norm_gradient_representative(const Vector& x) const {
    const Eigen::Index m = x.size();
    Vector g = Vector::Zero(m);
    switch (tag_) {
      case NormTag::L2: {
        double n = x.norm();
        if (n > 0) g = x / n;
        break;
      }
      case NormTag::L1:
        for (Eigen::Index i = 0; i < m; ++i) g(i) = x(i) > 0 ? 1.0 : (x(i) < 0 ? -1.0 : 0.0);
        break;
      case NormTag::Linf: {
        double n = primal(x);
        if (n > 0) {
          Eigen::Index imax = 0;
          x.cwiseAbs().maxCoeff(&imax);
          g(imax) = x(imax) > 0 ? 1.0 : -1.0;
        }
        break;
      }
    }
    return g;
  }

 private:
  NormTag tag_;
};

}  // namespace convexcorr
