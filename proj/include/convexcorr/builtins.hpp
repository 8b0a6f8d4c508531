#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "convexcorr/convex_fn.hpp"

namespace convexcorr {

namespace detail {

inline Vector scalar_vec(double v) {
  Vector x(1);
  x(0) = v;
  return x;
}

inline double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace detail

struct BuiltinFn {
  ConvexFn fn;
  std::optional<Vector> minimizer;  // canonical minimizer in the function's coordinates
};

/// phi(x) = (x-2)^2 for x >= 1, m(x-1)+1 for x < 1, with m <= -2.
/// Convex with a kink at 1; neither strictly convex nor essentially smooth.
inline BuiltinFn make_piecewise_remark2(double m) {
  if (m > -2.0) throw InvariantViolation("piecewise_remark2: requires m <= -2");
  Caps caps;
  caps.coercive = true;
  caps.locally_bounded_below = true;
  caps.bounded_below = true;
  ConvexFn f(
      1,
      [m](const Vector& x) {
        double v = x(0);
        return v >= 1.0 ? (v - 2.0) * (v - 2.0) : m * (v - 1.0) + 1.0;
      },
      caps, detail::scalar_vec(2.0));
  f.with_subgradient([m](const Vector& x) {
     double v = x(0);
     const double eps = 1e-12;
     if (v > 1.0 + eps) return SubgradientDescriptor::singleton(detail::scalar_vec(2.0 * (v - 2.0)));
     if (v < 1.0 - eps) return SubgradientDescriptor::singleton(detail::scalar_vec(m));
     return SubgradientDescriptor::interval_1d(m, -2.0);
   })
      .with_conjugate([m](const Vector& p) {
        double q = p(0);
        if (q < m) return kInf;
        if (q <= -2.0) return q - 1.0;
        return 2.0 * q + q * q / 4.0;
      })
      .with_conjugate_subgradient([m](const Vector& p) {
        double q = p(0);
        if (q < m) return SubgradientDescriptor::empty(1);
        if (q == m) return SubgradientDescriptor::interval_1d(-kInf, 1.0);
        if (q <= -2.0) return SubgradientDescriptor::singleton(detail::scalar_vec(1.0));
        return SubgradientDescriptor::singleton(detail::scalar_vec(2.0 + q / 2.0));
      })
      .with_prox([m](const Vector& v, double t) {
        double w = v(0);
        if (w >= 1.0 - 2.0 * t) return detail::scalar_vec((w + 4.0 * t) / (1.0 + 2.0 * t));
        if (w <= 1.0 + t * m) return detail::scalar_vec(w - t * m);
        return detail::scalar_vec(1.0);
      })
      .with_conjugate_box(detail::scalar_vec(-50.0), detail::scalar_vec(50.0));
  return BuiltinFn{std::move(f), detail::scalar_vec(2.0)};
}

/// phi(x) = |x - a|.
inline BuiltinFn make_abs_shift(double a) {
  Caps caps;
  caps.coercive = true;
  caps.locally_bounded_below = true;
  caps.bounded_below = true;
  ConvexFn f(1, [a](const Vector& x) { return std::abs(x(0) - a); }, caps, detail::scalar_vec(a));
  f.with_subgradient([a](const Vector& x) {
     double v = x(0);
     const double eps = 1e-12;
     if (v > a + eps) return SubgradientDescriptor::singleton(detail::scalar_vec(1.0));
     if (v < a - eps) return SubgradientDescriptor::singleton(detail::scalar_vec(-1.0));
     return SubgradientDescriptor::interval_1d(-1.0, 1.0);
   })
      .with_conjugate([a](const Vector& p) {
        double q = p(0);
        return std::abs(q) <= 1.0 + 1e-12 ? a * q : kInf;
      })
      .with_conjugate_subgradient([a](const Vector& p) {
        double q = p(0);
        if (std::abs(q) > 1.0 + 1e-12) return SubgradientDescriptor::empty(1);
        if (q > 1.0 - 1e-12) return SubgradientDescriptor::interval_1d(a, kInf);
        if (q < -1.0 + 1e-12) return SubgradientDescriptor::interval_1d(-kInf, a);
        return SubgradientDescriptor::singleton(detail::scalar_vec(a));
      })
      .with_prox([a](const Vector& v, double t) {
        return detail::scalar_vec(a + detail::soft_threshold(v(0) - a, t));
      })
      .with_conjugate_box(detail::scalar_vec(-64.0), detail::scalar_vec(64.0));
  return BuiltinFn{std::move(f), detail::scalar_vec(a)};
}

/// phi(x) = (x-4)^2 for x <= 2, 2(x-3)^2 + 2 for x > 2.
/// C^1, strictly convex, unique minimizer at 3 with value 2.
inline BuiltinFn make_piecewise_gdemo() {
  Caps caps;
  caps.strictly_convex_on_ri = true;
  caps.essentially_smooth = true;
  caps.coercive = true;
  caps.locally_bounded_below = true;
  caps.bounded_below = true;
  ConvexFn f(
      1,
      [](const Vector& x) {
        double v = x(0);
        return v <= 2.0 ? (v - 4.0) * (v - 4.0) : 2.0 * (v - 3.0) * (v - 3.0) + 2.0;
      },
      caps, detail::scalar_vec(3.0));
  f.with_subgradient([](const Vector& x) {
     double v = x(0);
     double g = v <= 2.0 ? 2.0 * (v - 4.0) : 4.0 * (v - 3.0);
     return SubgradientDescriptor::singleton(detail::scalar_vec(g));
   })
      .with_conjugate([](const Vector& p) {
        double q = p(0);
        return q <= -4.0 ? 4.0 * q + q * q / 4.0 : 3.0 * q + q * q / 8.0 - 2.0;
      })
      .with_conjugate_subgradient([](const Vector& p) {
        double q = p(0);
        double g = q <= -4.0 ? 4.0 + q / 2.0 : 3.0 + q / 4.0;
        return SubgradientDescriptor::singleton(detail::scalar_vec(g));
      })
      .with_prox([](const Vector& v, double t) {
        double w = v(0);
        if (w <= 2.0 - 4.0 * t) return detail::scalar_vec((w + 8.0 * t) / (1.0 + 2.0 * t));
        return detail::scalar_vec((w + 12.0 * t) / (1.0 + 4.0 * t));
      })
      .with_conjugate_box(detail::scalar_vec(-50.0), detail::scalar_vec(50.0));
  return BuiltinFn{std::move(f), detail::scalar_vec(3.0)};
}

/// phi(x) = x - 1 + log(1/x) on x > 0, +inf otherwise.
/// Conjugate phi*(p) = -log(1-p) for p < 1.
inline BuiltinFn make_burg_shift() {
  Caps caps;
  caps.strictly_convex_on_ri = true;
  caps.essentially_smooth = true;
  caps.coercive = true;
  caps.locally_bounded_below = true;
  caps.bounded_below = true;
  ConvexFn f(
      1,
      [](const Vector& x) {
        double v = x(0);
        return v > 0.0 ? v - 1.0 - std::log(v) : kInf;
      },
      caps, detail::scalar_vec(1.0));
  f.with_subgradient([](const Vector& x) {
     double v = x(0);
     if (v <= 0.0) return SubgradientDescriptor::empty(1);
     return SubgradientDescriptor::singleton(detail::scalar_vec(1.0 - 1.0 / v));
   })
      .with_conjugate([](const Vector& p) {
        double q = p(0);
        return q < 1.0 ? -std::log(1.0 - q) : kInf;
      })
      .with_conjugate_subgradient([](const Vector& p) {
        double q = p(0);
        if (q >= 1.0) return SubgradientDescriptor::empty(1);
        return SubgradientDescriptor::singleton(detail::scalar_vec(1.0 / (1.0 - q)));
      })
      .with_prox([](const Vector& v, double t) {
        double w = v(0) - t;
        return detail::scalar_vec(0.5 * (w + std::sqrt(w * w + 4.0 * t)));
      })
      .with_conjugate_box(detail::scalar_vec(1e-12), detail::scalar_vec(1e4));
  return BuiltinFn{std::move(f), detail::scalar_vec(1.0)};
}

/// phi(x) = 0.5 <x - b, Q (x - b)> with symmetric positive semidefinite Q.
inline BuiltinFn make_quadratic(const Matrix& q, const Vector& b) {
  if (q.rows() != q.cols() || q.rows() != b.size())
    throw DimensionMismatch("quadratic: Q must be square and match b");
  if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw InvariantViolation("quadratic: Q must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(q);
  double min_eig = eig.eigenvalues().minCoeff();
  double max_eig = eig.eigenvalues().maxCoeff();
  if (min_eig < -1e-10 * std::max(1.0, max_eig))
    throw InvariantViolation("quadratic: Q must be positive semidefinite");
  bool spd = min_eig > kRankTol * std::max(1.0, max_eig);

  Caps caps;
  caps.strictly_convex_on_ri = spd;
  caps.essentially_smooth = true;
  caps.coercive = spd;
  caps.locally_bounded_below = true;
  caps.bounded_below = true;

  const Eigen::Index n = q.rows();
  Matrix qm = q;
  Vector bv = b;
  ConvexFn f(
      n, [qm, bv](const Vector& x) { return 0.5 * (x - bv).dot(qm * (x - bv)); }, caps, bv);

  Matrix pinv = eig.eigenvectors() *
                eig.eigenvalues()
                    .unaryExpr([&](double s) {
                      return s > kRankTol * std::max(1.0, max_eig) ? 1.0 / s : 0.0;
                    })
                    .asDiagonal() *
                eig.eigenvectors().transpose();

  f.with_subgradient([qm, bv](const Vector& x) {
     return SubgradientDescriptor::singleton(qm * (x - bv));
   })
      .with_conjugate([qm, bv, pinv](const Vector& p) {
        Vector y = pinv * p;
        if ((qm * y - p).norm() > 1e-8 * std::max(1.0, p.norm())) return kInf;  // p outside R(Q)
        return p.dot(bv) + 0.5 * p.dot(y);
      })
      .with_conjugate_subgradient([bv, pinv](const Vector& p) {
        return SubgradientDescriptor::singleton(bv + pinv * p);
      })
      .with_prox([qm, bv, n](const Vector& v, double t) {
        Matrix lhs = Matrix::Identity(n, n) + t * qm;
        return Vector(lhs.ldlt().solve(v + t * (qm * bv)));
      });
  Vector lo = Vector::Constant(n, -100.0), hi = Vector::Constant(n, 100.0);
  f.with_conjugate_box(lo, hi);
  return BuiltinFn{std::move(f), bv};
}

/// F1(t) = t^2 - 1/t^4 for t != 0, 0 at t = 0. Coercive but neither convex,
/// lsc, nor locally bounded below (the exceptional point is the origin).
inline BuiltinFn make_sq_minus_inv_quartic() {
  Caps caps;
  caps.convex = false;
  caps.lsc = false;
  caps.coercive = true;
  caps.locally_bounded_below = false;
  caps.bounded_below = false;
  caps.essentially_smooth = false;
  ConvexFn f(
      1,
      [](const Vector& x) {
        double v = x(0);
        if (v == 0.0) return 0.0;
        return v * v - 1.0 / (v * v * v * v);
      },
      caps, detail::scalar_vec(1.0));
  return BuiltinFn{std::move(f), std::nullopt};
}

/// 0.5*||x||^2-style coercive quadratic shortcut: phi(x) = <x, x>.
inline BuiltinFn make_sqnorm(Eigen::Index dim) {
  return make_quadratic(2.0 * Matrix::Identity(dim, dim), Vector::Zero(dim));
}

inline BuiltinFn make_zero(Eigen::Index dim) { return BuiltinFn{zero_fn(dim), std::nullopt}; }

/// Catalog addressable by string name + numeric parameter list (CLI configs).
///   piecewise_remark2 m | abs_shift a | piecewise_gdemo | burg_shift
///   quadratic k q11..qkk b1..bk | sqnorm k | zero k | sq_minus_inv_quartic
inline BuiltinFn make_builtin(const std::string& name, const std::vector<double>& params) {
  if (name == "piecewise_remark2") {
    if (params.size() != 1) throw UnknownName("piecewise_remark2 expects one parameter m");
    return make_piecewise_remark2(params[0]);
  }
  if (name == "abs_shift") {
    if (params.size() != 1) throw UnknownName("abs_shift expects one parameter a");
    return make_abs_shift(params[0]);
  }
  if (name == "piecewise_gdemo") {
    if (!params.empty()) throw UnknownName("piecewise_gdemo takes no parameters");
    return make_piecewise_gdemo();
  }
  if (name == "burg_shift") {
    if (!params.empty()) throw UnknownName("burg_shift takes no parameters");
    return make_burg_shift();
  }
  if (name == "quadratic") {
    if (params.empty()) throw UnknownName("quadratic expects k, Q (row-major), b");
    const auto k = static_cast<Eigen::Index>(params[0]);
    if (k <= 0 || params.size() != static_cast<std::size_t>(1 + k * k + k))
      throw UnknownName("quadratic: parameter list must hold k, k*k entries of Q, k entries of b");
    Matrix q(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j) q(i, j) = params[1 + static_cast<std::size_t>(i * k + j)];
    Vector b(k);
    for (Eigen::Index i = 0; i < k; ++i) b(i) = params[1 + static_cast<std::size_t>(k * k + i)];
    return make_quadratic(q, b);
  }
  if (name == "sqnorm") {
    if (params.size() != 1) throw UnknownName("sqnorm expects the dimension");
    return make_sqnorm(static_cast<Eigen::Index>(params[0]));
  }
  if (name == "zero") {
    if (params.size() != 1) throw UnknownName("zero expects the dimension");
    return make_zero(static_cast<Eigen::Index>(params[0]));
  }
  if (name == "sq_minus_inv_quartic") {
    if (!params.empty()) throw UnknownName("sq_minus_inv_quartic takes no parameters");
    return make_sq_minus_inv_quartic();
  }
  throw UnknownName("unknown builtin function '" + name + "'");
}

inline ConvexFn builtin_phi(const std::string& name, const std::vector<double>& params) {
  return make_builtin(name, params).fn;
}

}  // namespace convexcorr
