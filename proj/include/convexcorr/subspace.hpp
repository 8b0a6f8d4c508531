#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "convexcorr/errors.hpp"

namespace convexcorr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Relative rank tolerance shared by every nullspace/rank decision.
inline constexpr double kRankTol = 1e-9;
/// Absolute tolerance for orthonormality checks on stored bases.
inline constexpr double kOrthoTol = 1e-10;

namespace detail {

inline bool columns_orthonormal(const Matrix& b, double tol) {
  if (b.cols() == 0) return true;
  Matrix g = b.transpose() * b;
  g -= Matrix::Identity(b.cols(), b.cols());
  return g.cwiseAbs().maxCoeff() <= tol;
}

/// Orthonormal basis of the column span, dropping directions below the
/// relative rank tolerance. Input columns that already form an orthonormal
/// family are kept verbatim so that caller-chosen coordinates survive.
inline Matrix orthonormalize_span(const Matrix& vectors) {
  if (vectors.cols() == 0) return Matrix(vectors.rows(), 0);
  if (columns_orthonormal(vectors, kOrthoTol)) return vectors;
  Eigen::JacobiSVD<Matrix> svd(vectors, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) return Matrix(vectors.rows(), 0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > kRankTol * sv(0)) ++rank;
  return svd.matrixU().leftCols(rank);
}

}  // namespace detail

/// A linear subspace of Euclidean n-space, held as an orthonormal basis.
/// The trivial subspace is an empty basis with an explicit ambient dimension,
/// so zero-dimensional corner cases need no special treatment downstream.
class Subspace {
 public:
  Subspace(Eigen::Index ambient_dim, Matrix basis)
      : ambient_(ambient_dim), basis_(std::move(basis)) {
    if (ambient_ <= 0) throw DimensionMismatch("Subspace: ambient_dim must be positive");
    if (basis_.size() > 0 && basis_.rows() != ambient_)
      throw DimensionMismatch("Subspace: basis rows != ambient_dim");
    if (basis_.size() == 0) basis_ = Matrix(ambient_, 0);
    if (basis_.cols() > ambient_)
      throw DimensionMismatch("Subspace: more basis vectors than ambient_dim");
    if (!detail::columns_orthonormal(basis_, kOrthoTol))
      throw InvariantViolation("Subspace: basis is not orthonormal");
  }

  static Subspace trivial(Eigen::Index ambient_dim) {
    return Subspace(ambient_dim, Matrix(ambient_dim, 0));
  }

  static Subspace full(Eigen::Index ambient_dim) {
    return Subspace(ambient_dim, Matrix::Identity(ambient_dim, ambient_dim));
  }

  /// Span of the given (not necessarily independent) column vectors.
  static Subspace span_of(const Matrix& vectors) {
    return Subspace(vectors.rows(), detail::orthonormalize_span(vectors));
  }

  static Subspace span_of(const Vector& v) {
    Matrix m(v.size(), 1);
    m.col(0) = v;
    return span_of(m);
  }

  /// Axis-aligned span of the listed coordinates.
  static Subspace coordinate_span(Eigen::Index ambient_dim, const std::vector<int>& idx) {
    Matrix b = Matrix::Zero(ambient_dim, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) {
      if (idx[j] < 0 || idx[j] >= ambient_dim)
        throw DimensionMismatch("coordinate_span: index out of range");
      b(idx[j], static_cast<Eigen::Index>(j)) = 1.0;
    }
    return Subspace(ambient_dim, std::move(b));
  }

  Eigen::Index ambient_dim() const { return ambient_; }
  Eigen::Index dim() const { return basis_.cols(); }
  bool is_trivial() const { return basis_.cols() == 0; }
  const Matrix& basis() const { return basis_; }

  /// Orthogonal projection of x onto the subspace.
  Vector project(const Vector& x) const {
    check_ambient(x);
    if (is_trivial()) return Vector::Zero(ambient_);
    return basis_ * (basis_.transpose() * x);
  }

  /// Coordinates of the projection of x with respect to the stored basis.
  Vector coords(const Vector& x) const {
    check_ambient(x);
    return basis_.transpose() * x;
  }

  Vector from_coords(const Vector& c) const {
    if (c.size() != dim()) throw DimensionMismatch("from_coords: wrong coordinate count");
    if (is_trivial()) return Vector::Zero(ambient_);
    return basis_ * c;
  }

  Matrix projector() const {
    if (is_trivial()) return Matrix::Zero(ambient_, ambient_);
    return basis_ * basis_.transpose();
  }

  bool contains(const Vector& x, double tol = 1e-8) const {
    check_ambient(x);
    return (x - project(x)).norm() <= tol * std::max(1.0, x.norm());
  }

 private:
  void check_ambient(const Vector& x) const {
    if (x.size() != ambient_) throw DimensionMismatch("Subspace: vector has wrong ambient dim");
  }

  Eigen::Index ambient_;
  Matrix basis_;
};

/// A dense linear map between Euclidean spaces.
class LinearMap {
 public:
  explicit LinearMap(Matrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() <= 0 || entries_.cols() <= 0)
      throw DimensionMismatch("LinearMap: rows and cols must be positive");
    if (!entries_.allFinite()) throw InvariantViolation("LinearMap: entries must be finite");
  }

  static LinearMap identity(Eigen::Index n) { return LinearMap(Matrix::Identity(n, n)); }
  static LinearMap zero(Eigen::Index rows, Eigen::Index cols) {
    return LinearMap(Matrix::Zero(rows, cols));
  }

  Eigen::Index rows() const { return entries_.rows(); }
  Eigen::Index cols() const { return entries_.cols(); }
  const Matrix& entries() const { return entries_; }

  Vector apply(const Vector& x) const {
    if (x.size() != cols()) throw DimensionMismatch("LinearMap::apply: wrong input dim");
    return entries_ * x;
  }

  Vector apply_adjoint(const Vector& y) const {
    if (y.size() != rows()) throw DimensionMismatch("LinearMap::apply_adjoint: wrong input dim");
    return entries_.transpose() * y;
  }

  double largest_singular_value() const {
    Eigen::JacobiSVD<Matrix> svd(entries_);
    return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  }

  double smallest_singular_value() const {
    Eigen::JacobiSVD<Matrix> svd(entries_);
    const auto& sv = svd.singularValues();
    return sv.size() ? sv(sv.size() - 1) : 0.0;
  }

 private:
  Matrix entries_;
};

/// Orthonormal basis of N(A) = { v : Av = 0 } under the relative rank tolerance.
inline Subspace nullspace(const LinearMap& a) {
  Eigen::JacobiSVD<Matrix> svd(a.entries(), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > kRankTol * smax) ++rank;
  const Eigen::Index n = a.cols();
  return Subspace(n, svd.matrixV().rightCols(n - rank));
}

/// Orthonormal basis of R(A*), the orthogonal complement of N(A).
inline Subspace range_of_adjoint(const LinearMap& a) {
  Eigen::JacobiSVD<Matrix> svd(a.entries(), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > kRankTol * smax) ++rank;
  return Subspace(a.cols(), svd.matrixV().leftCols(rank));
}

inline Subspace orthogonal_complement(const Subspace& s) {
  if (s.is_trivial()) return Subspace::full(s.ambient_dim());
  if (s.dim() == s.ambient_dim()) return Subspace::trivial(s.ambient_dim());
  // complement = nullspace of x -> B^T x
  return nullspace(LinearMap(s.basis().transpose()));
}

/// S ∩ T as the joint nullspace of the two complementary projectors.
inline Subspace intersect(const Subspace& s, const Subspace& t) {
  if (s.ambient_dim() != t.ambient_dim())
    throw DimensionMismatch("intersect: ambient dimensions differ");
  const Eigen::Index n = s.ambient_dim();
  if (s.is_trivial() || t.is_trivial()) return Subspace::trivial(n);
  Matrix stacked(2 * n, n);
  stacked.topRows(n) = Matrix::Identity(n, n) - s.projector();
  stacked.bottomRows(n) = Matrix::Identity(n, n) - t.projector();
  return nullspace(LinearMap(std::move(stacked)));
}

struct SubspaceSum {
  Subspace space;
  bool is_direct;
  bool is_orthogonal;
};

/// span(S ∪ T) with directness and orthogonality flags.
inline SubspaceSum sum(const Subspace& s, const Subspace& t) {
  if (s.ambient_dim() != t.ambient_dim())
    throw DimensionMismatch("sum: ambient dimensions differ");
  Matrix joined(s.ambient_dim(), s.dim() + t.dim());
  joined.leftCols(s.dim()) = s.basis();
  joined.rightCols(t.dim()) = t.basis();
  Subspace total = Subspace::span_of(joined);
  bool direct = total.dim() == s.dim() + t.dim();
  bool orthogonal = true;
  if (s.dim() > 0 && t.dim() > 0) {
    Matrix cross = s.basis().transpose() * t.basis();
    orthogonal = cross.cwiseAbs().maxCoeff() <= kOrthoTol;
  }
  return SubspaceSum{std::move(total), direct, orthogonal};
}

inline bool is_orthogonal_pair(const Subspace& s, const Subspace& t) {
  if (s.dim() == 0 || t.dim() == 0) return true;
  return (s.basis().transpose() * t.basis()).cwiseAbs().maxCoeff() <= kOrthoTol;
}

/// Cosines of the principal angles between S and T (largest first).
inline Vector principal_angle_cosines(const Subspace& s, const Subspace& t) {
  if (s.ambient_dim() != t.ambient_dim())
    throw DimensionMismatch("principal_angle_cosines: ambient dimensions differ");
  if (s.is_trivial() || t.is_trivial()) return Vector(0);
  Eigen::JacobiSVD<Matrix> svd(s.basis().transpose() * t.basis());
  return svd.singularValues();
}

/// Smallest C >= 1 with ||h1|| <= C ||h1 + h2|| over all h1 in S, h2 in T,
/// for the Euclidean norm: C = 1/sin(theta) with theta the minimal principal
/// angle between S and T. Requires S ∩ T trivial.
inline double attachment_constant(const Subspace& s, const Subspace& t) {
  if (s.ambient_dim() != t.ambient_dim())
    throw DimensionMismatch("attachment_constant: ambient dimensions differ");
  if (intersect(s, t).dim() > 0)
    throw NotDirect("attachment_constant: subspaces intersect nontrivially");
  if (s.is_trivial() || t.is_trivial()) return 1.0;
  Vector cosines = principal_angle_cosines(s, t);
  double cmax = cosines.size() ? std::min(1.0, cosines(0)) : 0.0;
  // trivial intersection keeps cmax strictly below 1
  double sin_min = std::sqrt(std::max(0.0, 1.0 - cmax * cmax));
  if (sin_min <= 0.0)
    throw NotDirect("attachment_constant: principal angle numerically zero");
  return std::max(1.0, 1.0 / sin_min);
}

}  // namespace convexcorr
