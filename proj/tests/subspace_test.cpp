#include "convexcorr/subspace.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace convexcorr;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

Subspace random_subspace(int ambient, int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Matrix m(ambient, dim);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = gauss(rng);
  return Subspace::span_of(m);
}

}  // namespace

TEST(Nullspace, InjectiveMapHasTrivialNullspace) {
  EXPECT_EQ(nullspace(LinearMap::identity(2)).dim(), 0);
}

TEST(Nullspace, ZeroMapHasFullNullspace) {
  EXPECT_EQ(nullspace(LinearMap::zero(2, 2)).dim(), 2);
}

TEST(Nullspace, RowVectorMap) {
  // A = [1 1]: N(A) = span{(1,-1)/sqrt(2)}, solved by hand.
  Subspace n = nullspace(LinearMap(mat({{1.0, 1.0}})));
  ASSERT_EQ(n.dim(), 1);
  Vector expected = vec2(1.0, -1.0) / std::sqrt(2.0);
  EXPECT_TRUE(n.contains(expected, 1e-10));
}

TEST(RangeOfAdjoint, Examples) {
  EXPECT_EQ(range_of_adjoint(LinearMap::identity(2)).dim(), 2);
  EXPECT_EQ(range_of_adjoint(LinearMap::zero(2, 2)).dim(), 0);
  Subspace r = range_of_adjoint(LinearMap(mat({{1.0, 1.0}})));
  ASSERT_EQ(r.dim(), 1);
  EXPECT_TRUE(r.contains(vec2(1.0, 1.0) / std::sqrt(2.0), 1e-10));
}

TEST(RangeOfAdjoint, OrthogonalToNullspaceAndDimsAdd) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 20; ++trial) {
    int rows = 1 + static_cast<int>(rng() % 5);
    int cols = 1 + static_cast<int>(rng() % 6);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = gauss(rng);
    if (trial % 4 == 0 && cols > 1) m.col(cols - 1) = m.col(0);  // force rank deficiency
    LinearMap a(m);
    Subspace n = nullspace(a);
    Subspace r = range_of_adjoint(a);
    EXPECT_EQ(n.dim() + r.dim(), cols);
    EXPECT_TRUE(is_orthogonal_pair(n, r));
  }
}

TEST(Intersect, Examples) {
  Subspace e1 = Subspace::coordinate_span(2, {0});
  Subspace e2 = Subspace::coordinate_span(2, {1});
  EXPECT_EQ(intersect(e1, e2).dim(), 0);
  EXPECT_EQ(intersect(e1, e1).dim(), 1);

  Subspace s12 = Subspace::coordinate_span(3, {0, 1});
  Subspace s23 = Subspace::coordinate_span(3, {1, 2});
  Subspace inter = intersect(s12, s23);
  ASSERT_EQ(inter.dim(), 1);
  Vector e2_3 = Vector::Zero(3);
  e2_3(1) = 1.0;
  EXPECT_TRUE(inter.contains(e2_3, 1e-10));
}

TEST(Intersect, AgreesWithProjectorProductRankOracle) {
  // oracle: dim(S ∩ T) = dim(S) + dim(T) - rank([B_S B_T])
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    int n = 4 + static_cast<int>(rng() % 3);
    Subspace s = random_subspace(n, 1 + static_cast<int>(rng() % 3), rng);
    Subspace t = random_subspace(n, 1 + static_cast<int>(rng() % 3), rng);
    SubspaceSum st = sum(s, t);
    Eigen::Index expected = s.dim() + t.dim() - st.space.dim();
    EXPECT_EQ(intersect(s, t).dim(), expected);
  }
}

TEST(Intersect, DimensionMismatchThrows) {
  EXPECT_THROW(intersect(Subspace::full(2), Subspace::full(3)), DimensionMismatch);
}

TEST(Sum, OrthogonalDirectPair) {
  SubspaceSum r = sum(Subspace::coordinate_span(2, {0}), Subspace::coordinate_span(2, {1}));
  EXPECT_EQ(r.space.dim(), 2);
  EXPECT_TRUE(r.is_direct);
  EXPECT_TRUE(r.is_orthogonal);
}

TEST(Sum, DirectButNotOrthogonal) {
  // span{e1} + span{e1+e2}: the first decomposition of the plane is
  // orthogonal, this one is not.
  Subspace s = Subspace::coordinate_span(2, {0});
  Subspace t = Subspace::span_of(vec2(1.0, 1.0));
  SubspaceSum r = sum(s, t);
  EXPECT_EQ(r.space.dim(), 2);
  EXPECT_TRUE(r.is_direct);
  EXPECT_FALSE(r.is_orthogonal);
}

TEST(Sum, RepeatedSubspaceNotDirect) {
  Subspace s = Subspace::coordinate_span(2, {0});
  SubspaceSum r = sum(s, s);
  EXPECT_EQ(r.space.dim(), 1);
  EXPECT_FALSE(r.is_direct);
}

TEST(OrthogonalComplement, Examples) {
  EXPECT_EQ(orthogonal_complement(Subspace::trivial(2)).dim(), 2);

  Subspace c = orthogonal_complement(Subspace::coordinate_span(2, {0}));
  ASSERT_EQ(c.dim(), 1);
  EXPECT_TRUE(c.contains(vec2(0.0, 1.0)));

  // Gram-Schmidt oracle: complement of span{(1,1)/sqrt(2)} is span{(1,-1)/sqrt(2)}
  Subspace diag = Subspace::span_of(vec2(1.0, 1.0));
  Subspace cd = orthogonal_complement(diag);
  ASSERT_EQ(cd.dim(), 1);
  EXPECT_TRUE(cd.contains(vec2(1.0, -1.0) / std::sqrt(2.0), 1e-10));
}

TEST(OrthogonalComplement, SumWithComplementIsFullSpace) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 3 + static_cast<int>(rng() % 4);
    Subspace s = random_subspace(n, static_cast<int>(rng() % (n + 1)), rng);
    SubspaceSum r = sum(s, orthogonal_complement(s));
    EXPECT_EQ(r.space.dim(), n);
    EXPECT_TRUE(r.is_direct);
    EXPECT_TRUE(r.is_orthogonal);
  }
}

TEST(Project, Examples) {
  Subspace e1 = Subspace::coordinate_span(2, {0});
  EXPECT_LT((e1.project(vec2(3.0, 4.0)) - vec2(3.0, 0.0)).norm(), 1e-12);

  Subspace full = Subspace::full(2);
  EXPECT_LT((full.project(vec2(3.0, 4.0)) - vec2(3.0, 4.0)).norm(), 1e-12);

  Subspace diag = Subspace::span_of(vec2(1.0, 1.0));
  EXPECT_LT((diag.project(vec2(1.0, 0.0)) - vec2(0.5, 0.5)).norm(), 1e-12);
}

TEST(Project, IdempotentAndResidualOrthogonal) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 50; ++trial) {
    int n = 2 + static_cast<int>(rng() % 5);
    Subspace s = random_subspace(n, 1 + static_cast<int>(rng() % n), rng);
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = gauss(rng);
    Vector px = s.project(x);
    EXPECT_LT((s.project(px) - px).norm(), 1e-9);
    if (s.dim() > 0) EXPECT_LT((s.basis().transpose() * (x - px)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(AttachmentConstant, OrthogonalAndTrivialPairsGiveOne) {
  Subspace e1 = Subspace::coordinate_span(2, {0});
  Subspace e2 = Subspace::coordinate_span(2, {1});
  EXPECT_DOUBLE_EQ(attachment_constant(e1, e2), 1.0);
  EXPECT_DOUBLE_EQ(attachment_constant(e1, Subspace::trivial(2)), 1.0);
}

TEST(AttachmentConstant, DiagonalPairSamplingOracleThenFormula) {
  Subspace s = Subspace::coordinate_span(2, {0});
  Subspace t = Subspace::span_of(vec2(1.0, 1.0));

  // Sampling oracle first: maximize ||h1|| / ||h1 + h2|| over unit circles.
  double best = 0.0;
  const int steps = 2000;
  for (int i = 0; i < steps; ++i) {
    double a = -3.0 + 6.0 * i / steps;  // h1 = a e1
    for (int j = 0; j < steps; ++j) {
      double b = -3.0 + 6.0 * j / steps;  // h2 = b (e1+e2)/sqrt(2)
      Vector h1 = vec2(a, 0.0);
      Vector h2 = b * vec2(1.0, 1.0) / std::sqrt(2.0);
      double denom = (h1 + h2).norm();
      if (denom > 1e-9) best = std::max(best, h1.norm() / denom);
    }
  }
  EXPECT_NEAR(best, std::sqrt(2.0), 2e-3);

  EXPECT_NEAR(attachment_constant(s, t), std::sqrt(2.0), 1e-12);
}

TEST(AttachmentConstant, NotDirectThrows) {
  Subspace s = Subspace::coordinate_span(2, {0});
  EXPECT_THROW(attachment_constant(s, s), NotDirect);
}

TEST(AttachmentConstant, BoundHoldsOnRandomPairs) {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 10; ++trial) {
    int n = 3 + static_cast<int>(rng() % 3);
    Subspace s = random_subspace(n, 1, rng);
    Subspace t = random_subspace(n, 1 + static_cast<int>(rng() % 2), rng);
    if (intersect(s, t).dim() > 0) continue;
    double c = attachment_constant(s, t);
    EXPECT_GE(c, 1.0);
    EXPECT_EQ(c <= 1.0 + 1e-9, is_orthogonal_pair(s, t));
    for (int k = 0; k < 10000; ++k) {
      Vector a(s.dim()), b(t.dim());
      for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = gauss(rng);
      for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = gauss(rng);
      Vector h1 = s.from_coords(a);
      Vector h2 = t.from_coords(b);
      EXPECT_LE(h1.norm(), (c + 1e-6) * (h1 + h2).norm() + 1e-12);
    }
  }
}

// Joint projection map z -> (P_X1 z, P_W1 z) restricted to X1 + W1 has
// trivial nullspace: rank of the stacked projectors on a basis of X1 + W1
// equals dim(X1 + W1).
TEST(JointProjections, TrivialNullspaceOnSumSpace) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 4 + static_cast<int>(rng() % 3);
    Subspace x1 = random_subspace(n, 1 + static_cast<int>(rng() % 2), rng);
    Subspace w1 = random_subspace(n, 1 + static_cast<int>(rng() % 2), rng);
    Subspace total = sum(x1, w1).space;
    if (total.dim() == 0) continue;
    Matrix stacked(2 * n, total.dim());
    stacked.topRows(n) = x1.projector() * total.basis();
    stacked.bottomRows(n) = w1.projector() * total.basis();
    EXPECT_EQ(nullspace(LinearMap(std::move(stacked))).dim(), 0);
  }
}

TEST(Subspace, TrivialSubspaceRoundTrips) {
  Subspace t = Subspace::trivial(3);
  EXPECT_EQ(t.dim(), 0);
  EXPECT_EQ(t.project(Vector::Ones(3)).norm(), 0.0);
  EXPECT_EQ(orthogonal_complement(orthogonal_complement(t)).dim(), 0);
}
