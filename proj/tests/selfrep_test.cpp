#include "dgsl/selfrep.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dgsl/errors.hpp"
#include "dgsl/graph.hpp"
#include "test_support.hpp"

namespace dgsl {
namespace {

TEST(UpdateA, ZeroDataReturnsZ) {
  std::mt19937_64 rng(1);
  const Matrix z = testing::random_matrix(5, 5, rng);
  EXPECT_LT((update_a(Matrix::Zero(3, 5), z, 2.5) - z).norm(), 1e-15);
}

TEST(UpdateA, IdentityData) {
  Matrix z(2, 2);
  z << 0.0, 1.0, 1.0, 0.0;
  const Matrix a = update_a(Matrix::Identity(2, 2), z, 1.0);
  EXPECT_LT((a - Matrix::Constant(2, 2, 0.5)).norm(), 1e-15);
}

TEST(UpdateA, FirstOrderOptimality) {
  std::mt19937_64 rng(2);
  const Matrix x = testing::random_matrix(4, 6, rng);
  const Matrix z = testing::random_matrix(6, 6, rng);
  const double lambda = 100.0;
  const Matrix a = update_a(x, z, lambda);
  const Matrix g = x.transpose() * x;
  const Matrix grad = g * a - g + lambda * (a - z);
  EXPECT_LT(grad.cwiseAbs().maxCoeff(), 1e-8);
}

TEST(UpdateA, UniqueMinimizerUnderPerturbation) {
  std::mt19937_64 rng(3);
  const Matrix x = testing::random_matrix(3, 7, rng);
  const Matrix z = testing::random_matrix(7, 7, rng);
  const double lambda = 1.5;
  const Matrix a = update_a(x, z, lambda);
  auto obj = [&](const Matrix& m) { return selfrep_objective(x, m, z, lambda, 0.0); };
  const double best = obj(a);
  for (int t = 0; t < 20; ++t) {
    const Matrix delta = 1e-3 * testing::random_matrix(7, 7, rng);
    EXPECT_GT(obj(a + delta), best);
  }
}

TEST(UpdateA, StrongConvexityDescent) {
  std::mt19937_64 rng(4);
  const Matrix x = testing::random_matrix(3, 8, rng);
  const Matrix z = testing::random_matrix(8, 8, rng);
  const double lambda = 10.0;
  for (int t = 0; t < 10; ++t) {
    const Matrix a0 = testing::random_matrix(8, 8, rng);
    const Matrix a1 = update_a(x, z, lambda);
    const double f0 = selfrep_objective(x, a0, z, lambda, 0.3);
    const double f1 = selfrep_objective(x, a1, z, lambda, 0.3);
    EXPECT_LE(f1, f0 - 0.5 * lambda * (a1 - a0).squaredNorm() + 1e-9 * (1.0 + f0));
  }
}

TEST(UpdateA, ReusedFactorMatchesFreshSolve) {
  std::mt19937_64 rng(5);
  const Matrix x = testing::random_matrix(5, 9, rng);
  const AUpdate step(x, 3.0);
  for (int t = 0; t < 3; ++t) {
    const Matrix z = testing::random_matrix(9, 9, rng);
    EXPECT_LT((step(z) - update_a(x, z, 3.0)).norm(), 1e-12);
  }
  EXPECT_THROW(AUpdate(x, 0.0), InvalidArgument);
  EXPECT_THROW(step(Matrix::Zero(3, 3)), InvalidArgument);
}

Matrix two_cannot_link_c(Index n) {
  return encode_constraints(ConstraintSet(n, {}, {{0, n - 1}})).cannot;
}

TEST(BuildTheta, EqualColumnsGiveFloor) {
  Matrix h(2, 3);
  h << 1.0, 1.0, 0.0, 0.0, 0.0, 1.0;
  const ThetaMatrix theta = build_theta(h, two_cannot_link_c(3), 2.0, 4.0, 1.0, false);
  EXPECT_DOUBLE_EQ(theta.values()(0, 1), 0.25);
  EXPECT_DOUBLE_EQ(theta.values()(0, 0), 0.25);
}

TEST(BuildTheta, OrthogonalUnitColumns) {
  Matrix h(2, 3);
  h << 3.0, 0.0, 1.0, 0.0, 0.5, 1.0;
  const Matrix c = two_cannot_link_c(3);
  const double tr = trace_quadratic(h, laplacian(c));
  const double alpha1 = 2.0, lambda = 4.0, lambda_z = 1.0;
  const ThetaMatrix theta = build_theta(h, c, alpha1, lambda, lambda_z, true);
  EXPECT_NEAR(theta.values()(0, 1), alpha1 / (lambda * tr) + lambda_z / lambda, 1e-14);
}

TEST(BuildTheta, MatchesDirectEvaluation) {
  std::mt19937_64 rng(6);
  const Index n = 9;
  const Matrix h = testing::random_matrix(3, n, rng);
  const Matrix c = encode_constraints(ConstraintSet(n, {{1, 2}}, {{0, 5}, {3, 8}, {2, 7}})).cannot;
  for (bool normalize : {false, true}) {
    const double alpha1 = 1.7, lambda = 50.0, lambda_z = 0.5;
    const ThetaMatrix theta = build_theta(h, c, alpha1, lambda, lambda_z, normalize);
    // trace by the pairwise sum over cannot-links
    const double tr = testing::pairwise_smoothness(c, h);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        Vector hi = h.col(i), hj = h.col(j);
        if (normalize) {
          hi.normalize();
          hj.normalize();
        }
        const double expected =
            alpha1 * (hi - hj).squaredNorm() / (2.0 * lambda * tr) + lambda_z / lambda;
        EXPECT_NEAR(theta.values()(i, j), expected, 1e-13) << i << "," << j;
      }
    }
    EXPECT_EQ(theta.values(), theta.values().transpose());
    EXPECT_GE(theta.values().minCoeff(), lambda_z / lambda);
  }
}

TEST(BuildTheta, ZeroColumnUnderNormalization) {
  Matrix h(2, 3);
  h << 0.0, 1.0, 0.0, 0.0, 0.0, 1.0;
  const ThetaMatrix theta = build_theta(h, two_cannot_link_c(3), 1.0, 1.0, 0.0, true);
  // column 0 is treated as the zero vector: distance to a unit column is 1
  const double tr = trace_quadratic(h, laplacian(two_cannot_link_c(3)));
  EXPECT_NEAR(theta.values()(0, 1), 1.0 / (2.0 * tr), 1e-14);
}

TEST(BuildTheta, VanishedCannotLinkTerm) {
  const Matrix h = Matrix::Ones(2, 3);
  try {
    build_theta(h, two_cannot_link_c(3), 1.0, 1.0, 0.0, false);
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("cannot-link term vanished"), std::string::npos);
  }
}

TEST(UpdateZ, SoftThresholdDefinition) {
  Matrix a(2, 2);
  a << 1.0, 0.5, -0.1, -0.7;
  const Matrix z = update_z(a, ThetaMatrix(Matrix::Constant(2, 2, 0.2)));
  EXPECT_DOUBLE_EQ(z(0, 1), 0.3);
  EXPECT_EQ(z(1, 0), 0.0);
  EXPECT_EQ(z(0, 0), 0.0);
  EXPECT_EQ(z(1, 1), 0.0);
  EXPECT_EQ(update_z(Matrix::Zero(3, 3), ThetaMatrix(Matrix::Zero(3, 3))), Matrix::Zero(3, 3));
}

TEST(UpdateZ, GridSearchOracle) {
  std::mt19937_64 rng(7);
  const Index n = 6;
  const Matrix a = testing::random_matrix(n, n, rng, -2.0, 2.0);
  const Matrix t = testing::random_matrix(n, n, rng, 0.0, 1.0);
  const Matrix z = update_z(a, ThetaMatrix(t));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j) {
        EXPECT_EQ(z(i, j), 0.0);
        continue;
      }
      // per-entry 1-D brute force on a fine grid
      double best = 0.0, best_val = 0.5 * a(i, j) * a(i, j);
      for (int g = -40000; g <= 40000; ++g) {
        const double v = g * 5e-5;
        const double val = 0.5 * (v - a(i, j)) * (v - a(i, j)) + t(i, j) * std::abs(v);
        if (val < best_val) {
          best_val = val;
          best = v;
        }
      }
      EXPECT_NEAR(z(i, j), best, 5e-5);
    }
  }
}

TEST(UpdateZ, SubgradientCondition) {
  std::mt19937_64 rng(8);
  const Matrix a = testing::random_matrix(7, 7, rng);
  const Matrix t = testing::random_matrix(7, 7, rng, 0.0, 0.5);
  const Matrix z = update_z(a, ThetaMatrix(t));
  for (Index i = 0; i < 7; ++i) {
    for (Index j = 0; j < 7; ++j) {
      if (i == j) continue;
      EXPECT_LE(std::abs(z(i, j)), std::max(std::abs(a(i, j)) - t(i, j), 0.0) + 1e-15);
      if (z(i, j) != 0.0) {
        const double g = z(i, j) > 0.0 ? 1.0 : -1.0;
        EXPECT_NEAR(z(i, j) - a(i, j) + t(i, j) * g, 0.0, 1e-15);
      } else {
        EXPECT_LE(std::abs(a(i, j)), t(i, j));
      }
    }
  }
}

TEST(ThetaMatrix, RejectsNegative) {
  EXPECT_THROW(ThetaMatrix(-Matrix::Identity(2, 2)), InvalidArgument);
  EXPECT_THROW(ThetaMatrix(Matrix::Zero(2, 3)), InvalidArgument);
}

TEST(SelfRepAffinity, FullShrinkage) {
  std::mt19937_64 rng(9);
  const Matrix x = testing::random_matrix(3, 6, rng);
  EXPECT_EQ(selfrep_affinity(x, 1.0, 1e6), Matrix::Zero(6, 6));
}

TEST(SelfRepAffinity, SinglePoint) {
  Matrix x(2, 1);
  x << 1.0, 2.0;
  EXPECT_EQ(selfrep_affinity(x, 1.0, 0.1), Matrix::Zero(1, 1));
}

TEST(SelfRepAffinity, DuplicatesAreMostAffine) {
  Matrix x = Matrix::Zero(5, 4);
  x(0, 0) = 1.0;
  x(0, 1) = 1.0;
  x(2, 2) = 1.0;
  x(3, 3) = 1.0;
  const Matrix s = selfrep_affinity(x, 1.0, 0.01);
  Index r = 0, c = 0;
  Matrix off = s;
  off.diagonal().setZero();
  off.maxCoeff(&r, &c);
  EXPECT_EQ(std::min(r, c), 0);
  EXPECT_EQ(std::max(r, c), 1);
  EXPECT_DOUBLE_EQ(s(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(s(0, 1), 1.0);
}

TEST(SelfRepAffinity, ColumnMaxIsOne) {
  const auto blobs = testing::make_blobs(10, 2, 3, 6.0, 1);
  const Matrix s = selfrep_affinity(blobs.x, 10.0, 0.05);
  EXPECT_GE(s.minCoeff(), 0.0);
  for (Index c = 0; c < s.cols(); ++c) {
    const double top = s.col(c).maxCoeff();
    EXPECT_TRUE(top == 0.0 || top == 1.0);
    EXPECT_EQ(s(c, c), 0.0);
  }
  EXPECT_GT(s.sum(), 0.0);
}

TEST(SelfRepAffinity, AlternationDoesNotIncreaseObjective) {
  std::mt19937_64 rng(10);
  const Matrix x = testing::random_matrix(4, 12, rng);
  const double lambda = 2.0, lambda_z = 0.05;
  const AUpdate step(x, lambda);
  const ThetaMatrix theta(Matrix::Constant(12, 12, lambda_z / lambda));
  Matrix z = Matrix::Zero(12, 12), a = z;
  double prev = selfrep_objective(x, a, z, lambda, lambda_z);
  for (int it = 0; it < 30; ++it) {
    const Matrix a1 = step(z);
    const double fa = selfrep_objective(x, a1, z, lambda, lambda_z);
    EXPECT_LE(fa, prev - 0.5 * lambda * (a1 - a).squaredNorm() + 1e-10);
    const Matrix z1 = update_z(a1, theta);
    const double fz = selfrep_objective(x, a1, z1, lambda, lambda_z);
    EXPECT_LE(fz, fa - 0.5 * lambda * (z1 - z).squaredNorm() + 1e-10);
    a = a1;
    z = z1;
    prev = fz;
  }
}

TEST(ColumnMaxScaledAbs, ZeroColumnsStayZero) {
  Matrix z(2, 2);
  z << 0.0, -2.0, 0.0, 1.0;
  const Matrix s = column_max_scaled_abs(z);
  EXPECT_EQ(s.col(0).norm(), 0.0);
  EXPECT_EQ(s(0, 1), 1.0);
  EXPECT_EQ(s(1, 1), 0.5);
}

}  // namespace
}  // namespace dgsl
