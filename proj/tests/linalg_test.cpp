#include "dgsl/linalg.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dgsl/errors.hpp"
#include "test_support.hpp"

namespace dgsl {
namespace {

TEST(SymEigTopK, DiagonalCase) {
  Matrix m = Eigen::Vector3d(3.0, 1.0, 2.0).asDiagonal();
  const auto pairs = sym_eig_topk(m, 2);
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_NEAR(pairs[0].value, 3.0, 1e-14);
  EXPECT_NEAR(pairs[1].value, 2.0, 1e-14);
  EXPECT_NEAR(std::abs(pairs[0].vector(0)), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(pairs[1].vector(2)), 1.0, 1e-14);
}

TEST(SymEigTopK, TwoByTwoAnalytic) {
  Matrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  const auto pairs = sym_eig_topk(m, 1);
  EXPECT_NEAR(pairs[0].value, 1.0, 1e-14);
  const double s = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(pairs[0].vector(0)), s, 1e-14);
  EXPECT_NEAR(pairs[0].vector(0), pairs[0].vector(1), 1e-14);
}

TEST(SymEigTopK, RandomResidualsAndOrthonormality) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix m = testing::random_symmetric(8, rng);
    const auto pairs = sym_eig_topk(m, 5);
    Matrix v(8, 5);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto& p = pairs[i];
      EXPECT_LT((m * p.vector - p.value * p.vector).norm(), 1e-8);
      EXPECT_NEAR(p.vector.norm(), 1.0, 1e-10);
      if (i > 0) {
        EXPECT_LE(p.value, pairs[i - 1].value);
      }
      v.col(static_cast<Index>(i)) = p.vector;
    }
    EXPECT_LT((v.transpose() * v - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(SymEigTopK, SymmetrizesInput) {
  Matrix m(2, 2);
  m << 2.0, 1.0, 0.0, 2.0;  // symmetric part has eigenvalues 2.5 and 1.5
  EXPECT_NEAR(sym_eig_topk(m, 1)[0].value, 2.5, 1e-14);
}

TEST(SymEigTopK, Errors) {
  EXPECT_THROW(sym_eig_topk(Matrix::Zero(2, 3), 1), InvalidArgument);
  EXPECT_THROW(sym_eig_topk(Matrix::Identity(3, 3), 0), InvalidArgument);
  EXPECT_THROW(sym_eig_topk(Matrix::Identity(3, 3), 4), InvalidArgument);
}

TEST(SpdSolve, IdentityAndScalar) {
  std::mt19937_64 rng(1);
  const Matrix b = testing::random_matrix(4, 3, rng);
  EXPECT_LT((spd_solve(Matrix::Identity(4, 4), b) - b).norm(), 1e-15);
  const Matrix half = spd_solve(2.0 * Matrix::Identity(3, 3), Matrix::Identity(3, 3));
  EXPECT_LT((half - 0.5 * Matrix::Identity(3, 3)).norm(), 1e-15);
}

TEST(SpdSolve, RandomResidual) {
  std::mt19937_64 rng(2);
  for (Index n : {10, 50, 200}) {
    const Matrix k = testing::random_spd(n, rng);
    const Matrix b = testing::random_matrix(n, 4, rng);
    const Matrix a = spd_solve(k, b);
    EXPECT_LT((k * a - b).norm() / std::max(1.0, b.norm()), 1e-10) << "n=" << n;
    // solve after multiply recovers the original
    EXPECT_LT((spd_solve(k, k * b) - b).norm() / b.norm(), 1e-9) << "n=" << n;
  }
}

TEST(SpdSolve, RejectsIndefinite) {
  Matrix k(2, 2);
  k << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(spd_solve(k, Matrix::Identity(2, 2)), NumericalError);
  EXPECT_THROW(spd_solve(Matrix::Identity(2, 2), Matrix::Identity(3, 3)), InvalidArgument);
}

TEST(RequireFinite, FlagsNaN) {
  Matrix m = Matrix::Zero(2, 2);
  m(1, 0) = std::nan("");
  EXPECT_THROW(require_finite(m, "m"), DataError);
}

}  // namespace
}  // namespace dgsl
