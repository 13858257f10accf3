#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "tnload/linalg.hpp"

namespace tnload {
namespace {

TEST(Svd, ReconstructsAndSortsDescending) {
  std::mt19937_64 rng(11);
  for (auto [r, c] : {std::pair{6, 3}, std::pair{3, 6}, std::pair{4, 4}, std::pair{2, 64}}) {
    const Matrix a = testing::random_unitary(std::max(r, c), rng).topLeftCorner(r, c) * 1.7;
    const auto f = linalg::svd(a);
    EXPECT_LT((f.U * f.S.cast<cplx>().asDiagonal() * f.V.adjoint() - a).cwiseAbs().maxCoeff(), 1e-12);
    for (Eigen::Index i = 1; i < f.S.size(); ++i) EXPECT_GE(f.S(i - 1), f.S(i));
    EXPECT_LT(linalg::isometry_defect(f.U), 1e-12);
    EXPECT_LT(linalg::isometry_defect(f.V), 1e-12);
  }
}

TEST(Svd, LargestEntryOfEachLeftVectorIsRealPositive) {
  std::mt19937_64 rng(5);
  const Matrix a = testing::random_unitary(5, rng).leftCols(3);
  const auto f = linalg::svd(a * 2.0);
  for (Eigen::Index j = 0; j < f.U.cols(); ++j) {
    Eigen::Index pivot = 0;
    f.U.col(j).cwiseAbs().maxCoeff(&pivot);
    EXPECT_GT(f.U(pivot, j).real(), 0.0);
    EXPECT_EQ(f.U(pivot, j).imag(), 0.0);
  }
}

TEST(Svd, IsDeterministic) {
  std::mt19937_64 rng(9);
  const Matrix a = testing::random_unitary(8, rng).leftCols(5);
  const auto f1 = linalg::svd(a);
  const auto f2 = linalg::svd(a);
  EXPECT_EQ(f1.U, f2.U);
  EXPECT_EQ(f1.V, f2.V);
  EXPECT_EQ(f1.S, f2.S);
}

TEST(Svd, RejectsNonFinite) {
  Matrix a = Matrix::Identity(2, 2);
  a(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(linalg::svd(a), NumericError);
}

TEST(Qr, ThinFactorsWithNonnegativeDiagonal) {
  std::mt19937_64 rng(3);
  const Matrix a = testing::random_unitary(6, rng).leftCols(4) * cplx(0.3, 1.1);
  const auto f = linalg::qr(a);
  EXPECT_EQ(f.Q.cols(), 4);
  EXPECT_LT((f.Q * f.R - a).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(linalg::isometry_defect(f.Q), 1e-12);
  for (Eigen::Index i = 0; i < 4; ++i) {
    EXPECT_GE(f.R(i, i).real(), 0.0);
    EXPECT_NEAR(f.R(i, i).imag(), 0.0, 1e-14);
  }
}

}  // namespace
}  // namespace tnload
