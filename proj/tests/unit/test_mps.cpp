#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "tnload/linalg.hpp"
#include "tnload/mps.hpp"

namespace tnload {
namespace {

TEST(FromDense, ExactWithFullBondAndMatchesBruteForce) {
  std::mt19937_64 rng(1);
  for (int n : {2, 5, 8}) {
    const Vector v = testing::random_state(n, rng);
    const auto r = mps::from_dense(v, 1 << n, 0.0);
    EXPECT_LT((testing::mps_amplitudes(r.mps) - v).norm(), 1e-12);
    EXPECT_LT((mps::to_dense(r.mps) - v).norm(), 1e-12);
    EXPECT_LT(r.report.total(), 1e-24);
    EXPECT_EQ(r.mps.canonical_form(), CanonicalForm::Left);
    EXPECT_LT(mps::left_canonical_defect(r.mps), 1e-12);
  }
}

TEST(FromDense, ProductStateHasBondOne) {
  Vector v = testing::basis_zero(6);
  const auto r = mps::from_dense(v, 8, 0.0);
  EXPECT_EQ(r.mps.largest_bond(), 1);
}

TEST(FromDense, BellPairHasBondTwo) {
  Vector v = Vector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  const auto r = mps::from_dense(v, 4, 0.0);
  EXPECT_EQ(r.mps.bond_dims(), (std::vector<int>{1, 2, 1}));
  const auto c = mps::from_dense(v, 1, 0.0);
  EXPECT_NEAR(c.report.total(), 0.5, 1e-12);
}

TEST(FromDense, BondDimsRespectCapAndDimensionBound) {
  std::mt19937_64 rng(2);
  const Vector v = testing::random_state(10, rng);
  for (int chi : {1, 2, 3, 7, 16, 64}) {
    const auto r = mps::from_dense(v, chi, 0.0);
    const auto b = r.mps.bond_dims();
    ASSERT_EQ(b.size(), 11u);
    EXPECT_EQ(b.front(), 1);
    EXPECT_EQ(b.back(), 1);
    for (int k = 1; k < 10; ++k) EXPECT_LE(b[k], std::min({chi, 1 << k, 1 << (10 - k)}));
  }
}

TEST(FromDense, TruncationBoundHolds) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector v = testing::random_state(8, rng, trial % 2 == 0);
    for (int chi : {1, 2, 4, 8}) {
      const auto r = mps::from_dense(v, chi, 0.0);
      const double err2 = (mps::to_dense(r.mps) - v).squaredNorm();
      EXPECT_LE(err2, 2.0 * r.report.total() + 1e-12);
    }
  }
}

TEST(FromDense, EpsilonBudgetDropsSmallValues) {
  std::mt19937_64 rng(4);
  const Vector v = testing::random_state(8, rng);
  const auto strict = mps::from_dense(v, 16, 0.0);
  const auto loose = mps::from_dense(v, 16, 1e-2);
  EXPECT_LE(loose.mps.largest_bond(), strict.mps.largest_bond());
  for (double e : loose.report.discarded) EXPECT_LE(e, 1e-2 + 1e-15);
}

TEST(FromDense, InfidelityDecreasesWithChi) {
  std::mt19937_64 rng(5);
  const Vector v = testing::random_state(10, rng);
  double prev = 2.0;
  for (int chi : {1, 2, 4, 8, 16, 32}) {
    const Vector a = mps::to_dense(mps::from_dense(v, chi).mps);
    const double inf = 1.0 - std::abs(v.dot(a));
    EXPECT_LE(inf, prev + 1e-12);
    prev = inf;
  }
  EXPECT_LT(prev, 1e-12);
}

TEST(FromDense, Errors) {
  EXPECT_THROW(mps::from_dense(Vector::Zero(6), 2), ValidationError);
  EXPECT_THROW(mps::from_dense(testing::basis_zero(3), 0), ValidationError);
  EXPECT_THROW(mps::from_dense(Vector::Zero(4), 2), ValidationError);
}

TEST(Inner, MatchesDenseDot) {
  std::mt19937_64 rng(6);
  const Mps a = testing::random_mps(7, 3, rng);
  const Mps b = testing::random_mps(7, 5, rng);
  const cplx want = testing::mps_amplitudes(a).dot(testing::mps_amplitudes(b));
  EXPECT_LT(std::abs(mps::inner(a, b) - want), 1e-10 * std::abs(want) + 1e-12);
  EXPECT_NEAR(mps::norm(a), testing::mps_amplitudes(a).norm(), 1e-10);
}

TEST(Canonicalize, PreservesNormalizedStateAndFormsIsometries) {
  std::mt19937_64 rng(7);
  const Mps m = testing::random_mps(7, 4, rng);
  const Vector dense = testing::mps_amplitudes(m).normalized();
  const Mps l = mps::left_canonicalize(m);
  const Mps r = mps::right_canonicalize(m);
  EXPECT_LT((testing::mps_amplitudes(l) - dense).norm(), 1e-10 * dense.norm());
  EXPECT_LT((testing::mps_amplitudes(r) - dense).norm(), 1e-10 * dense.norm());
  EXPECT_EQ(l.canonical_form(), CanonicalForm::Left);
  EXPECT_EQ(r.canonical_form(), CanonicalForm::Right);
  for (int k = 0; k + 1 < 7; ++k) EXPECT_LT(linalg::isometry_defect(l.site(k).left_matrix()), 1e-12);
  for (int k = 1; k < 7; ++k) EXPECT_LT(linalg::isometry_defect(r.site(k).right_matrix().adjoint()), 1e-12);
}

TEST(Truncate, IsOptimalForChiEqualToBond) {
  std::mt19937_64 rng(8);
  const Vector v = testing::random_state(8, rng);
  const auto full = mps::from_dense(v, 64).mps;
  const auto same = mps::truncate(full, 64);
  EXPECT_LT((mps::to_dense(same.mps) - v).norm(), 1e-12);
  const auto two = mps::truncate(full, 2);
  EXPECT_LE(two.mps.largest_bond(), 2);
  EXPECT_EQ(two.mps.canonical_form(), CanonicalForm::Left);
  // Same optimum as compressing the dense vector directly.
  const auto direct = mps::from_dense(v, 2).mps;
  const double f1 = std::abs(v.dot(mps::to_dense(two.mps))) / mps::norm(two.mps);
  const double f2 = std::abs(v.dot(mps::to_dense(direct))) / mps::norm(direct);
  EXPECT_NEAR(f1, f2, 1e-6);
}

TEST(ApplyGate, MatchesDenseOperator) {
  std::mt19937_64 rng(9);
  const int n = 6;
  const Vector v = testing::random_state(n, rng);
  Mps m = mps::from_dense(v, 64).mps;
  Vector ref = v;
  for (int step = 0; step < 12; ++step) {
    const int site = static_cast<int>(rng() % (n - 1));
    const Matrix4 u = testing::random_gate(rng);
    m = mps::apply_two_qubit_gate(m, u, site, 64).mps;
    ref = testing::full_operator(u, site, n) * ref;
    EXPECT_LT((testing::mps_amplitudes(m) - ref).norm(), 1e-10);
  }
}

TEST(ApplyGate, Errors) {
  const Mps m = Mps::basis_state({0, 0, 0});
  EXPECT_THROW(mps::apply_two_qubit_gate(m, Matrix4::Identity(), 2, 4), ValidationError);
  Matrix4 bad = Matrix4::Identity();
  bad(0, 0) = 2.0;
  EXPECT_THROW(mps::apply_two_qubit_gate(m, bad, 0, 4), ValidationError);
}

TEST(MpsConstructor, RejectsInconsistentShapes) {
  std::vector<SiteTensor> t{SiteTensor(1, 2), SiteTensor(3, 1)};
  EXPECT_THROW(Mps(std::move(t), CanonicalForm::None, 4), ValidationError);
}

TEST(ToDense, RefusesAboveCap) {
  const Mps m = Mps::basis_state(std::vector<int>(21, 0));
  EXPECT_THROW(mps::to_dense(m), ValidationError);
}

TEST(Json, RoundTripIsExact) {
  std::mt19937_64 rng(10);
  for (bool real : {true, false}) {
    const Mps m = testing::random_mps(5, 3, rng, real);
    const auto text = mps::to_json(m, BitOrdering::InterleavedSnake);
    const auto back = mps::from_json(text);
    EXPECT_EQ(back.ordering, BitOrdering::InterleavedSnake);
    ASSERT_EQ(back.mps.n_sites(), 5);
    for (int k = 0; k < 5; ++k)
      for (int s = 0; s < 2; ++s) EXPECT_EQ(back.mps.site(k).slice[s], m.site(k).slice[s]);
  }
  EXPECT_THROW(mps::from_json("{}"), FormatError);
  EXPECT_THROW(mps::from_json("not json"), FormatError);
}

}  // namespace
}  // namespace tnload
