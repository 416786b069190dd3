#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "lrmm/error.hpp"
#include "lrmm/model.hpp"
#include "lrmm/rng.hpp"

using namespace lrmm;

TEST(MakeSignal, PublishedSpacing) {
  const auto s = make_signal(250, 250, 2, 2.0, 1.5, 1);
  ASSERT_EQ(s.singular_values.size(), 2);
  EXPECT_DOUBLE_EQ(s.singular_values(0), 3.0);
  EXPECT_DOUBLE_EQ(s.singular_values(1), 2.0);
}

TEST(MakeSignal, RankOneUsesLambda) {
  const auto s = make_signal(6, 5, 1, 5.0, 1.5, 2);
  ASSERT_EQ(s.singular_values.size(), 1);
  EXPECT_DOUBLE_EQ(s.singular_values(0), 5.0);
  EXPECT_DOUBLE_EQ(s.lambda(), 5.0);
}

TEST(MakeSignal, ArithmeticSpacing) {
  const auto s = make_signal(8, 8, 4, 1.0, 1.5, 3);
  const double expected[] = {1.5, 1.5 - 0.5 / 3, 1.5 - 1.0 / 3, 1.0};
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(s.singular_values(k), expected[k], 1e-15);
}

TEST(MakeSignal, RankTooLargeThrows) {
  EXPECT_THROW(make_signal(3, 2, 3, 1.0, 1.5, 0), DimensionError);
}

TEST(MakeSignal, InvariantLattice) {
  for (int d : {3, 10, 50})
    for (int r : {1, 2, 3})
      for (double lambda : {0.1, 1.0, 10.0}) {
        const auto s = make_signal(d, d, r, lambda, 1.5, static_cast<std::uint64_t>(d * 100 + r));
        EXPECT_TRUE(satisfies_invariants(s, 1.5)) << d << " " << r << " " << lambda;
        const Matrix rec = s.u_basis * s.singular_values.asDiagonal() * s.v_basis.transpose();
        EXPECT_LE((rec - s.m).norm(), 1e-10 * s.singular_values(0));
      }
}

TEST(MakeSignal, SeedDeterministic) {
  EXPECT_EQ(make_signal(7, 9, 2, 2.0, 1.5, 42).m, make_signal(7, 9, 2, 2.0, 1.5, 42).m);
  EXPECT_NE(make_signal(7, 9, 2, 2.0, 1.5, 42).m, make_signal(7, 9, 2, 2.0, 1.5, 43).m);
}

TEST(SampleLrmm, NoiselessIsSignedSignal) {
  const auto s = make_signal(4, 3, 1, 2.0, 1.5, 5);
  const auto samples = sample_lrmm(s, 30, 0.0, 9);
  ASSERT_TRUE(samples.labels.has_value());
  ASSERT_EQ(samples.size(), 30);
  for (Eigen::Index i = 0; i < samples.size(); ++i) {
    const double label = (*samples.labels)[static_cast<std::size_t>(i)];
    EXPECT_TRUE(label == 1 || label == -1);
    EXPECT_EQ(Matrix(samples.observation(i)), label * s.m);
    EXPECT_EQ(Matrix(label * samples.observation(i)), s.m);
  }
}

TEST(SampleLrmm, PureNoiseMeanNearZero) {
  SignalMatrix zero;
  zero.m = Matrix::Zero(3, 3);
  zero.rank = 1;
  const int n = 10000;
  const auto samples = sample_lrmm(zero, n, 1.0, 11);
  Matrix mean = Matrix::Zero(3, 3);
  for (Eigen::Index i = 0; i < n; ++i) mean += samples.observation(i);
  mean /= n;
  EXPECT_LT(mean.cwiseAbs().maxCoeff(), 5.0 / std::sqrt(n));
}

TEST(SampleLrmm, LabelsBalanced) {
  const auto s = make_signal(2, 2, 1, 1.0, 1.5, 1);
  const int n = 10000;
  const auto samples = sample_lrmm(s, n, 1.0, 12);
  double sum = 0;
  for (int l : *samples.labels) sum += l;
  EXPECT_LT(std::abs(sum / n), 5.0 / std::sqrt(n));
}

TEST(SampleLrmm, SeedReproducible) {
  const auto s = make_signal(5, 4, 2, 3.0, 1.5, 1);
  const auto a = sample_lrmm(s, 20, 1.0, 77);
  const auto b = sample_lrmm(s, 20, 1.0, 77);
  EXPECT_EQ(a.stacked, b.stacked);
  EXPECT_EQ(*a.labels, *b.labels);
}

TEST(RademacherRank1, UnitFactors) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = rademacher_rank1(4, 4, 2.5, seed);
    EXPECT_NEAR(s.m.norm(), 2.5, 1e-12);
    for (Eigen::Index i = 0; i < 16; ++i) EXPECT_NEAR(std::abs(s.m(i)), 2.5 / 4, 1e-15);
  }
  const auto scalar = rademacher_rank1(1, 1, 3.0, 4);
  EXPECT_EQ(std::abs(scalar.m(0, 0)), 3.0);
}

TEST(Loss, Examples) {
  Engine eng = make_engine(1);
  const Matrix m = gaussian_matrix(3, 2, eng);
  EXPECT_EQ(loss(m, m), 0.0);
  EXPECT_EQ(loss(-m, m), 0.0);
  Matrix a = Matrix::Zero(2, 2), b = Matrix::Zero(2, 2);
  a(0, 0) = 1;
  b(1, 1) = 1;
  EXPECT_NEAR(loss(b, a), std::sqrt(2.0), 1e-15);
  EXPECT_THROW(loss(Matrix::Zero(2, 2), Matrix::Zero(2, 3)), DimensionError);
}

TEST(Loss, SymmetryProperty) {
  Engine eng = make_engine(2);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix a = gaussian_matrix(3, 4, eng);
    const Matrix b = gaussian_matrix(3, 4, eng);
    EXPECT_DOUBLE_EQ(loss(a, b), loss(b, a));
    EXPECT_DOUBLE_EQ(loss(a, b), loss(-a, b));
    EXPECT_DOUBLE_EQ(loss(a, b), loss(a, -b));
  }
}

TEST(KnownLabelOracle, NoiselessExact) {
  const auto s = make_signal(6, 5, 2, 2.0, 1.5, 8);
  const auto samples = sample_lrmm(s, 10, 0.0, 3);
  EXPECT_LT((known_label_oracle(samples, 2) - s.m).norm(), 1e-10);
}

TEST(KnownLabelOracle, PureNoiseScale) {
  SignalMatrix zero;
  zero.m = Matrix::Zero(10, 10);
  zero.rank = 1;
  const int n = 200;
  for (std::uint64_t rep = 0; rep < 50; ++rep) {
    const auto samples = sample_lrmm(zero, n, 1.0, derive_seed(5, 0, rep));
    EXPECT_LT(known_label_oracle(samples, 1).norm(), 5.0 * std::sqrt(20.0 / n));
  }
}

TEST(KnownLabelOracle, FlippingLabelsAndObservationsInvariant) {
  const auto s = make_signal(5, 5, 1, 2.0, 1.5, 8);
  auto samples = sample_lrmm(s, 40, 1.0, 3);
  const Matrix before = known_label_oracle(samples, 1);
  samples.stacked = -samples.stacked;
  for (int& l : *samples.labels) l = -l;
  EXPECT_LT((known_label_oracle(samples, 1) - before).norm(), 1e-14);
}

TEST(KnownLabelOracle, MissingLabelsThrows) {
  const auto s = make_signal(3, 3, 1, 2.0, 1.5, 8);
  auto samples = sample_lrmm(s, 5, 1.0, 3);
  samples.labels.reset();
  EXPECT_THROW(known_label_oracle(samples, 1), MissingLabels);
}

TEST(Seeds, DerivationDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t p = 0; p < 50; ++p)
    for (std::uint64_t r = 0; r < 50; ++r) seen.insert(derive_seed(1, p, r));
  EXPECT_EQ(seen.size(), 2500u);
  EXPECT_NE(derive_seed(1, 0, 0), derive_seed(2, 0, 0));
}
