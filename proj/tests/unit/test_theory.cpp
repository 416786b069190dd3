#include <cmath>

#include <gtest/gtest.h>

#include "lrmm/error.hpp"
#include "lrmm/theory.hpp"

using namespace lrmm;

namespace {

double binom(int n, int k) {
  double c = 1;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// Enumerates every sign vector of length n.
double enumerated_moment(int n, int k) {
  double total = 0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    const int s = 2 * __builtin_popcount(mask) - n;
    total += std::pow(static_cast<double>(s), 2 * k);
  }
  return total / (1u << n);
}

}  // namespace

TEST(MinimaxRate, HandValues) {
  EXPECT_NEAR(minimax_rate(100, 25, 1, 1.0), 1.0, 1e-15);
  EXPECT_NEAR(minimax_rate(1000000, 25, 1, 1.0), 0.01, 1e-15);
  EXPECT_NEAR(minimax_rate(100, 25, 3, 1e-6), 1e-6 * std::sqrt(3.0), 1e-18);
}

TEST(MinimaxRate, MonotoneLattice) {
  const std::int64_t ns[] = {10, 100, 1000};
  const std::int64_t ds[] = {5, 50, 500};
  const double ls[] = {0.1, 1.0, 10.0};
  for (auto d : ds)
    for (double l : ls)
      for (int i = 0; i + 1 < 3; ++i) {
        EXPECT_GE(minimax_rate(ns[i], d, 2, l), minimax_rate(ns[i + 1], d, 2, l));
        EXPECT_LE(minimax_rate(ns[1], ds[i], 2, l), minimax_rate(ns[1], ds[i + 1], 2, l));
      }
  for (auto n : ns)
    for (auto d : ds)
      for (double l : ls) {
        const double rate = minimax_rate(n, d, 2, l);
        EXPECT_GE(rate, 0.0);
        EXPECT_LE(rate, l * std::sqrt(2.0) * (1 + 1e-15));
      }
}

TEST(Classify, PublishedRegimes) {
  EXPECT_EQ(classify(300, 250, 2, 5.0).sample_regime, SampleRegime::R1);
  EXPECT_EQ(classify(500, 100, 2, 5.0).sample_regime, SampleRegime::R2);
  EXPECT_EQ(classify(3000, 20, 2, 5.0).sample_regime, SampleRegime::R3);
}

TEST(Classify, Thresholds) {
  const auto p = classify(10000, 100, 1, 10.0);
  EXPECT_NEAR(p.comp_threshold, 1.0, 1e-15);
  EXPECT_EQ(p.hardness, Hardness::poly_easy);
  EXPECT_NEAR(p.info_threshold, std::pow(100.0, 0.25) * std::pow(1e4, -0.25) + 0.1, 1e-15);
  EXPECT_EQ(classify(10000, 100, 1, 0.3).hardness, Hardness::impossible);
  EXPECT_EQ(classify(10000, 100, 1, 0.8).hardness, Hardness::stat_possible_comp_hard);
}

TEST(RademacherMoment, SmallCases) {
  for (int k = 0; k < 5; ++k) EXPECT_DOUBLE_EQ(rademacher_moment(1, k).value, 1.0);
  EXPECT_DOUBLE_EQ(rademacher_moment(2, 2).value, 8.0);
  EXPECT_DOUBLE_EQ(rademacher_moment(2, 1).value, 2.0);
  EXPECT_DOUBLE_EQ(rademacher_moment(7, 0).value, 1.0);
}

TEST(RademacherMoment, MatchesEnumerationAndDominatesTupleCount) {
  for (int n = 1; n <= 12; ++n)
    for (int k = 1; k <= 5; ++k) {
      const double exact = enumerated_moment(n, k);
      EXPECT_NEAR(rademacher_moment(n, k).value, exact, 1e-12 * exact) << n << "," << k;
      EXPECT_GE(rademacher_moment(n, k).value, binom(n + k - 1, k) * (1 - 1e-14));
      EXPECT_NEAR(std::exp(log_tuple_count(n, k)), binom(n + k - 1, k), 1e-10 * binom(n + k - 1, k));
    }
}

TEST(RademacherMoment, LargeArgumentsStayFiniteInLogSpace) {
  // Second moment is n exactly; fourth is 3n^2 - 2n.
  EXPECT_NEAR(rademacher_moment(1000000000, 1).log_value, std::log(1e9), 1e-9);
  const double n = 1e6;
  EXPECT_NEAR(rademacher_moment(1000000, 2).log_value, std::log(3 * n * n - 2 * n), 1e-9);
  const auto huge = rademacher_moment(1000000000, 1000);
  EXPECT_TRUE(std::isfinite(huge.log_value));
  EXPECT_TRUE(huge.overflow);
}

TEST(LowDegree, UnitAtZeroLambda) {
  for (auto mode : {LowDegreeMode::paper_bound, LowDegreeMode::exact, LowDegreeMode::brute_force})
    EXPECT_EQ(lowdeg_norm(4, 3, 3, 0.0, 4, mode).value, 1.0);
}

TEST(LowDegree, PaperBoundHandValue) {
  EXPECT_DOUBLE_EQ(lowdeg_norm(100, 10, 10, 1.0, 2, LowDegreeMode::paper_bound).value, 1.5);
}

TEST(LowDegree, ExactMatchesBruteForce) {
  for (int degree = 1; degree <= 6; ++degree) {
    const double exact = lowdeg_norm(8, 4, 4, 1.0, degree, LowDegreeMode::exact).value;
    const double brute = lowdeg_norm(8, 4, 4, 1.0, degree, LowDegreeMode::brute_force).value;
    EXPECT_NEAR(exact, brute, 1e-10 * exact) << degree;
  }
}

TEST(LowDegree, BruteForceCap) {
  EXPECT_THROW(lowdeg_norm(20, 3, 3, 1.0, 2, LowDegreeMode::brute_force), BruteForceTooLarge);
}

TEST(LowDegree, ExactMonotone) {
  double prev = 0;
  for (int degree = 1; degree <= 10; ++degree) {
    const double v = lowdeg_norm(50, 10, 10, 1.5, degree, LowDegreeMode::exact).value;
    EXPECT_GE(v, prev);
    EXPECT_GE(v, 1.0);
    prev = v;
  }
  for (double l : {0.5, 1.0, 2.0})
    EXPECT_LE(lowdeg_norm(50, 10, 10, l, 6, LowDegreeMode::exact).value,
              lowdeg_norm(50, 10, 10, l * 1.1, 6, LowDegreeMode::exact).value);
  for (int n : {10, 100, 1000})
    EXPECT_LE(lowdeg_norm(n, 10, 10, 1.0, 6, LowDegreeMode::exact).value,
              lowdeg_norm(n * 2, 10, 10, 1.0, 6, LowDegreeMode::exact).value);
}

TEST(LowDegree, ModesParse) {
  EXPECT_EQ(low_degree_mode_from_string("bound"), LowDegreeMode::paper_bound);
  EXPECT_EQ(low_degree_mode_from_string("brute"), LowDegreeMode::brute_force);
  EXPECT_EQ(low_degree_mode_from_string("exact"), LowDegreeMode::exact);
}

TEST(TraceConcentration, LargeSampleSmallDeviation) {
  EXPECT_LE(trace_concentration_mc(2, 100000, 30, 1).median, 0.1);
}

TEST(TraceConcentration, ScalarChiSquare) {
  const int n = 400;
  EXPECT_LE(trace_concentration_mc(1, n, 50, 2).median, 5.0 / std::sqrt(n));
}

TEST(TraceConcentration, Deterministic) {
  const auto a = trace_concentration_mc(3, 200, 30, 5);
  const auto b = trace_concentration_mc(3, 200, 30, 5);
  EXPECT_EQ(a.median, b.median);
  EXPECT_EQ(a.q90, b.q90);
  EXPECT_LE(a.median, a.q90);
}

TEST(Quantile, LinearInterpolation) {
  EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4, 5}, 0.9), 4.6);
}
