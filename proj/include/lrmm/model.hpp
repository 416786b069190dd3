#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lrmm/linalg.hpp"

namespace lrmm {

/// A planted rank-r mean matrix m = u_basis * diag(singular_values) * v_basis^T.
struct SignalMatrix {
  Matrix m;
  int rank = 0;
  Vector singular_values;
  Matrix u_basis;
  Matrix v_basis;

  double lambda() const { return singular_values[rank - 1]; }
};

/// n observations X_i = s_i M + Z_i, stored side by side in one
/// d1 x (n * d2) matrix so that stage sums map onto dense products.
struct SampleSet {
  Eigen::Index d1 = 0;
  Eigen::Index d2 = 0;
  Matrix stacked;
  std::optional<std::vector<int>> labels;
  double noise_scale = 1.0;
  std::uint64_t seed = 0;

  Eigen::Index size() const { return d2 == 0 ? 0 : stacked.cols() / d2; }
  auto observation(Eigen::Index i) const { return stacked.middleCols(i * d2, d2); }
  auto observation(Eigen::Index i) { return stacked.middleCols(i * d2, d2); }

  /// Builds a set from separate matrices; all must share dimensions.
  static SampleSet from_matrices(const std::vector<Matrix>& obs);
};

inline constexpr double kDefaultCondition = 1.5;

/// Random orthonormal bases (QR of Gaussian matrices) with singular values
/// equally spaced from condition * lambda down to lambda. For r = 1 the single
/// singular value is lambda.
SignalMatrix make_signal(int d1, int d2, int r, double lambda,
                         double condition, std::uint64_t seed);

/// Independent fair labels and N(0, noise_scale^2) noise. For each sample the
/// label is drawn first, then the d1*d2 noise entries in column-major order.
SampleSet sample_lrmm(const SignalMatrix& signal, int n, double noise_scale,
                      std::uint64_t seed);

/// lambda * u v^T with u_i = +-d1^{-1/2} and v_j = +-d2^{-1/2}.
SignalMatrix rademacher_rank1(int d1, int d2, double lambda, std::uint64_t seed);

/// min(||m_hat - m||_F, ||m_hat + m||_F).
double loss(const Matrix& m_hat, const Matrix& m);

/// rank_r_approx of (1/n) sum s_i X_i with the true labels.
Matrix known_label_oracle(const SampleSet& samples, int r);

/// Checks the SignalMatrix invariants; returns false on violation.
bool satisfies_invariants(const SignalMatrix& signal, double condition_bound);

}  // namespace lrmm
