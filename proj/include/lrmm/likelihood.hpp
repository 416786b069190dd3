#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lrmm/linalg.hpp"
#include "lrmm/model.hpp"

namespace lrmm {

/// log cosh(t), overflow-safe for any finite t.
double logcosh(double t);

/// Log-density of the symmetric two-component mixture at x:
/// -(d1 d2 / 2) log(2 pi) - ||x||^2/2 - ||m||^2/2 + logcosh(<x, m>).
double log_density(const Matrix& m, const Matrix& x);

/// -sum_i log_density(m, X_i).
double neg_log_lik(const SampleSet& samples, const Matrix& m);

enum class MleMethod { em, grid };
std::string to_string(MleMethod method);

struct MleResult {
  Matrix m_hat;
  double neg_log_lik = 0.0;
  int iterations = 0;
  bool converged = false;
  MleMethod method = MleMethod::em;
  /// Negative log-likelihood of the initial point followed by each iterate.
  std::vector<double> trace;
};

struct EmOptions {
  int max_iter = 500;
  double tol = 1e-8;
};

/// Projected EM: M <- project_rank((1/n) sum tanh(<X_i, M>) X_i, r) until the
/// Frobenius step is at most tol. With r = min(d1, d2) this is plain EM for
/// the symmetric two-component mixture.
MleResult em_mle(const SampleSet& samples, int r, const Matrix& init,
                 const EmOptions& opts = {});

/// Rank-one 2x2 parameterization lambda * u(alpha) v(beta)^T with
/// u(t) = (cos t, sin t).
Matrix grid_matrix(double lambda, double alpha, double beta);

/// Angles used by grid_mle: alpha_j = pi * j / steps, j = 0 .. steps-1.
std::vector<double> grid_angles(int steps);

/// Exhaustive maximizer of the likelihood over lambda_grid x angles x angles.
/// Only defined for 2x2 observations.
MleResult grid_mle(const SampleSet& samples, const std::vector<double>& lambda_grid,
                   int angle_steps);

/// Grid point closest to m in the sign-invariant loss.
Matrix nearest_grid_point(const Matrix& m, const std::vector<double>& lambda_grid,
                          int angle_steps);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Hellinger affinity gap 1 - int sqrt(p1 p2), estimated under X ~ p_{m1} as
/// (1/2) E (1 - w)^2 with w = sqrt(p2/p1)(X). Same expectation as 1 - E w but
/// every draw contributes a nonnegative term.
McEstimate hellinger_mc(const Matrix& m1, const Matrix& m2, int draws,
                        std::uint64_t seed);

/// KL(p_{m1} || p_{m2}) as the sample mean of log p1/p2 under X ~ p_{m1}.
McEstimate kl_mc(const Matrix& m1, const Matrix& m2, int draws, std::uint64_t seed);

}  // namespace lrmm
