#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lrmm/linalg.hpp"
#include "lrmm/model.hpp"

namespace lrmm {

/// Which dimension enters the scaling floor d * r^2 / sqrt(n).
enum class FloorDimRule { max_dim, geom_mean };

std::string to_string(FloorDimRule rule);
FloorDimRule floor_dim_rule_from_string(const std::string& s);

struct EstimatorConfig {
  int rank = 1;
  bool split = false;
  FloorDimRule floor_dim_rule = FloorDimRule::max_dim;
  /// Seed for the batch permutation in split mode; defaults to samples.seed.
  std::optional<std::uint64_t> split_seed;
};

/// Contiguous d1 x (count * d2) block of observations. In no-split mode the
/// four batches share a single buffer.
struct Batch {
  std::shared_ptr<const Matrix> stacked;
  Eigen::Index d1 = 0;
  Eigen::Index d2 = 0;
  Eigen::Index count = 0;

  auto observation(Eigen::Index i) const { return stacked->middleCols(i * d2, d2); }
};

struct SpectralInit {
  Vector u1_hat;
  Vector v1_hat;
};

struct Refinement {
  Matrix u_tilde;
  Matrix v_tilde;
};

struct Aggregate {
  Matrix m_check;
  double lambda_hat = 0.0;
  bool floor_active = false;
  /// (1/n4) sum Tr^2(U~^T X_i V~) - r, before the max with the floor.
  double moment_branch = 0.0;
  double floor_value = 0.0;
};

struct EstimateReport {
  Matrix m_hat;
  double lambda_hat = 0.0;
  Vector u1_hat;
  Vector v1_hat;
  Matrix u_tilde;
  Matrix v_tilde;
  Matrix m_check;
  bool floor_active = false;
  std::array<Eigen::Index, 4> batch_sizes{};
  FloorDimRule floor_dim_rule = FloorDimRule::max_dim;
};

/// Split mode: seeded permutation cut into four batches of floor(n/4), the
/// remainder going to the fourth. No-split mode: all four alias the full set
/// in a canonical (content-sorted) order, which makes the estimate
/// independent of the input order bit for bit.
std::array<Batch, 4> split_batches(const SampleSet& samples, bool split,
                                   std::uint64_t seed);

/// Leading eigenvector of the batch-1 Gram matrix (1/n1) sum X_i X_i^T, then
/// leading eigenvector of (1/n2) sum X_i^T u u^T X_i over batch 2.
SpectralInit spectral_init(const Batch& batch1, const Batch& batch2);

/// Top-r SVD factors of (1/n3) sum (u^T X_i v) X_i - u v^T.
Refinement refine(const Batch& batch3, const Vector& u1_hat, const Vector& v1_hat,
                  int r);

/// Trace-weighted aggregation and the floored scaling factor.
Aggregate aggregate(const Batch& batch4, const Matrix& u_tilde, const Matrix& v_tilde,
                    int r, Eigen::Index n_total, FloorDimRule rule);

double scaling_floor(Eigen::Index d1, Eigen::Index d2, int r, Eigen::Index n_total,
                     FloorDimRule rule);

/// Spectral aggregation: split -> init -> refine -> aggregate -> rescale.
EstimateReport estimate(const SampleSet& samples, const EstimatorConfig& config);

}  // namespace lrmm
