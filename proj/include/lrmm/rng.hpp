#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace lrmm {

using Engine = std::mt19937_64;

/// SplitMix64 finalizer. A bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for replicate `rep` of grid point `point` under `master`.
///
/// For a fixed master seed the map (point, rep) -> seed is injective as long
/// as both indices fit in 32 bits, so distinct replicates never share a stream.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t point,
                          std::uint64_t rep) noexcept;

Engine make_engine(std::uint64_t seed);

inline double rademacher(Engine& eng) {
  return (eng() >> 63) ? 1.0 : -1.0;
}

/// rows x cols matrix of i.i.d. N(0, scale^2) entries, filled column-major.
Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols,
                                Engine& eng, double scale = 1.0);

}  // namespace lrmm
