#include "lrmm/rng.hpp"

namespace lrmm {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t point,
                          std::uint64_t rep) noexcept {
  const std::uint64_t key = (point << 32) ^ (rep & 0xffffffffULL);
  return mix64(master + mix64(key));
}

Engine make_engine(std::uint64_t seed) { return Engine(mix64(seed)); }

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols,
                                Engine& eng, double scale) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd out(rows, cols);
  double* p = out.data();
  for (Eigen::Index i = 0, n = out.size(); i < n; ++i) p[i] = scale * normal(eng);
  return out;
}

}  // namespace lrmm
