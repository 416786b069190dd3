#include "lrmm/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lrmm/error.hpp"
#include "lrmm/rng.hpp"

namespace lrmm {

namespace {

Matrix orthonormal_basis(int d, int r, Engine& eng) {
  const Matrix g = gaussian_matrix(d, r, eng);
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(d, r);
}

}  // namespace

SampleSet SampleSet::from_matrices(const std::vector<Matrix>& obs) {
  SampleSet out;
  if (obs.empty()) return out;
  out.d1 = obs.front().rows();
  out.d2 = obs.front().cols();
  out.stacked.resize(out.d1, out.d2 * static_cast<Eigen::Index>(obs.size()));
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (obs[i].rows() != out.d1 || obs[i].cols() != out.d2)
      throw DimensionError("observation " + std::to_string(i) +
                           " has mismatched dimensions");
    out.observation(static_cast<Eigen::Index>(i)) = obs[i];
  }
  return out;
}

SignalMatrix make_signal(int d1, int d2, int r, double lambda,
                         double condition, std::uint64_t seed) {
  if (d1 < 1 || d2 < 1 || r < 1 || r > std::min(d1, d2))
    throw DimensionError("make_signal: need 1 <= r <= min(d1, d2)");
  if (!(lambda > 0.0)) throw DimensionError("make_signal: lambda must be positive");
  if (!(condition >= 1.0)) throw DimensionError("make_signal: condition must be >= 1");

  Engine eng = make_engine(seed);
  SignalMatrix s;
  s.rank = r;
  s.u_basis = orthonormal_basis(d1, r, eng);
  s.v_basis = orthonormal_basis(d2, r, eng);
  s.singular_values.resize(r);
  if (r == 1) {
    s.singular_values[0] = lambda;
  } else {
    const double top = condition * lambda;
    for (int k = 0; k < r; ++k)
      s.singular_values[k] = top - (top - lambda) * k / (r - 1);
  }
  s.m = s.u_basis * s.singular_values.asDiagonal() * s.v_basis.transpose();
  return s;
}

SampleSet sample_lrmm(const SignalMatrix& signal, int n, double noise_scale,
                      std::uint64_t seed) {
  if (n < 1) throw DimensionError("sample_lrmm: n must be positive");
  if (!(noise_scale >= 0.0))
    throw DimensionError("sample_lrmm: noise_scale must be nonnegative");

  const Eigen::Index d1 = signal.m.rows();
  const Eigen::Index d2 = signal.m.cols();
  Engine eng = make_engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  SampleSet out;
  out.d1 = d1;
  out.d2 = d2;
  out.noise_scale = noise_scale;
  out.seed = seed;
  out.stacked.resize(d1, d2 * n);
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) {
    const double s = rademacher(eng);
    labels[i] = s > 0 ? 1 : -1;
    auto x = out.observation(i);
    if (noise_scale == 0.0) {
      x = s * signal.m;
      continue;
    }
    for (Eigen::Index c = 0; c < d2; ++c)
      for (Eigen::Index r = 0; r < d1; ++r)
        x(r, c) = s * signal.m(r, c) + noise_scale * normal(eng);
  }
  out.labels = std::move(labels);
  return out;
}

SignalMatrix rademacher_rank1(int d1, int d2, double lambda, std::uint64_t seed) {
  if (d1 < 1 || d2 < 1) throw DimensionError("rademacher_rank1: bad dimensions");
  Engine eng = make_engine(seed);
  SignalMatrix s;
  s.rank = 1;
  s.u_basis.resize(d1, 1);
  s.v_basis.resize(d2, 1);
  const double cu = 1.0 / std::sqrt(static_cast<double>(d1));
  const double cv = 1.0 / std::sqrt(static_cast<double>(d2));
  for (int i = 0; i < d1; ++i) s.u_basis(i, 0) = cu * rademacher(eng);
  for (int j = 0; j < d2; ++j) s.v_basis(j, 0) = cv * rademacher(eng);
  s.singular_values = Vector::Constant(1, lambda);
  s.m = lambda * s.u_basis * s.v_basis.transpose();
  return s;
}

double loss(const Matrix& m_hat, const Matrix& m) {
  if (m_hat.rows() != m.rows() || m_hat.cols() != m.cols())
    throw DimensionError("loss: dimension mismatch");
  return std::min((m_hat - m).norm(), (m_hat + m).norm());
}

Matrix known_label_oracle(const SampleSet& samples, int r) {
  if (!samples.labels) throw MissingLabels("known_label_oracle needs labels");
  const Eigen::Index n = samples.size();
  if (n < 1) throw DimensionError("known_label_oracle: empty sample set");
  Matrix avg = Matrix::Zero(samples.d1, samples.d2);
  for (Eigen::Index i = 0; i < n; ++i)
    avg.noalias() += static_cast<double>((*samples.labels)[i]) * samples.observation(i);
  avg /= static_cast<double>(n);
  return rank_r_approx(avg, r);
}

bool satisfies_invariants(const SignalMatrix& s, double condition_bound) {
  const int r = s.rank;
  if (r < 1 || s.singular_values.size() != r) return false;
  if (!(s.singular_values[r - 1] > 0.0)) return false;
  for (int k = 1; k < r; ++k)
    if (s.singular_values[k] > s.singular_values[k - 1]) return false;
  const double s1 = s.singular_values[0];
  if (s1 / s.singular_values[r - 1] > condition_bound * (1.0 + 1e-12)) return false;
  const Matrix recon = s.u_basis * s.singular_values.asDiagonal() * s.v_basis.transpose();
  if ((recon - s.m).norm() > 1e-10 * s1) return false;
  const double ou = (s.u_basis.transpose() * s.u_basis - Matrix::Identity(r, r)).norm();
  const double ov = (s.v_basis.transpose() * s.v_basis - Matrix::Identity(r, r)).norm();
  return ou <= 1e-8 && ov <= 1e-8;
}

}  // namespace lrmm
