#include "lrmm/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lrmm/error.hpp"
#include "lrmm/rng.hpp"

namespace lrmm {

namespace {

using ConstMap = Eigen::Map<const Matrix>;

// Observations of a batch as columns of a (d1*d2) x count matrix.
ConstMap vectorized(const Batch& b) {
  return ConstMap(b.stacked->data(), b.d1 * b.d2, b.count);
}

bool observation_less(const SampleSet& s, Eigen::Index a, Eigen::Index b) {
  const double* pa = s.stacked.data() + a * s.d1 * s.d2;
  const double* pb = s.stacked.data() + b * s.d1 * s.d2;
  for (Eigen::Index k = 0, n = s.d1 * s.d2; k < n; ++k) {
    if (pa[k] != pb[k]) return pa[k] < pb[k];
    if (std::signbit(pa[k]) != std::signbit(pb[k])) return std::signbit(pa[k]);
  }
  return false;
}

Batch gather(const SampleSet& s, const std::vector<Eigen::Index>& idx) {
  auto data = std::make_shared<Matrix>(s.d1, s.d2 * static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k)
    data->middleCols(static_cast<Eigen::Index>(k) * s.d2, s.d2) = s.observation(idx[k]);
  Batch b;
  b.d1 = s.d1;
  b.d2 = s.d2;
  b.count = static_cast<Eigen::Index>(idx.size());
  b.stacked = std::move(data);
  return b;
}

void require_nonempty(const Batch& b, const char* stage) {
  if (!b.stacked || b.count < 1)
    throw TooFewSamples(std::string(stage) + ": empty batch");
}

}  // namespace

std::string to_string(FloorDimRule rule) {
  return rule == FloorDimRule::max_dim ? "max_dim" : "geom_mean";
}

FloorDimRule floor_dim_rule_from_string(const std::string& s) {
  if (s == "max_dim" || s == "max") return FloorDimRule::max_dim;
  if (s == "geom_mean" || s == "geom") return FloorDimRule::geom_mean;
  throw ParseError("unknown floor dimension rule '" + s + "'");
}

std::array<Batch, 4> split_batches(const SampleSet& samples, bool split,
                                   std::uint64_t seed) {
  const Eigen::Index n = samples.size();
  if (split && n < 4) throw TooFewSamples("sample splitting needs n >= 4");
  if (n < 1) throw TooFewSamples("estimator needs at least one sample");
  require_finite(samples.stacked, "samples");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  if (!split) {
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return observation_less(samples, a, b);
    });
    const Batch all = gather(samples, order);
    return {all, all, all, all};
  }

  Engine eng = make_engine(seed);
  std::shuffle(order.begin(), order.end(), eng);
  const Eigen::Index quarter = n / 4;
  std::array<Batch, 4> out;
  auto first = order.begin();
  for (int k = 0; k < 4; ++k) {
    const auto last = (k == 3) ? order.end() : first + quarter;
    out[k] = gather(samples, std::vector<Eigen::Index>(first, last));
    first = last;
  }
  return out;
}

SpectralInit spectral_init(const Batch& batch1, const Batch& batch2) {
  require_nonempty(batch1, "spectral_init");
  require_nonempty(batch2, "spectral_init");

  const Matrix& y1 = *batch1.stacked;
  Matrix gram = Matrix::Zero(batch1.d1, batch1.d1);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(y1, 1.0 / static_cast<double>(batch1.count));
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  if (gram.cwiseAbs().maxCoeff() == 0.0)
    throw DegenerateSpectrum("spectral_init: Gram matrix of batch 1 is zero");

  SpectralInit out;
  out.u1_hat = leading_eigvec_sym(gram).vector;

  // Column i of w is X_i^T u1_hat.
  const Eigen::RowVectorXd proj = out.u1_hat.transpose() * (*batch2.stacked);
  const Eigen::Map<const Matrix> w(proj.data(), batch2.d2, batch2.count);
  Matrix h = Matrix::Zero(batch2.d2, batch2.d2);
  h.selfadjointView<Eigen::Lower>().rankUpdate(w, 1.0 / static_cast<double>(batch2.count));
  h.triangularView<Eigen::StrictlyUpper>() = h.transpose();
  if (h.cwiseAbs().maxCoeff() == 0.0)
    throw DegenerateSpectrum("spectral_init: projected Gram matrix of batch 2 is zero");
  out.v1_hat = leading_eigvec_sym(h).vector;
  return out;
}

Refinement refine(const Batch& batch3, const Vector& u1_hat, const Vector& v1_hat,
                  int r) {
  require_nonempty(batch3, "refine");
  if (u1_hat.size() != batch3.d1 || v1_hat.size() != batch3.d2)
    throw DimensionError("refine: initial vectors do not match the observations");

  const Matrix outer = u1_hat * v1_hat.transpose();
  const auto y = vectorized(batch3);
  const Vector weights = y.transpose() * outer.reshaped();
  Matrix a = (y * weights).reshaped(batch3.d1, batch3.d2);
  a /= static_cast<double>(batch3.count);
  a -= outer;

  TruncatedSvd svd = top_r_svd(a, r);
  return {std::move(svd.left), std::move(svd.right)};
}

double scaling_floor(Eigen::Index d1, Eigen::Index d2, int r, Eigen::Index n_total,
                     FloorDimRule rule) {
  const double d = rule == FloorDimRule::max_dim
                       ? static_cast<double>(std::max(d1, d2))
                       : std::sqrt(static_cast<double>(d1) * static_cast<double>(d2));
  return d * r * r / std::sqrt(static_cast<double>(n_total));
}

Aggregate aggregate(const Batch& batch4, const Matrix& u_tilde, const Matrix& v_tilde,
                    int r, Eigen::Index n_total, FloorDimRule rule) {
  require_nonempty(batch4, "aggregate");
  if (u_tilde.rows() != batch4.d1 || v_tilde.rows() != batch4.d2 ||
      u_tilde.cols() != r || v_tilde.cols() != r)
    throw DimensionError("aggregate: factor shapes do not match");

  const double inv_n = 1.0 / static_cast<double>(batch4.count);
  const Matrix proj = u_tilde * v_tilde.transpose();
  const auto y = vectorized(batch4);
  // Tr(U~^T X_i V~) = <X_i, U~ V~^T>
  const Vector traces = y.transpose() * proj.reshaped();
  Matrix b = (y * traces).reshaped(batch4.d1, batch4.d2);
  b *= inv_n;
  b -= proj;

  Aggregate out;
  out.m_check = rank_r_approx(b, r);
  out.moment_branch = traces.squaredNorm() * inv_n - r;
  out.floor_value = scaling_floor(batch4.d1, batch4.d2, r, n_total, rule);
  out.floor_active = out.moment_branch < out.floor_value;
  out.lambda_hat = std::sqrt(std::max(out.moment_branch, out.floor_value));
  return out;
}

EstimateReport estimate(const SampleSet& samples, const EstimatorConfig& config) {
  if (config.rank < 1) throw DimensionError("estimator rank must be >= 1");
  if (config.rank > std::min(samples.d1, samples.d2))
    throw DimensionError("estimator rank exceeds min(d1, d2)");

  const auto batches =
      split_batches(samples, config.split, config.split_seed.value_or(samples.seed));
  const SpectralInit init = spectral_init(batches[0], batches[1]);
  Refinement ref = refine(batches[2], init.u1_hat, init.v1_hat, config.rank);
  Aggregate agg = aggregate(batches[3], ref.u_tilde, ref.v_tilde, config.rank,
                            samples.size(), config.floor_dim_rule);

  EstimateReport rep;
  rep.m_hat = agg.m_check / agg.lambda_hat;
  rep.lambda_hat = agg.lambda_hat;
  rep.u1_hat = init.u1_hat;
  rep.v1_hat = init.v1_hat;
  rep.u_tilde = std::move(ref.u_tilde);
  rep.v_tilde = std::move(ref.v_tilde);
  rep.m_check = std::move(agg.m_check);
  rep.floor_active = agg.floor_active;
  rep.floor_dim_rule = config.floor_dim_rule;
  for (int k = 0; k < 4; ++k) rep.batch_sizes[k] = batches[k].count;
  return rep;
}

}  // namespace lrmm
