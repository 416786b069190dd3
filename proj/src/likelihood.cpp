#include "lrmm/likelihood.hpp"

#include <cmath>
#include <numbers>

#include "lrmm/error.hpp"
#include "lrmm/rng.hpp"

namespace lrmm {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError(std::string(what) + ": dimension mismatch");
}

Eigen::Map<const Matrix> vectorized(const SampleSet& s) {
  return Eigen::Map<const Matrix>(s.stacked.data(), s.d1 * s.d2, s.size());
}

// log p_{m2}(x) - log p_{m1}(x) given the inner products t1 = <x, m1>,
// t2 = <x, m2>; the Gaussian parts in x cancel.
double log_ratio(double t1, double t2, double sq1, double sq2) {
  return -0.5 * (sq2 - sq1) + logcosh(t2) - logcosh(t1);
}

template <typename Integrand>
McEstimate monte_carlo(const Matrix& m1, const Matrix& m2, int draws,
                       std::uint64_t seed, Integrand&& f) {
  require_same_shape(m1, m2, "monte carlo divergence");
  if (draws < 100) throw DimensionError("monte carlo divergence needs draws >= 100");
  Engine eng = make_engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  // All three inner products share one summation order so that m2 = +-m1
  // gives a log-ratio of exactly zero.
  const double sq1 = (m1.array() * m1.array()).sum();
  const double sq2 = (m2.array() * m2.array()).sum();
  // <x, m> for x = s m1 + z only needs <z, m1> and <z, m2>.
  const double cross = (m1.array() * m2.array()).sum();
  double mean = 0.0;
  double m2acc = 0.0;
  for (int k = 0; k < draws; ++k) {
    const double s = rademacher(eng);
    double z1 = 0.0;
    double z2 = 0.0;
    const double* a = m1.data();
    const double* b = m2.data();
    for (Eigen::Index i = 0; i < m1.size(); ++i) {
      const double z = normal(eng);
      z1 += z * a[i];
      z2 += z * b[i];
    }
    const double t1 = s * sq1 + z1;
    const double t2 = s * cross + z2;
    const double v = f(log_ratio(t1, t2, sq1, sq2));
    // Welford update
    const double delta = v - mean;
    mean += delta / (k + 1);
    m2acc += delta * (v - mean);
  }
  const double var = m2acc / (draws - 1);
  return {mean, std::sqrt(var / draws)};
}

}  // namespace

double logcosh(double t) {
  const double a = std::abs(t);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

double log_density(const Matrix& m, const Matrix& x) {
  require_same_shape(m, x, "log_density");
  const double dim = static_cast<double>(x.size());
  const double t = (m.array() * x.array()).sum();
  return -0.5 * dim * std::log(2.0 * std::numbers::pi) - 0.5 * x.squaredNorm() -
         0.5 * m.squaredNorm() + logcosh(t);
}

double neg_log_lik(const SampleSet& samples, const Matrix& m) {
  if (m.rows() != samples.d1 || m.cols() != samples.d2)
    throw DimensionError("neg_log_lik: dimension mismatch");
  const auto y = vectorized(samples);
  const Vector t = y.transpose() * m.reshaped();
  const double n = static_cast<double>(samples.size());
  const double dim = static_cast<double>(samples.d1 * samples.d2);
  double total = -0.5 * n * dim * std::log(2.0 * std::numbers::pi) -
                 0.5 * samples.stacked.squaredNorm() - 0.5 * n * m.squaredNorm();
  for (Eigen::Index i = 0; i < t.size(); ++i) total += logcosh(t[i]);
  return -total;
}

std::string to_string(MleMethod method) {
  return method == MleMethod::em ? "em" : "grid";
}

MleResult em_mle(const SampleSet& samples, int r, const Matrix& init,
                 const EmOptions& opts) {
  if (init.rows() != samples.d1 || init.cols() != samples.d2)
    throw DimensionError("em_mle: init does not match the observations");
  if (opts.max_iter < 1) throw DimensionError("em_mle: max_iter must be >= 1");
  if (!(opts.tol > 0.0)) throw DimensionError("em_mle: tol must be positive");
  if (samples.size() < 1) throw TooFewSamples("em_mle: empty sample set");

  const auto y = vectorized(samples);
  const double inv_n = 1.0 / static_cast<double>(samples.size());

  MleResult out;
  out.method = MleMethod::em;
  Matrix current = init;
  out.trace.push_back(neg_log_lik(samples, current));
  for (int it = 1; it <= opts.max_iter; ++it) {
    Vector w = y.transpose() * current.reshaped();
    w = w.array().tanh();
    Matrix next = (y * w).reshaped(samples.d1, samples.d2);
    next *= inv_n;
    if (!next.allFinite()) throw NonFinite("em_mle: iterate overflowed");
    next = project_rank(next, r);
    const double step = (next - current).norm();
    current = std::move(next);
    out.iterations = it;
    out.trace.push_back(neg_log_lik(samples, current));
    if (step <= opts.tol) {
      out.converged = true;
      break;
    }
  }
  out.neg_log_lik = out.trace.back();
  out.m_hat = std::move(current);
  return out;
}

Matrix grid_matrix(double lambda, double alpha, double beta) {
  Vector u(2), v(2);
  u << std::cos(alpha), std::sin(alpha);
  v << std::cos(beta), std::sin(beta);
  return lambda * u * v.transpose();
}

std::vector<double> grid_angles(int steps) {
  if (steps < 1) throw DimensionError("grid: angle_steps must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(steps));
  for (int j = 0; j < steps; ++j) out[j] = std::numbers::pi * j / steps;
  return out;
}

MleResult grid_mle(const SampleSet& samples, const std::vector<double>& lambda_grid,
                   int angle_steps) {
  if (samples.d1 != 2 || samples.d2 != 2)
    throw DimensionError("grid_mle is only defined for 2x2 observations");
  if (lambda_grid.empty()) throw DimensionError("grid_mle: empty lambda grid");
  const auto angles = grid_angles(angle_steps);

  MleResult out;
  out.method = MleMethod::grid;
  out.converged = true;
  bool first = true;
  for (double lam : lambda_grid)
    for (double a : angles)
      for (double b : angles) {
        const Matrix m = grid_matrix(lam, a, b);
        const double nll = neg_log_lik(samples, m);
        ++out.iterations;
        if (first || nll < out.neg_log_lik) {
          out.neg_log_lik = nll;
          out.m_hat = m;
          first = false;
        }
      }
  out.trace = {out.neg_log_lik};
  return out;
}

Matrix nearest_grid_point(const Matrix& m, const std::vector<double>& lambda_grid,
                          int angle_steps) {
  if (m.rows() != 2 || m.cols() != 2)
    throw DimensionError("nearest_grid_point: 2x2 only");
  if (lambda_grid.empty()) throw DimensionError("nearest_grid_point: empty grid");
  const auto angles = grid_angles(angle_steps);
  Matrix best;
  double best_loss = 0.0;
  for (double lam : lambda_grid)
    for (double a : angles)
      for (double b : angles) {
        Matrix g = grid_matrix(lam, a, b);
        const double l = loss(g, m);
        if (best.size() == 0 || l < best_loss) {
          best_loss = l;
          best = std::move(g);
        }
      }
  return best;
}

McEstimate hellinger_mc(const Matrix& m1, const Matrix& m2, int draws,
                        std::uint64_t seed) {
  return monte_carlo(m1, m2, draws, seed, [](double lr) {
    const double gap = 1.0 - std::exp(0.5 * lr);
    return 0.5 * gap * gap;
  });
}

McEstimate kl_mc(const Matrix& m1, const Matrix& m2, int draws, std::uint64_t seed) {
  return monte_carlo(m1, m2, draws, seed, [](double lr) { return -lr; });
}

}  // namespace lrmm
