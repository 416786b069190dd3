#include "lrmm/theory.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>
#include <boost/math/distributions/binomial.hpp>

#include "lrmm/error.hpp"
#include "lrmm/rng.hpp"

namespace lrmm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_binom(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// log((2k-1)!!) = log((2k)!) - k log 2 - log(k!)
double log_double_factorial_odd(std::int64_t k) {
  const double kd = static_cast<double>(k);
  return std::lgamma(2.0 * kd + 1.0) - kd * std::numbers::ln2 - std::lgamma(kd + 1.0);
}

double log_sum_exp(const std::vector<double>& xs) {
  double hi = kNegInf;
  for (double x : xs) hi = std::max(hi, x);
  if (hi == kNegInf) return kNegInf;
  if (std::isinf(hi)) return hi;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

void require_positive(std::int64_t v, const char* what) {
  if (v < 1) throw DimensionError(std::string(what) + " must be positive");
}

LowDegreeResult finish(LowDegreeResult res) {
  res.log_excess = log_sum_exp(res.terms);
  res.value = 1.0 + std::exp(res.log_excess);
  return res;
}

}  // namespace

std::string to_string(SampleRegime regime) {
  switch (regime) {
    case SampleRegime::R1: return "R1";
    case SampleRegime::R2: return "R2";
    case SampleRegime::R3: return "R3";
  }
  return "?";
}

std::string to_string(Hardness hardness) {
  switch (hardness) {
    case Hardness::impossible: return "impossible";
    case Hardness::stat_possible_comp_hard: return "stat_possible_comp_hard";
    case Hardness::poly_easy: return "poly_easy";
  }
  return "?";
}

double minimax_rate(std::int64_t n, std::int64_t d, std::int64_t r, double lambda) {
  require_positive(n, "n");
  require_positive(d, "d");
  require_positive(r, "r");
  if (!(lambda > 0.0)) throw DimensionError("lambda must be positive");
  const double dn = static_cast<double>(d) / static_cast<double>(n);
  const double rr = static_cast<double>(r);
  return std::min(std::sqrt(dn) / lambda + std::sqrt(dn * rr), lambda * std::sqrt(rr));
}

RatePoint classify(std::int64_t n, std::int64_t d, std::int64_t r, double lambda) {
  RatePoint p;
  p.n = n;
  p.d = d;
  p.r = r;
  p.lambda = lambda;
  p.rate = minimax_rate(n, d, r, lambda);
  const double nd = static_cast<double>(n);
  const double dd = static_cast<double>(d);
  const double rd = static_cast<double>(r);
  p.info_threshold = std::pow(dd, 0.25) * std::pow(rd * nd, -0.25) + std::sqrt(dd / nd);
  p.comp_threshold = std::sqrt(dd) * std::pow(nd, -0.25);
  if (lambda < p.info_threshold)
    p.hardness = Hardness::impossible;
  else if (lambda < p.comp_threshold)
    p.hardness = Hardness::stat_possible_comp_hard;
  else
    p.hardness = Hardness::poly_easy;
  const double dr = dd * rd;
  if (nd <= dr)
    p.sample_regime = SampleRegime::R1;
  else if (nd >= dr * dr)
    p.sample_regime = SampleRegime::R3;
  else
    p.sample_regime = SampleRegime::R2;
  return p;
}

MomentValue rademacher_moment(std::int64_t n, std::int64_t k) {
  require_positive(n, "n");
  if (k < 0) throw DimensionError("moment order must be nonnegative");
  MomentValue out;
  if (k == 0) {
    out.value = 1.0;
    out.log_value = 0.0;
    return out;
  }
  const double nd = static_cast<double>(n);
  const double two_k = 2.0 * static_cast<double>(k);
  // Terms j and n - j coincide and the j = n/2 term vanishes, so sum the
  // half j < n/2 and double it. On that half the log-term is concave in j.
  const std::int64_t last = (n - 1) / 2;
  auto term = [&](std::int64_t j) {
    const double jd = static_cast<double>(j);
    return log_binom(nd, jd) + two_k * std::log(nd - 2.0 * jd);
  };

  std::vector<double> logs;
  constexpr std::int64_t kFullSum = 1 << 14;
  if (last + 1 <= kFullSum) {
    logs.reserve(static_cast<std::size_t>(last + 1));
    for (std::int64_t j = 0; j <= last; ++j) logs.push_back(term(j));
  } else {
    std::int64_t lo = 0;
    std::int64_t hi = last;
    while (hi - lo > 2) {
      const std::int64_t m1 = lo + (hi - lo) / 3;
      const std::int64_t m2 = hi - (hi - lo) / 3;
      if (term(m1) < term(m2))
        lo = m1 + 1;
      else
        hi = m2 - 1;
    }
    std::int64_t peak = lo;
    for (std::int64_t j = lo + 1; j <= hi; ++j)
      if (term(j) > term(peak)) peak = j;

    // lgamma differences lose digits at this size, so the binomial weights are
    // walked outward from the central probability one ratio at a time:
    // log pmf(i) - log pmf(i + 1) = log1p((2i + 1 - n) / (n - i)).
    auto step = [&](std::int64_t i) {
      return std::log1p(static_cast<double>(2 * i + 1 - n) / static_cast<double>(n - i));
    };
    const std::int64_t mid = n / 2;
    long double log_pmf = std::log(boost::math::pdf(
        boost::math::binomial_distribution<double>(nd, 0.5), static_cast<double>(mid)));
    for (std::int64_t i = peak; i < mid; ++i) log_pmf += step(i);
    auto weighted = [&](std::int64_t j, long double lp) {
      return static_cast<double>(lp) + two_k * std::log(nd - 2.0 * static_cast<double>(j));
    };

    constexpr double kCutoff = 60.0;
    const double top = weighted(peak, log_pmf);
    logs.push_back(top);
    long double lp = log_pmf;
    for (std::int64_t j = peak - 1; j >= 0; --j) {
      lp += step(j);
      const double t = weighted(j, lp);
      if (t < top - kCutoff) break;
      logs.push_back(t);
    }
    lp = log_pmf;
    for (std::int64_t j = peak + 1; j <= last; ++j) {
      lp -= step(j - 1);
      const double t = weighted(j, lp);
      if (t < top - kCutoff) break;
      logs.push_back(t);
    }
    out.log_value = log_sum_exp(logs) + std::numbers::ln2;
    out.value = std::exp(out.log_value);
    out.overflow = std::isinf(out.value);
    return out;
  }
  out.log_value = log_sum_exp(logs) + std::numbers::ln2 - nd * std::numbers::ln2;
  out.value = std::exp(out.log_value);
  out.overflow = std::isinf(out.value);
  return out;
}

double log_tuple_count(std::int64_t n, std::int64_t k) {
  return log_binom(static_cast<double>(n + k - 1), static_cast<double>(k));
}

std::string to_string(LowDegreeMode mode) {
  switch (mode) {
    case LowDegreeMode::paper_bound: return "paper_bound";
    case LowDegreeMode::exact: return "exact";
    case LowDegreeMode::brute_force: return "brute_force";
  }
  return "?";
}

LowDegreeMode low_degree_mode_from_string(const std::string& s) {
  if (s == "bound" || s == "paper_bound") return LowDegreeMode::paper_bound;
  if (s == "exact") return LowDegreeMode::exact;
  if (s == "brute" || s == "brute_force") return LowDegreeMode::brute_force;
  throw ParseError("unknown low-degree mode '" + s + "'");
}

std::vector<double> paper_tk_log(std::int64_t n, std::int64_t d1, std::int64_t d2,
                                 double lambda, int k_max) {
  std::vector<double> out;
  const double log_lambda = lambda > 0.0 ? std::log(lambda) : kNegInf;
  const double log_dd = std::log(static_cast<double>(d1)) + std::log(static_cast<double>(d2));
  for (int k = 1; k <= k_max; ++k) {
    if (lambda == 0.0) {
      out.push_back(kNegInf);
      continue;
    }
    out.push_back(log_tuple_count(n, k) + 4.0 * k * log_lambda - k * log_dd);
  }
  return out;
}

namespace {

LowDegreeResult brute_force(LowDegreeResult res) {
  const int n = static_cast<int>(res.n);
  const int d1 = static_cast<int>(res.d1);
  const int d2 = static_cast<int>(res.d2);
  if (res.n + res.d1 + res.d2 > kBruteForceMaxBits)
    throw BruteForceTooLarge("brute force needs n + d1 + d2 <= 24");
  const int degree = res.degree;

  auto sums = [](int bits) {
    std::vector<double> out(std::size_t{1} << bits);
    for (std::uint32_t mask = 0; mask < out.size(); ++mask)
      out[mask] = bits - 2 * std::popcount(mask);
    return out;
  };
  // Entry-wise products s*s', u*u', v*v' of independent uniform sign vectors
  // are again uniform sign vectors, so enumerating them covers the prior.
  const std::vector<double> label_sums = sums(n);
  const std::vector<double> left_sums = sums(d1);
  const std::vector<double> right_sums = sums(d2);
  const double scale = res.lambda * res.lambda / (static_cast<double>(d1) * d2);

  std::vector<long double> moments(static_cast<std::size_t>(degree) + 1, 0.0L);
  std::vector<double> block(static_cast<std::size_t>(degree) + 1);
  for (double ls : label_sums) {
    for (double us : left_sums) {
      const double c = ls * scale * us;
      std::fill(block.begin(), block.end(), 0.0);
      for (double vs : right_sums) {
        const double x = c * vs;
        double p = 1.0;
        for (int j = 1; j <= degree; ++j) {
          p *= x;
          block[j] += p;
        }
      }
      for (int j = 1; j <= degree; ++j) moments[j] += block[j];
    }
  }
  const long double configs = std::ldexp(1.0L, n + d1 + d2);
  long double total = 0.0L;
  long double factorial = 1.0L;
  for (int j = 1; j <= degree; ++j) {
    factorial *= j;
    const long double contribution = moments[j] / configs / factorial;
    total += contribution;
    if (j % 2 == 0)
      res.terms.push_back(contribution > 0 ? static_cast<double>(std::log(contribution))
                                           : kNegInf);
  }
  res.value = static_cast<double>(1.0L + total);
  res.log_excess = total > 0 ? static_cast<double>(std::log(total)) : kNegInf;
  return res;
}

}  // namespace

LowDegreeResult lowdeg_norm(std::int64_t n, std::int64_t d1, std::int64_t d2,
                            double lambda, int degree, LowDegreeMode mode) {
  require_positive(n, "n");
  require_positive(d1, "d1");
  require_positive(d2, "d2");
  if (degree < 1) throw DimensionError("degree must be >= 1");
  if (!(lambda >= 0.0)) throw DimensionError("lambda must be nonnegative");

  LowDegreeResult res;
  res.n = n;
  res.d1 = d1;
  res.d2 = d2;
  res.lambda = lambda;
  res.degree = degree;
  res.mode = mode;
  const int half = degree / 2;

  if (mode == LowDegreeMode::brute_force) {
    if (n + d1 + d2 > kBruteForceMaxBits)
      throw BruteForceTooLarge("brute force needs n + d1 + d2 <= 24");
    if (lambda == 0.0) {
      res.terms.assign(static_cast<std::size_t>(half), kNegInf);
      res.value = 1.0;
      res.log_excess = kNegInf;
      return res;
    }
    return brute_force(std::move(res));
  }

  if (lambda == 0.0) {
    res.terms.assign(static_cast<std::size_t>(half), kNegInf);
    return finish(std::move(res));
  }

  if (mode == LowDegreeMode::paper_bound) {
    // c_k / c_{k-1} = (2k-1)(n+k-1) lambda^4 / (2k * k * d1 d2), evaluated
    // directly so that small cases come out exact. Falls back to log space if
    // a term leaves the long double range.
    const long double l4 = static_cast<long double>(lambda) * lambda * lambda * lambda;
    long double term = 1.0L, total = 0.0L;
    bool representable = true;
    for (int k = 1; k <= half && representable; ++k) {
      const long double num = (2.0L * k - 1) * (static_cast<long double>(n) + k - 1) * l4;
      const long double den = 2.0L * k * k * static_cast<long double>(d1) * d2;
      term = term * num / den;
      representable = std::isfinite(term) && term > 0.0L;
      res.terms.push_back(static_cast<double>(std::log(term)));
      total += term;
    }
    if (representable) {
      res.value = static_cast<double>(1.0L + total);
      res.log_excess = static_cast<double>(std::log(total));
      return res;
    }
    res.terms.clear();
  }

  const double log_lambda = std::log(lambda);
  const double log_dd = std::log(static_cast<double>(d1)) + std::log(static_cast<double>(d2));
  for (int k = 1; k <= half; ++k) {
    const double log_fact = std::lgamma(2.0 * k + 1.0);
    double t = 0.0;
    if (mode == LowDegreeMode::paper_bound) {
      t = 2.0 * log_double_factorial_odd(k) - log_fact + log_tuple_count(n, k) +
          4.0 * k * log_lambda - k * log_dd;
    } else {
      t = rademacher_moment(n, k).log_value + rademacher_moment(d1, k).log_value +
          rademacher_moment(d2, k).log_value + 4.0 * k * log_lambda -
          2.0 * k * log_dd - log_fact;
    }
    res.terms.push_back(t);
  }
  return finish(std::move(res));
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw InsufficientPoints("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

TraceConcentration trace_concentration_mc(int r, int n, int reps, std::uint64_t seed) {
  if (r < 1 || n < 1) throw DimensionError("trace concentration needs r, n >= 1");
  if (reps < 30) throw DimensionError("trace concentration needs reps >= 30");
  TraceConcentration out;
  out.values.reserve(static_cast<std::size_t>(reps));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int rep = 0; rep < reps; ++rep) {
    Engine eng = make_engine(derive_seed(seed, 0, static_cast<std::uint64_t>(rep)));
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(r, r);
    Eigen::MatrixXd z(r, r);
    for (int i = 0; i < n; ++i) {
      for (Eigen::Index e = 0; e < z.size(); ++e) z.data()[e] = normal(eng);
      acc.noalias() += z.trace() * z;
    }
    acc /= static_cast<double>(n);
    acc -= Eigen::MatrixXd::Identity(r, r);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(acc);
    out.values.push_back(svd.singularValues()[0]);
  }
  out.median = quantile(out.values, 0.5);
  out.q90 = quantile(out.values, 0.9);
  return out;
}

}  // namespace lrmm
