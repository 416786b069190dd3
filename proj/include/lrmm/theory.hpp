#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lrmm {

/// Order-of-magnitude quantities with unit constants throughout.
enum class SampleRegime { R1, R2, R3 };
enum class Hardness { impossible, stat_possible_comp_hard, poly_easy };

std::string to_string(SampleRegime regime);
std::string to_string(Hardness hardness);

struct RatePoint {
  std::int64_t n = 0;
  std::int64_t d = 0;
  std::int64_t r = 0;
  double lambda = 0.0;
  double rate = 0.0;
  double info_threshold = 0.0;
  double comp_threshold = 0.0;
  SampleRegime sample_regime = SampleRegime::R1;
  Hardness hardness = Hardness::impossible;
};

/// min((1/lambda) sqrt(d/n) + sqrt(d r / n), lambda sqrt(r)).
double minimax_rate(std::int64_t n, std::int64_t d, std::int64_t r, double lambda);

/// info threshold d^{1/4} (r n)^{-1/4} + (d/n)^{1/2}; computational threshold
/// d^{1/2} n^{-1/4}; regimes split at n = d r and n = (d r)^2.
RatePoint classify(std::int64_t n, std::int64_t d, std::int64_t r, double lambda);

struct MomentValue {
  double value = 0.0;      // +inf when not representable
  double log_value = 0.0;  // natural log of the moment
  bool overflow = false;
};

/// E[(U_1 + ... + U_n)^{2k}] for i.i.d. Rademacher U_i, i.e.
/// 2^{-n} sum_j C(n, j) (n - 2j)^{2k}, accumulated in log space.
MomentValue rademacher_moment(std::int64_t n, std::int64_t k);

/// log C(n + k - 1, k): the tuple count the bound substitutes for the moment.
double log_tuple_count(std::int64_t n, std::int64_t k);

enum class LowDegreeMode { paper_bound, exact, brute_force };
std::string to_string(LowDegreeMode mode);
LowDegreeMode low_degree_mode_from_string(const std::string& s);

struct LowDegreeResult {
  std::int64_t n = 0;
  std::int64_t d1 = 0;
  std::int64_t d2 = 0;
  double lambda = 0.0;
  int degree = 0;
  double value = 1.0;
  /// log(value - 1); -inf when value == 1.
  double log_excess = 0.0;
  LowDegreeMode mode = LowDegreeMode::exact;
  /// log of the degree-2k contribution, k = 1 .. floor(D/2).
  std::vector<double> terms;
};

/// Largest n + d1 + d2 accepted by the brute-force mode.
inline constexpr int kBruteForceMaxBits = 24;

/// Squared norm of the degree-<=D projection of the likelihood ratio for the
/// Rademacher rank-one prior.
///
///  paper_bound: 1 + sum_k ((2k-1)!!)^2/(2k)! C(n+k-1,k) lambda^{4k}/(d1 d2)^k
///  exact:       1 + sum_k E<s,s'>^{2k} E<M,M'>^{2k} / (2k)!
///  brute_force: 1 + sum_{j=1..D} E[(<s,s'><M,M'>)^j] / j!, the expectation
///               taken by enumerating every sign pattern of s*s', u*u', v*v'.
LowDegreeResult lowdeg_norm(std::int64_t n, std::int64_t d1, std::int64_t d2,
                            double lambda, int degree, LowDegreeMode mode);

/// log T_k = log C(n+k-1, k) + 4k log lambda - k log(d1 d2), k = 1 .. k_max.
std::vector<double> paper_tk_log(std::int64_t n, std::int64_t d1, std::int64_t d2,
                                 double lambda, int k_max);

struct TraceConcentration {
  double median = 0.0;
  double q90 = 0.0;
  std::vector<double> values;
};

/// Empirical distribution of ||(1/n) sum Tr(Z_i) Z_i - I_r||_op for r x r
/// standard Gaussian Z_i. Replicate k uses derive_seed(seed, 0, k).
TraceConcentration trace_concentration_mc(int r, int n, int reps, std::uint64_t seed);

/// Linear-interpolation quantile of unsorted data, q in [0, 1].
double quantile(std::vector<double> values, double q);

}  // namespace lrmm
