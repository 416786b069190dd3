// Acceptance suite: one PASS/FAIL line per criterion, tolerances and runtime
// limits pinned below. Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lrmm/estimator.hpp"
#include "lrmm/harness.hpp"
#include "lrmm/likelihood.hpp"
#include "lrmm/model.hpp"
#include "lrmm/rng.hpp"
#include "lrmm/theory.hpp"

using namespace lrmm;

namespace {

constexpr int kTrendReps = 25;
constexpr std::uint64_t kSeed = 1;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  double limit_s;  // <= 0: no runtime limit
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

// Mean loss per grid point, in grid order.
struct PointStats {
  GridPoint point;
  double mean = 0.0;
  double se = 0.0;
  int errors = 0;
};

std::vector<PointStats> point_stats(const SweepSpec& spec, const std::vector<SweepRow>& rows) {
  const auto grid = expand_grid(spec);
  std::vector<PointStats> out(grid.size());
  std::vector<std::vector<double>> losses(grid.size());
  for (const auto& r : rows) {
    if (r.error.empty())
      losses[r.point_index].push_back(r.loss);
    else
      ++out[r.point_index].errors;
  }
  for (std::size_t p = 0; p < grid.size(); ++p) {
    out[p].point = grid[p];
    const auto& v = losses[p];
    if (v.empty()) {
      out[p].mean = std::nan("");
      continue;
    }
    double sum = 0;
    for (double x : v) sum += x;
    const double mean = sum / v.size();
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    out[p].mean = mean;
    out[p].se = v.size() > 1 ? std::sqrt(ss / (v.size() - 1) / v.size()) : 0.0;
  }
  return out;
}

std::vector<PointStats> run_preset(SweepSpec spec) {
  spec.reps = kTrendReps;
  return point_stats(spec, run_sweep(spec, {workers(), false}));
}

int total_errors(const std::vector<PointStats>& s) {
  int e = 0;
  for (const auto& p : s) e += p.errors;
  return e;
}

std::string join_means(const std::vector<PointStats>& s) {
  std::string out;
  for (const auto& p : s) out += (out.empty() ? "" : " ") + fmt("%.4f", p.mean);
  return out;
}

// ---------------------------------------------------------------------------

Outcome noiseless_identity() {
  constexpr double kTol = 1e-8;
  Outcome o{true, ""};
  for (double lambda : {2.0, 5.0, 10.0}) {
    const auto sig = make_signal(20, 20, 1, lambda, kDefaultCondition, derive_seed(kSeed, 0, 0));
    const auto s = sample_lrmm(sig, 40, 0.0, derive_seed(kSeed, 0, 1));
    const auto rep = estimate(s, EstimatorConfig{});
    const double got = loss(rep.m_hat, sig.m);
    const double want = lambda - std::sqrt(lambda * lambda - 1);
    const bool ok = std::abs(got - want) <= kTol;
    o.pass = o.pass && ok;
    o.detail += fmt("lambda=%g", lambda) + fmt(": loss=%.10f", got) + fmt(" want=%.10f", want) +
                (rep.floor_active ? " (floor active)" : "") + (ok ? "" : " MISMATCH") + "; ";
  }
  return o;
}

Outcome exp1_flat() {
  constexpr double kMaxCv = 0.2;
  const auto s = run_preset(preset("exp1"));
  std::vector<double> means;
  for (const auto& p : s) means.push_back(p.mean);
  const double cv = coefficient_of_variation(means);
  return {cv <= kMaxCv && total_errors(s) == 0,
          "CV=" + fmt("%.4f", cv) + " (<= 0.2), means: " + join_means(s)};
}

Outcome exp3_phase() {
  constexpr double kMaxPlateauChange = 0.15;
  const auto s = run_preset(preset("exp3"));
  bool monotone = true;
  std::string pairs;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const double rise = s[i + 1].mean - s[i].mean;
    const double pooled = std::sqrt(s[i].se * s[i].se + s[i + 1].se * s[i + 1].se);
    if (rise > pooled) {
      monotone = false;
      pairs += " (points " + std::to_string(i) + "->" + std::to_string(i + 1) +
               fmt(": rise %.4f", rise) + fmt(" > se %.4f)", pooled);
    }
  }
  const std::size_t k = s.size();
  const double top_max = std::max({s[k - 1].mean, s[k - 2].mean, s[k - 3].mean});
  const double top_min = std::min({s[k - 1].mean, s[k - 2].mean, s[k - 3].mean});
  const double change = (top_max - top_min) / top_min;
  const bool plateau = change <= kMaxPlateauChange;
  return {monotone && plateau && total_errors(s) == 0,
          std::string("nonincreasing within pooled SE: ") + (monotone ? "yes" : "no") + pairs +
              "; top-3 relative change " + fmt("%.4f", change) + " (<= 0.15); means: " +
              join_means(s)};
}

Outcome exp4_linear() {
  constexpr double kMinR2 = 0.9;
  const auto s = run_preset(preset("exp4"));
  std::map<int, std::pair<std::vector<double>, std::vector<double>>> curves;
  for (const auto& p : s) {
    curves[p.point.d1].first.push_back(1.0 / std::sqrt(static_cast<double>(p.point.n)));
    curves[p.point.d1].second.push_back(p.mean);
  }
  const double r2 = linear_fit(curves[100].first, curves[100].second).r_squared;
  const double r2_200 = linear_fit(curves[200].first, curves[200].second).r_squared;
  return {r2 >= kMinR2 && total_errors(s) == 0,
          "R^2(d=100)=" + fmt("%.5f", r2) + " (>= 0.9); R^2(d=200)=" + fmt("%.5f", r2_200)};
}

Outcome exp5_linear() {
  constexpr double kMinR2 = 0.9;
  SweepSpec spec = preset("exp5");
  spec.n = {100};
  const auto s = run_preset(spec);
  std::vector<double> x, y;
  for (const auto& p : s) {
    x.push_back(std::sqrt(static_cast<double>(p.point.d1)));
    y.push_back(p.mean);
  }
  const double r2 = linear_fit(x, y).r_squared;
  return {r2 >= kMinR2 && total_errors(s) == 0,
          "R^2(n=100)=" + fmt("%.5f", r2) + " (>= 0.9); means: " + join_means(s)};
}

Outcome exp6_rank() {
  constexpr double kMinSpearman = 0.9;
  constexpr double kMaxCv = 0.3;
  const auto s = run_preset(preset("exp6"));
  std::vector<double> r_fixed, loss_fixed, loss_scaled;
  for (const auto& p : s) {
    if (p.point.lambda == 5.0) {
      r_fixed.push_back(p.point.r);
      loss_fixed.push_back(p.mean);
    } else {
      loss_scaled.push_back(p.mean);
    }
  }
  const double rho = spearman(r_fixed, loss_fixed);
  const double cv = coefficient_of_variation(loss_scaled);
  return {rho >= kMinSpearman && cv <= kMaxCv && total_errors(s) == 0,
          "Spearman(lambda=5)=" + fmt("%.4f", rho) + " (>= 0.9); CV(scaled lambda)=" +
              fmt("%.4f", cv) + " (<= 0.3)"};
}

Outcome oracle_comparison() {
  constexpr double kMaxRatio = 3.0;
  constexpr int kReps = 50;
  const int d = 100, r = 2, n = 500;
  const double lambda = 10 * std::sqrt(d) * std::pow(n, -0.25);
  const auto sig = make_signal(d, d, r, lambda, kDefaultCondition, derive_seed(kSeed, 0, 0));
  EstimatorConfig cfg;
  cfg.rank = r;
  double est = 0, oracle = 0;
  for (int rep = 1; rep <= kReps; ++rep) {
    const auto s = sample_lrmm(sig, n, 1.0, derive_seed(kSeed, 0, rep));
    est += loss(estimate(s, cfg).m_hat, sig.m);
    oracle += loss(known_label_oracle(s, r), sig.m);
  }
  est /= kReps;
  oracle /= kReps;
  return {est <= kMaxRatio * oracle,
          "mean loss " + fmt("%.4f", est) + " vs oracle " + fmt("%.4f", oracle) + ", ratio " +
              fmt("%.3f", est / oracle) + " (<= 3)"};
}

Outcome lowdeg_brute_force() {
  constexpr double kTol = 1e-10;
  int checked = 0, bad = 0;
  double worst = 0;
  for (int n = 1; n <= 18; ++n)
    for (int d1 = 1; n + d1 <= 19; ++d1)
      for (int d2 = 1; n + d1 + d2 <= 20; ++d2) {
        for (int degree = 1; degree <= 6; ++degree) {
          for (double lambda : {0.5, 1.0, 2.0}) {
            const double e = lowdeg_norm(n, d1, d2, lambda, degree, LowDegreeMode::exact).value;
            const double b =
                lowdeg_norm(n, d1, d2, lambda, degree, LowDegreeMode::brute_force).value;
            const double rel = std::abs(e - b) / std::max(1.0, std::abs(e));
            worst = std::max(worst, rel);
            if (rel > kTol) ++bad;
            ++checked;
          }
          for (auto mode : {LowDegreeMode::exact, LowDegreeMode::brute_force})
            if (lowdeg_norm(n, d1, d2, 0.0, degree, mode).value != 1.0) ++bad;
        }
      }
  return {bad == 0, std::to_string(checked) + " comparisons, worst relative gap " +
                        fmt("%.2e", worst) + " (<= 1e-10), lambda=0 gives 1: " +
                        (bad == 0 ? "yes" : std::to_string(bad) + " failures")};
}

Outcome paper_bound_sanity() {
  constexpr double kMaxRatio = 0.5;
  constexpr double kRoundingSlack = 1e-12;
  const double v = lowdeg_norm(100, 10, 10, 1.0, 2, LowDegreeMode::paper_bound).value;
  double worst = 0;
  int cases = 0;
  for (std::int64_t n : {1, 10, 100, 1000, 100000})
    for (std::int64_t d : {2, 10, 50, 300})
      for (double frac : {0.01, 0.1, 0.25, 0.5}) {
        const double lambda = std::pow(frac * d * d / static_cast<double>(n), 0.25);
        const auto t = paper_tk_log(n, d, d, lambda, 40);
        for (std::size_t k = 0; k + 1 < t.size(); ++k) worst = std::max(worst, std::exp(t[k + 1] - t[k]));
        ++cases;
      }
  return {v == 1.5 && worst <= kMaxRatio * (1 + kRoundingSlack),
          "bound(n=100,d=10,lambda=1,D=2)=" + fmt("%.17g", v) + " (== 1.5); max T_{k+1}/T_k " +
              fmt("%.17g", worst) + " over " + std::to_string(cases) +
              " settings with lambda^4 n/d^2 <= 0.5 (<= 0.5, relative rounding slack 1e-12)"};
}

double mixture_pdf(double x, double m) {
  const double c = 0.5 / std::sqrt(2.0 * M_PI);
  return c * (std::exp(-0.5 * (x - m) * (x - m)) + std::exp(-0.5 * (x + m) * (x + m)));
}

template <class F>
double quad(F f) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -30.0, 30.0, 15, 1e-13);
}

Outcome density_correctness() {
  constexpr double kMassTol = 1e-8;
  constexpr double kSigmas = 3.0;
  constexpr int kDraws = 50000;
  Outcome o{true, ""};
  for (double m : {0.0, 1.0, 5.0}) {
    const Matrix mm = Matrix::Constant(1, 1, m);
    const double mass = quad([&](double x) { return std::exp(log_density(mm, Matrix::Constant(1, 1, x))); });
    const bool ok = std::abs(mass - 1) <= kMassTol;
    o.pass = o.pass && ok;
    o.detail += fmt("mass(m=%g)", m) + fmt("=%.12f; ", mass);
  }
  const std::pair<double, double> pairs[] = {{0.0, 0.5}, {1.0, 0.0}, {1.0, 2.0}};
  std::uint64_t seed = 100;
  for (auto [a, b] : pairs) {
    const double h_ref = 1 - quad([&](double x) { return std::sqrt(mixture_pdf(x, a) * mixture_pdf(x, b)); });
    const double kl_ref = quad([&](double x) {
      const double p = mixture_pdf(x, a);
      return p > 0 ? p * std::log(p / mixture_pdf(x, b)) : 0.0;
    });
    const auto h = hellinger_mc(Matrix::Constant(1, 1, a), Matrix::Constant(1, 1, b), kDraws, seed++);
    const auto kl = kl_mc(Matrix::Constant(1, 1, a), Matrix::Constant(1, 1, b), kDraws, seed++);
    const double zh = std::abs(h.estimate - h_ref) / h.std_error;
    const double zk = std::abs(kl.estimate - kl_ref) / kl.std_error;
    o.pass = o.pass && zh <= kSigmas && zk <= kSigmas;
    o.detail += fmt("(%g,", a) + fmt("%g): ", b) + fmt("H z=%.2f ", zh) + fmt("KL z=%.2f; ", zk);
  }
  return o;
}

Outcome divergence_lower_bound_audits() {
  constexpr int kPairs = 50;
  constexpr int kDraws = 200000;
  Engine eng = make_engine(derive_seed(kSeed, 11, 0));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto random_direction = [&](int d1, int d2) {
    Matrix g = gaussian_matrix(d1, d2, eng);
    return Matrix(g / g.norm());
  };

  double c1 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kPairs; ++i) {
    const double total = 0.5 * unif(eng);
    const double split = unif(eng);
    const Matrix m = split * total * random_direction(2, 2);
    const Matrix m1 = (1 - split) * total * random_direction(2, 2);
    const double l = loss(m1, m);
    const auto h = hellinger_mc(m1, m, kDraws, derive_seed(kSeed, 12, i));
    c1 = std::min(c1, h.estimate / ((m.norm() + m1.norm()) * l));
  }

  double c0 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kPairs; ++i) {
    const Matrix m = (3 + 2 * unif(eng)) * random_direction(2, 2);
    Matrix m1;
    do {
      m1 = 5 * unif(eng) * random_direction(2, 2);
    } while (loss(m, m1) < 3);
    const double l = loss(m, m1);
    const auto kl = kl_mc(m, m1, kDraws / 10, derive_seed(kSeed, 13, i));
    c0 = std::min(c0, kl.estimate / (l * l));
  }
  return {c1 > 0 && c0 > 0, "Hellinger panel fitted c1=" + fmt("%.4g", c1) +
                                ", KL panel fitted c0=" + fmt("%.4g", c0) + " (both > 0)"};
}

Outcome em_sanity() {
  constexpr int kInstances = 20;
  int monotone_violations = 0;
  for (int i = 0; i < kInstances; ++i) {
    const auto sig = make_signal(3, 3, 1, 1.0 + 0.2 * i, kDefaultCondition, derive_seed(kSeed, 20, i));
    const auto s = sample_lrmm(sig, 80, 1.0, derive_seed(kSeed, 21, i));
    Engine eng = make_engine(derive_seed(kSeed, 22, i));
    const auto res = em_mle(s, 3, gaussian_matrix(3, 3, eng), {300, 1e-10});
    for (std::size_t t = 1; t < res.trace.size(); ++t)
      if (res.trace[t] > res.trace[t - 1] + 1e-10 * std::abs(res.trace[t - 1])) ++monotone_violations;
  }

  std::vector<double> lambdas;
  for (int k = 1; k <= 24; ++k) lambdas.push_back(0.25 * k);
  constexpr int kAngles = 36;
  int grid_worse = 0, em_from_grid_worse = 0;
  for (int i = 0; i < kInstances; ++i) {
    const auto sig = make_signal(2, 2, 1, 1.5 + 0.2 * i, kDefaultCondition, derive_seed(kSeed, 23, i));
    const auto s = sample_lrmm(sig, 150, 1.0, derive_seed(kSeed, 24, i));
    const auto grid = grid_mle(s, lambdas, kAngles);
    EstimatorConfig cfg;
    const auto em = em_mle(s, 1, estimate(s, cfg).m_hat);
    const Matrix snapped = nearest_grid_point(em.m_hat, lambdas, kAngles);
    if (grid.neg_log_lik > neg_log_lik(s, snapped) + 1e-9) ++grid_worse;
    if (em_mle(s, 1, grid.m_hat).neg_log_lik > grid.neg_log_lik + 1e-9) ++em_from_grid_worse;
  }
  return {monotone_violations == 0 && grid_worse == 0 && em_from_grid_worse == 0,
          "full-rank EM likelihood decreases: " + std::to_string(monotone_violations) +
              "; grid winner worse than EM snapped to grid: " + std::to_string(grid_worse) +
              "; EM from grid winner lowers likelihood: " + std::to_string(em_from_grid_worse) +
              " (all must be 0)"};
}

Outcome determinism() {
  constexpr int kReps = 2;
  std::string detail;
  bool ok = true;
  for (const auto& name : preset_names()) {
    SweepSpec spec = preset(name);
    spec.reps = kReps;
    const std::string a = sweep_csv(run_sweep(spec, {1, false}));
    const std::string b = sweep_csv(run_sweep(spec, {3, false}));
    const bool same = a == b;
    ok = ok && same;
    detail += name + (same ? "=identical " : "=DIFFERENT ");
  }
  return {ok, detail + "(workers 1 vs 3, " + std::to_string(kReps) + " reps)"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"noiseless_pipeline_identity", 1, noiseless_identity},
      {"exp1_flat_in_lambda", 600, exp1_flat},
      {"exp3_phase_shape", 300, exp3_phase},
      {"exp4_linear_in_inv_sqrt_n", 600, exp4_linear},
      {"exp5_linear_in_sqrt_d", 600, exp5_linear},
      {"exp6_rank_dependence", 900, exp6_rank},
      {"known_label_oracle_comparison", 0, oracle_comparison},
      {"lowdeg_exact_equals_brute_force", 60, lowdeg_brute_force},
      {"lowdeg_paper_bound_sanity", 1, paper_bound_sanity},
      {"density_and_divergence_oracles", 60, density_correctness},
      {"hellinger_kl_lower_bound_audits", 300, divergence_lower_bound_audits},
      {"em_and_grid_mle_sanity", 120, em_sanity},
      {"sweep_determinism", 0, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.limit_s <= 0 || secs < c.limit_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::string timing = fmt("%.2fs", secs);
    if (c.limit_s > 0) timing += fmt(" < %gs", c.limit_s) + (in_time ? "" : " EXCEEDED");
    std::printf("%s %-34s [%s] %s\n", pass ? "PASS" : "FAIL", c.name.c_str(), timing.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
