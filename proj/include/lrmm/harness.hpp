#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lrmm/theory.hpp"

namespace lrmm {

/// lambda = m * sqrt(d) * n^{-1/4} for m equally spaced in [from, to].
struct ScaledLambda {
  double from = 3.0;
  double to = 10.0;
  int count = 8;
};

/// Per grid point the lambda axis is: scaled multipliers (if any), then the
/// explicit multipliers, then the absolute values.
struct LambdaRule {
  std::optional<ScaledLambda> scaled;
  std::vector<double> multipliers;
  std::vector<double> values;

  std::vector<double> expand(std::int64_t d, std::int64_t n) const;
};

struct SweepSpec {
  std::string name;
  std::vector<int> d1;
  std::vector<int> d2;  // empty: square, otherwise paired with d1 by index
  std::vector<int> r;
  std::vector<int> n;
  LambdaRule lambda;
  int reps = 100;
  std::uint64_t master_seed = 1;
  bool split = false;
  double noise_scale = 1.0;
  double condition = 1.5;
};

struct GridPoint {
  int n = 0;
  int d1 = 0;
  int d2 = 0;
  int r = 0;
  double lambda = 0.0;
};

/// Points in (d, n, r, lambda) order.
std::vector<GridPoint> expand_grid(const SweepSpec& spec);

/// exp1 .. exp6 with the published parameter sets; reps default to 100.
SweepSpec preset(const std::string& name);
std::vector<std::string> preset_names();

nlohmann::json to_json(const SweepSpec& spec);
SweepSpec sweep_spec_from_json(const nlohmann::json& j);

struct SweepRow {
  std::string experiment;
  int rep = 0;  // 1-based; index 0 seeds the grid point's signal
  std::uint64_t seed = 0;
  std::size_t point_index = 0;
  int n = 0;
  int d1 = 0;
  int d2 = 0;
  int r = 0;
  double lambda = 0.0;
  double loss = 0.0;
  double lambda_hat = 0.0;
  bool floor_active = false;
  std::int64_t elapsed_ms = 0;
  std::string error;
  std::uint64_t signal_hash = 0;  // not serialized
};

struct SweepOptions {
  int workers = 1;
  /// Wall-clock timings make CSVs run-dependent, so they are opt-in.
  bool record_timing = false;
};

/// Every grid point draws one signal from derive_seed(master, point, 0) and
/// reuses it for reps 1..reps, each of which samples fresh labels and noise
/// from derive_seed(master, point, rep). Rows come back in (point, rep) order
/// whatever the worker count. Estimator failures are reported per row.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, const SweepOptions& options = {});

inline constexpr const char* kSweepCsvHeader =
    "experiment,rep,seed,n,d1,d2,r,lambda,loss,lambda_hat,floor_active,elapsed_ms,error";

std::string sweep_csv(const std::vector<SweepRow>& rows);
std::vector<SweepRow> parse_sweep_csv(const std::string& text);

/// FNV-1a over the raw bytes of a matrix.
std::uint64_t matrix_hash(const double* data, std::size_t count);

enum class Regressor { inv_lambda, inv_sqrt_n, sqrt_d, sqrt_r };
std::string to_string(Regressor reg);
Regressor regressor_from_string(const std::string& s);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares. Constant y yields slope 0 and R^2 0; fewer than two
/// distinct x values raise InsufficientPoints.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

struct PointSummary {
  std::string experiment;
  int n = 0;
  int d1 = 0;
  int d2 = 0;
  int r = 0;
  double lambda = 0.0;
  int reps = 0;
  int errors = 0;
  double mean_loss = 0.0;
  double std_error = 0.0;
  double x = 0.0;  // regressor value
  std::size_t curve = 0;
};

struct CurveFit {
  std::string key;
  std::vector<std::size_t> points;
  LinearFit fit;
};

struct Summary {
  Regressor regressor = Regressor::inv_sqrt_n;
  std::vector<PointSummary> points;
  std::vector<CurveFit> curves;
};

/// Per-point means and standard errors, and one linear fit per curve. A curve
/// collects the points that differ only in the regressor's parameter (lambda
/// may follow n or d when it is re-derived per point).
Summary summarize(const std::vector<SweepRow>& rows, Regressor regressor);
std::string summary_csv(const Summary& summary);

double spearman(const std::vector<double>& x, const std::vector<double>& y);
double coefficient_of_variation(const std::vector<double>& v);

/// "a:b:k" -> k values equally spaced from a to b inclusive.
std::vector<double> parse_grid(const std::string& spec);

std::vector<RatePoint> phase_diagram(const std::vector<std::int64_t>& n_grid,
                                     const std::vector<double>& lambda_grid,
                                     std::int64_t d, std::int64_t r);
std::string phase_csv(const std::vector<RatePoint>& points);

nlohmann::json to_json(const RatePoint& p);
nlohmann::json to_json(const LowDegreeResult& r);

}  // namespace lrmm
