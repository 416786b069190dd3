#include "lrmm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>

#include "lrmm/error.hpp"
#include "lrmm/estimator.hpp"
#include "lrmm/io.hpp"
#include "lrmm/model.hpp"
#include "lrmm/rng.hpp"

namespace lrmm {

using nlohmann::json;

namespace {

std::vector<double> linspace(double a, double b, int count) {
  if (count < 1) throw DimensionError("grid needs at least one point");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    out[i] = count == 1 ? a : a + (b - a) * i / (count - 1);
  return out;
}

std::vector<int> int_linspace(int a, int b, int count) {
  std::vector<int> out;
  for (double v : linspace(a, b, count)) out.push_back(static_cast<int>(std::lround(v)));
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

}  // namespace

std::vector<double> LambdaRule::expand(std::int64_t d, std::int64_t n) const {
  const double base = std::sqrt(static_cast<double>(d)) * std::pow(static_cast<double>(n), -0.25);
  std::vector<double> out;
  if (scaled)
    for (double m : linspace(scaled->from, scaled->to, scaled->count)) out.push_back(m * base);
  for (double m : multipliers) out.push_back(m * base);
  out.insert(out.end(), values.begin(), values.end());
  return out;
}

std::vector<GridPoint> expand_grid(const SweepSpec& spec) {
  if (spec.d1.empty() || spec.r.empty() || spec.n.empty())
    throw DimensionError("sweep spec needs non-empty d1, r and n");
  if (!spec.d2.empty() && spec.d2.size() != spec.d1.size())
    throw DimensionError("sweep spec d2 must pair with d1");
  std::vector<GridPoint> out;
  for (std::size_t i = 0; i < spec.d1.size(); ++i) {
    const int d1 = spec.d1[i];
    const int d2 = spec.d2.empty() ? d1 : spec.d2[i];
    for (int n : spec.n)
      for (int r : spec.r)
        for (double lam : spec.lambda.expand(std::max(d1, d2), n))
          out.push_back({n, d1, d2, r, lam});
  }
  if (out.empty()) throw DimensionError("sweep spec has an empty lambda axis");
  return out;
}

std::vector<std::string> preset_names() {
  return {"exp1", "exp2", "exp3", "exp4", "exp5", "exp6"};
}

SweepSpec preset(const std::string& name) {
  SweepSpec s;
  s.name = name;
  s.r = {2};
  if (name == "exp1" || name == "exp2" || name == "exp3") {
    const int n = name == "exp1" ? 300 : name == "exp2" ? 500 : 3000;
    const int d = name == "exp1" ? 250 : name == "exp2" ? 100 : 20;
    s.n = {n};
    s.d1 = {d};
    s.lambda.scaled = ScaledLambda{3.0, 10.0, 8};
  } else if (name == "exp4") {
    s.d1 = {100, 200};
    s.n = int_linspace(100, 1000, 10);
    s.lambda.multipliers = {3.0};
  } else if (name == "exp5") {
    s.n = {100, 200};
    s.d1 = int_linspace(100, 500, 9);
    s.lambda.multipliers = {3.0};
  } else if (name == "exp6") {
    s.n = {10000};
    s.d1 = {10};
    s.r.clear();
    for (int r = 2; r <= 10; ++r) s.r.push_back(r);
    s.lambda.multipliers = {1.0};
    s.lambda.values = {5.0};
  } else {
    throw ParseError("unknown preset '" + name + "'");
  }
  return s;
}

json to_json(const SweepSpec& spec) {
  json lam = json::object();
  if (spec.lambda.scaled)
    lam["scaled"] = {{"from", spec.lambda.scaled->from},
                     {"to", spec.lambda.scaled->to},
                     {"count", spec.lambda.scaled->count}};
  if (!spec.lambda.multipliers.empty()) lam["multipliers"] = spec.lambda.multipliers;
  if (!spec.lambda.values.empty()) lam["values"] = spec.lambda.values;
  json j = {{"name", spec.name},     {"d1", spec.d1},
            {"r", spec.r},           {"n", spec.n},
            {"lambda", lam},         {"reps", spec.reps},
            {"seed", spec.master_seed}, {"split", spec.split},
            {"noise_scale", spec.noise_scale}, {"condition", spec.condition}};
  if (!spec.d2.empty()) j["d2"] = spec.d2;
  return j;
}

SweepSpec sweep_spec_from_json(const json& j) {
  SweepSpec s;
  try {
    s.name = j.value("name", std::string("custom"));
    auto int_list = [&](const char* key) {
      const json& v = j.at(key);
      return v.is_array() ? v.get<std::vector<int>>() : std::vector<int>{v.get<int>()};
    };
    s.d1 = j.contains("d1") ? int_list("d1") : int_list("d");
    if (j.contains("d2")) s.d2 = int_list("d2");
    s.r = int_list("r");
    s.n = int_list("n");
    const json& lam = j.at("lambda");
    if (lam.is_array()) {
      s.lambda.values = lam.get<std::vector<double>>();
    } else {
      if (lam.contains("scaled")) {
        const json& sc = lam["scaled"];
        s.lambda.scaled = ScaledLambda{sc.at("from").get<double>(), sc.at("to").get<double>(),
                                       sc.at("count").get<int>()};
      }
      if (lam.contains("multipliers"))
        s.lambda.multipliers = lam["multipliers"].get<std::vector<double>>();
      if (lam.contains("values")) s.lambda.values = lam["values"].get<std::vector<double>>();
    }
    s.reps = j.value("reps", 100);
    s.master_seed = j.value("seed", std::uint64_t{1});
    s.split = j.value("split", false);
    s.noise_scale = j.value("noise_scale", 1.0);
    s.condition = j.value("condition", 1.5);
  } catch (const json::exception& e) {
    throw ParseError(std::string("sweep config: ") + e.what());
  }
  if (s.reps < 1) throw ParseError("sweep config: reps must be positive");
  return s;
}

std::uint64_t matrix_hash(const double* data, std::size_t count) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto* bytes = reinterpret_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < count * sizeof(double); ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const SweepOptions& options) {
  const std::vector<GridPoint> grid = expand_grid(spec);
  if (spec.reps < 1) throw DimensionError("sweep needs reps >= 1");

  std::vector<std::optional<SignalMatrix>> signals(grid.size());
  std::vector<std::string> signal_errors(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const GridPoint& g = grid[p];
    try {
      signals[p] = make_signal(g.d1, g.d2, g.r, g.lambda, spec.condition,
                               derive_seed(spec.master_seed, p, 0));
    } catch (const std::exception& e) {
      signal_errors[p] = sanitize(e.what());
    }
  }

  const std::size_t reps = static_cast<std::size_t>(spec.reps);
  std::vector<SweepRow> rows(grid.size() * reps);
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t job = next++; job < rows.size(); job = next++) {
      const std::size_t p = job / reps;
      const int rep = static_cast<int>(job % reps) + 1;
      const GridPoint& g = grid[p];
      SweepRow& row = rows[job];
      row.experiment = spec.name;
      row.rep = rep;
      row.seed = derive_seed(spec.master_seed, p, static_cast<std::uint64_t>(rep));
      row.point_index = p;
      row.n = g.n;
      row.d1 = g.d1;
      row.d2 = g.d2;
      row.r = g.r;
      row.lambda = g.lambda;
      if (!signals[p]) {
        row.loss = std::numeric_limits<double>::quiet_NaN();
        row.lambda_hat = std::numeric_limits<double>::quiet_NaN();
        row.error = signal_errors[p];
        continue;
      }
      const SignalMatrix& signal = *signals[p];
      row.signal_hash = matrix_hash(signal.m.data(), static_cast<std::size_t>(signal.m.size()));
      const auto start = std::chrono::steady_clock::now();
      try {
        const SampleSet samples = sample_lrmm(signal, g.n, spec.noise_scale, row.seed);
        EstimatorConfig cfg;
        cfg.rank = g.r;
        cfg.split = spec.split;
        cfg.split_seed = row.seed;
        const EstimateReport rep_out = estimate(samples, cfg);
        row.loss = loss(rep_out.m_hat, signal.m);
        row.lambda_hat = rep_out.lambda_hat;
        row.floor_active = rep_out.floor_active;
      } catch (const std::exception& e) {
        row.loss = std::numeric_limits<double>::quiet_NaN();
        row.lambda_hat = std::numeric_limits<double>::quiet_NaN();
        row.error = sanitize(e.what());
      }
      if (options.record_timing)
        row.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    }
  };

  const int workers = std::max(1, options.workers);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = std::string(kSweepCsvHeader) + "\n";
  for (const SweepRow& r : rows) {
    out += r.experiment + ',' + std::to_string(r.rep) + ',' + std::to_string(r.seed) + ',' +
           std::to_string(r.n) + ',' + std::to_string(r.d1) + ',' + std::to_string(r.d2) +
           ',' + std::to_string(r.r) + ',' + io::format_double(r.lambda) + ',' +
           io::format_double(r.loss) + ',' + io::format_double(r.lambda_hat) + ',' +
           (r.floor_active ? "true" : "false") + ',' + std::to_string(r.elapsed_ms) + ',' +
           sanitize(r.error) + '\n';
  }
  return out;
}

std::vector<SweepRow> parse_sweep_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("sweep csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kSweepCsvHeader) throw ParseError("sweep csv: unexpected header");
  std::vector<SweepRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto c = split_csv_line(line);
    if (c.size() != 13)
      throw ParseError("sweep csv line " + std::to_string(line_no) + ": expected 13 fields");
    try {
      SweepRow r;
      r.experiment = c[0];
      r.rep = std::stoi(c[1]);
      r.seed = std::stoull(c[2]);
      r.n = std::stoi(c[3]);
      r.d1 = std::stoi(c[4]);
      r.d2 = std::stoi(c[5]);
      r.r = std::stoi(c[6]);
      r.lambda = std::stod(c[7]);
      r.loss = std::stod(c[8]);
      r.lambda_hat = std::stod(c[9]);
      r.floor_active = c[10] == "true" || c[10] == "1";
      r.elapsed_ms = std::stoll(c[11]);
      r.error = c[12];
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw ParseError("sweep csv line " + std::to_string(line_no) + ": bad field");
    }
  }
  return rows;
}

std::string to_string(Regressor reg) {
  switch (reg) {
    case Regressor::inv_lambda: return "inv_lambda";
    case Regressor::inv_sqrt_n: return "inv_sqrt_n";
    case Regressor::sqrt_d: return "sqrt_d";
    case Regressor::sqrt_r: return "sqrt_r";
  }
  return "?";
}

Regressor regressor_from_string(const std::string& s) {
  if (s == "inv_lambda") return Regressor::inv_lambda;
  if (s == "inv_sqrt_n") return Regressor::inv_sqrt_n;
  if (s == "sqrt_d") return Regressor::sqrt_d;
  if (s == "sqrt_r") return Regressor::sqrt_r;
  throw ParseError("unknown regressor '" + s + "'");
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DimensionError("linear_fit: length mismatch");
  if (x.size() < 2) throw InsufficientPoints("linear_fit needs at least two points");
  const double nx = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / nx;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / nx;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InsufficientPoints("linear_fit needs two distinct x values");
  LinearFit fit;
  if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); })) {
    fit.intercept = y.front();
    return fit;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
  return fit;
}

Summary summarize(const std::vector<SweepRow>& rows, Regressor regressor) {
  Summary out;
  out.regressor = regressor;

  // Rows of one grid point share every parameter; keep first-seen order.
  std::map<std::tuple<std::string, int, int, int, int, double>, std::size_t> point_of;
  std::vector<std::vector<double>> losses;
  for (const SweepRow& r : rows) {
    const auto key = std::make_tuple(r.experiment, r.n, r.d1, r.d2, r.r, r.lambda);
    auto it = point_of.find(key);
    if (it == point_of.end()) {
      it = point_of.emplace(key, out.points.size()).first;
      PointSummary p;
      p.experiment = r.experiment;
      p.n = r.n;
      p.d1 = r.d1;
      p.d2 = r.d2;
      p.r = r.r;
      p.lambda = r.lambda;
      out.points.push_back(p);
      losses.emplace_back();
    }
    PointSummary& p = out.points[it->second];
    if (std::isfinite(r.loss))
      losses[it->second].push_back(r.loss);
    else
      ++p.errors;
  }

  std::map<std::string, std::size_t> curve_of;
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    PointSummary& p = out.points[i];
    const auto& v = losses[i];
    p.reps = static_cast<int>(v.size());
    if (!v.empty()) {
      p.mean_loss = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
      double ss = 0.0;
      for (double l : v) ss += (l - p.mean_loss) * (l - p.mean_loss);
      p.std_error = v.size() > 1 ? std::sqrt(ss / (v.size() - 1) / v.size()) : 0.0;
    } else {
      p.mean_loss = std::numeric_limits<double>::quiet_NaN();
    }
    std::ostringstream key;
    key << p.experiment;
    switch (regressor) {
      case Regressor::inv_lambda:
        p.x = 1.0 / p.lambda;
        key << " n=" << p.n << " d1=" << p.d1 << " d2=" << p.d2 << " r=" << p.r;
        break;
      case Regressor::inv_sqrt_n:
        p.x = 1.0 / std::sqrt(static_cast<double>(p.n));
        key << " d1=" << p.d1 << " d2=" << p.d2 << " r=" << p.r;
        break;
      case Regressor::sqrt_d:
        p.x = std::sqrt(static_cast<double>(std::max(p.d1, p.d2)));
        key << " n=" << p.n << " r=" << p.r;
        break;
      case Regressor::sqrt_r:
        p.x = std::sqrt(static_cast<double>(p.r));
        key << " n=" << p.n << " d1=" << p.d1 << " d2=" << p.d2
            << " lambda=" << io::format_double(p.lambda);
        break;
    }
    auto [it, fresh] = curve_of.emplace(key.str(), out.curves.size());
    if (fresh) out.curves.push_back(CurveFit{key.str(), {}, {}});
    p.curve = it->second;
    out.curves[it->second].points.push_back(i);
  }

  for (CurveFit& c : out.curves) {
    std::vector<double> xs, ys;
    for (std::size_t i : c.points) {
      if (!std::isfinite(out.points[i].mean_loss)) continue;
      xs.push_back(out.points[i].x);
      ys.push_back(out.points[i].mean_loss);
    }
    if (xs.size() < 2)
      throw InsufficientPoints("curve '" + c.key + "' has fewer than two grid points");
    c.fit = linear_fit(xs, ys);
  }
  return out;
}

std::string summary_csv(const Summary& s) {
  std::string out =
      "experiment,curve,n,d1,d2,r,lambda,reps,errors,mean_loss,std_error,regressor,x,"
      "slope,intercept,r_squared\n";
  for (const PointSummary& p : s.points) {
    const LinearFit& f = s.curves[p.curve].fit;
    out += p.experiment + ',' + std::to_string(p.curve) + ',' + std::to_string(p.n) + ',' +
           std::to_string(p.d1) + ',' + std::to_string(p.d2) + ',' + std::to_string(p.r) +
           ',' + io::format_double(p.lambda) + ',' + std::to_string(p.reps) + ',' +
           std::to_string(p.errors) + ',' + io::format_double(p.mean_loss) + ',' +
           io::format_double(p.std_error) + ',' + to_string(s.regressor) + ',' +
           io::format_double(p.x) + ',' + io::format_double(f.slope) + ',' +
           io::format_double(f.intercept) + ',' + io::format_double(f.r_squared) + '\n';
  }
  return out;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw InsufficientPoints("spearman needs two equal-length series of length >= 2");
  return pearson(average_ranks(x), average_ranks(y));
}

double coefficient_of_variation(const std::vector<double>& v) {
  if (v.size() < 2) throw InsufficientPoints("coefficient of variation needs two values");
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (n - 1)) / std::abs(mean);
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : spec) {
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  try {
    if (parts.size() == 1) return {std::stod(parts[0])};
    if (parts.size() != 3) throw ParseError("grid must look like a:b:k");
    const int count = std::stoi(parts[2]);
    if (count < 1) throw ParseError("grid count must be positive");
    return linspace(std::stod(parts[0]), std::stod(parts[1]), count);
  } catch (const std::logic_error&) {
    throw ParseError("bad grid '" + spec + "'");
  }
}

std::vector<RatePoint> phase_diagram(const std::vector<std::int64_t>& n_grid,
                                     const std::vector<double>& lambda_grid,
                                     std::int64_t d, std::int64_t r) {
  if (n_grid.empty() || lambda_grid.empty())
    throw DimensionError("phase diagram needs non-empty grids");
  std::vector<RatePoint> out;
  for (std::int64_t n : n_grid)
    for (double lam : lambda_grid) out.push_back(classify(n, d, r, lam));
  return out;
}

std::string phase_csv(const std::vector<RatePoint>& points) {
  std::string out =
      "n,d,r,lambda,rate,info_threshold,comp_threshold,sample_regime,hardness\n";
  for (const RatePoint& p : points)
    out += std::to_string(p.n) + ',' + std::to_string(p.d) + ',' + std::to_string(p.r) + ',' +
           io::format_double(p.lambda) + ',' + io::format_double(p.rate) + ',' +
           io::format_double(p.info_threshold) + ',' + io::format_double(p.comp_threshold) +
           ',' + to_string(p.sample_regime) + ',' + to_string(p.hardness) + '\n';
  return out;
}

json to_json(const RatePoint& p) {
  return {{"n", p.n},
          {"d", p.d},
          {"r", p.r},
          {"lambda", p.lambda},
          {"rate", p.rate},
          {"info_threshold", p.info_threshold},
          {"comp_threshold", p.comp_threshold},
          {"sample_regime", to_string(p.sample_regime)},
          {"hardness", to_string(p.hardness)},
          {"note", "unit constants; order-of-magnitude guidance"}};
}

json to_json(const LowDegreeResult& r) {
  json terms = json::array();
  for (double t : r.terms) terms.push_back(std::isfinite(t) ? json(t) : json(nullptr));
  return {{"n", r.n},
          {"d1", r.d1},
          {"d2", r.d2},
          {"lambda", r.lambda},
          {"degree", r.degree},
          {"mode", to_string(r.mode)},
          {"value", std::isfinite(r.value) ? json(r.value) : json(nullptr)},
          {"log_excess", std::isfinite(r.log_excess) ? json(r.log_excess) : json(nullptr)},
          {"terms", terms}};
}

}  // namespace lrmm
