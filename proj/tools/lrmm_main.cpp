// lrmm: command-line front end for simulation, estimation, theory
// calculators, Monte-Carlo sweeps and multi-layer network workflows.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "lrmm/error.hpp"
#include "lrmm/estimator.hpp"
#include "lrmm/harness.hpp"
#include "lrmm/io.hpp"
#include "lrmm/likelihood.hpp"
#include "lrmm/model.hpp"
#include "lrmm/netdata.hpp"
#include "lrmm/rng.hpp"
#include "lrmm/theory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw lrmm::IoError("cannot write " + path);
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw lrmm::IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json nullable(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank Gaussian mixture estimation and experiment toolkit", "lrmm"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Draw a planted signal and an LrMM sample set");
  int sim_d1 = 20, sim_d2 = 20, sim_r = 1, sim_n = 100;
  double sim_lambda = 5.0, sim_cond = lrmm::kDefaultCondition, sim_noise = 1.0;
  std::uint64_t sim_seed = 1;
  std::string sim_out;
  sim->add_option("--d1", sim_d1)->check(CLI::PositiveNumber);
  sim->add_option("--d2", sim_d2)->check(CLI::PositiveNumber);
  sim->add_option("--r", sim_r)->check(CLI::PositiveNumber);
  sim->add_option("--n", sim_n)->check(CLI::PositiveNumber);
  sim->add_option("--lambda", sim_lambda)->check(CLI::PositiveNumber);
  sim->add_option("--condition", sim_cond);
  sim->add_option("--noise-scale", sim_noise);
  sim->add_option("--seed", sim_seed);
  sim->add_option("--out", sim_out, "Output SampleSet directory")->required();

  // estimate
  auto* est = app.add_subcommand("estimate", "Run spectral aggregation on a SampleSet");
  std::string est_samples, est_truth, est_out, est_floor = "max_dim";
  int est_r = 1;
  bool est_split = false;
  est->add_option("--samples", est_samples, "SampleSet directory")->required();
  est->add_option("--r", est_r)->check(CLI::PositiveNumber);
  est->add_flag("--split", est_split, "Use four-way sample splitting");
  est->add_option("--floor-dim", est_floor, "max_dim or geom_mean");
  est->add_option("--truth", est_truth, "Matrix CSV of the true M; adds loss to the report");
  est->add_option("--out", est_out, "Output directory for m_hat.csv and report.json");

  // mle
  auto* mle = app.add_subcommand("mle", "Maximum-likelihood surrogates (EM or 2x2 grid)");
  std::string mle_samples, mle_method = "em", mle_init = "spectral", mle_out;
  int mle_r = 1, mle_max_iter = 500, mle_angles = 64;
  double mle_tol = 1e-8;
  std::string mle_lambda_grid = "0:5:51";
  mle->add_option("--samples", mle_samples, "SampleSet directory")->required();
  mle->add_option("--r", mle_r)->check(CLI::PositiveNumber);
  mle->add_option("--method", mle_method)->check(CLI::IsMember({"em", "grid"}));
  mle->add_option("--max-iter", mle_max_iter)->check(CLI::PositiveNumber);
  mle->add_option("--tol", mle_tol)->check(CLI::PositiveNumber);
  mle->add_option("--init", mle_init, "spectral, zero, or a Matrix CSV path");
  mle->add_option("--lambda-grid", mle_lambda_grid, "Grid method: a:b:k");
  mle->add_option("--angle-steps", mle_angles)->check(CLI::PositiveNumber);
  mle->add_option("--out", mle_out, "Write JSON here instead of stdout");

  // rate
  auto* rate = app.add_subcommand("rate", "Minimax rate and regime classification");
  std::int64_t rate_n = 0, rate_d = 0, rate_r = 1;
  double rate_lambda = 0.0;
  rate->add_option("--n", rate_n)->required()->check(CLI::PositiveNumber);
  rate->add_option("--d", rate_d)->required()->check(CLI::PositiveNumber);
  rate->add_option("--r", rate_r)->check(CLI::PositiveNumber);
  rate->add_option("--lambda", rate_lambda)->required()->check(CLI::PositiveNumber);

  // lowdeg
  auto* low = app.add_subcommand("lowdeg", "Low-degree likelihood-ratio norm");
  std::int64_t low_n = 0, low_d1 = 0, low_d2 = 0;
  double low_lambda = 0.0;
  int low_degree = 2;
  std::string low_mode = "exact";
  low->add_option("--n", low_n)->required()->check(CLI::PositiveNumber);
  low->add_option("--d1", low_d1)->required()->check(CLI::PositiveNumber);
  low->add_option("--d2", low_d2)->required()->check(CLI::PositiveNumber);
  low->add_option("--lambda", low_lambda)->required()->check(CLI::NonNegativeNumber);
  low->add_option("--degree", low_degree)->required()->check(CLI::PositiveNumber);
  low->add_option("--mode", low_mode)->check(CLI::IsMember({"bound", "exact", "brute"}));

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo sweep over a preset or JSON config");
  std::string sweep_preset, sweep_config, sweep_out;
  int sweep_reps = 0, sweep_workers = 1;
  std::uint64_t sweep_seed = 0;
  bool sweep_split = false, sweep_timing = false, sweep_dump = false;
  auto* preset_opt = sweep->add_option("--preset", sweep_preset, "exp1 .. exp6");
  auto* config_opt = sweep->add_option("--config", sweep_config, "Sweep spec JSON");
  preset_opt->excludes(config_opt);
  auto* reps_opt = sweep->add_option("--reps", sweep_reps)->check(CLI::PositiveNumber);
  auto* seed_opt = sweep->add_option("--seed", sweep_seed);
  sweep->add_option("--out", sweep_out, "results CSV (stdout when omitted)");
  sweep->add_flag("--split", sweep_split, "Use four-way sample splitting");
  sweep->add_option("--workers", sweep_workers, "Worker threads (0: hardware)");
  sweep->add_flag("--timing", sweep_timing, "Record elapsed_ms (output no longer reproducible)");
  sweep->add_flag("--dump-spec", sweep_dump, "Print the resolved spec JSON and exit");

  // summary
  auto* summ = app.add_subcommand("summary", "Per-point means and linear trend fits");
  std::string summ_in, summ_out, summ_reg = "inv_sqrt_n";
  summ->add_option("--in", summ_in)->required();
  summ->add_option("--regressor", summ_reg)
      ->check(CLI::IsMember({"inv_lambda", "inv_sqrt_n", "sqrt_d", "sqrt_r"}));
  summ->add_option("--out", summ_out);

  // phase
  auto* phase = app.add_subcommand("phase", "Phase diagram over (n, lambda)");
  std::int64_t phase_d = 0, phase_r = 1;
  std::string phase_n, phase_lambda, phase_out;
  phase->add_option("--d", phase_d)->required()->check(CLI::PositiveNumber);
  phase->add_option("--r", phase_r)->check(CLI::PositiveNumber);
  phase->add_option("--n-grid", phase_n, "a:b:k")->required();
  phase->add_option("--lambda-grid", phase_lambda, "a:b:k")->required();
  phase->add_option("--out", phase_out);

  // net
  auto* netc = app.add_subcommand("net", "Multi-layer network center estimation");
  std::string net_layers, net_labels, net_out, net_floor = "max_dim";
  bool net_undirected = false;
  int net_nodes = 0, net_r = lrmm::net::kDefaultRank;
  netc->add_option("--layers", net_layers, "TSV edge list")->required();
  netc->add_flag("--undirected", net_undirected);
  auto* nodes_opt = netc->add_option("--nodes", net_nodes)->check(CLI::PositiveNumber);
  netc->add_option("--r", net_r)->check(CLI::PositiveNumber);
  netc->add_option("--labels", net_labels, "node,community CSV");
  netc->add_option("--floor-dim", net_floor);
  netc->add_option("--out", net_out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      const auto signal = lrmm::make_signal(sim_d1, sim_d2, sim_r, sim_lambda, sim_cond,
                                            lrmm::derive_seed(sim_seed, 0, 0));
      const auto samples =
          lrmm::sample_lrmm(signal, sim_n, sim_noise, lrmm::derive_seed(sim_seed, 0, 1));
      lrmm::io::save_sample_set(sim_out, samples);
      lrmm::io::write_matrix_csv(fs::path(sim_out) / "truth.csv", signal.m);
      std::cout << json{{"samples", sim_out}, {"n", sim_n}, {"d1", sim_d1}, {"d2", sim_d2},
                        {"r", sim_r}, {"lambda", sim_lambda}}
                       .dump()
                << "\n";
    } else if (*est) {
      const auto samples = lrmm::io::load_sample_set(est_samples);
      lrmm::EstimatorConfig cfg;
      cfg.rank = est_r;
      cfg.split = est_split;
      cfg.floor_dim_rule = lrmm::floor_dim_rule_from_string(est_floor);
      const auto start = std::chrono::steady_clock::now();
      const auto rep = lrmm::estimate(samples, cfg);
      const double ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - start)
                            .count();
      json report = {{"lambda_hat", rep.lambda_hat},
                     {"floor_active", rep.floor_active},
                     {"floor_dim_rule", lrmm::to_string(rep.floor_dim_rule)},
                     {"batch_sizes", rep.batch_sizes},
                     {"runtime_ms", ms}};
      if (!est_truth.empty())
        report["loss"] = lrmm::loss(rep.m_hat, lrmm::io::read_matrix_csv(est_truth));
      if (!est_out.empty()) {
        fs::create_directories(est_out);
        lrmm::io::write_matrix_csv(fs::path(est_out) / "m_hat.csv", rep.m_hat);
        write_text((fs::path(est_out) / "report.json").string(), report.dump(2) + "\n");
      }
      std::cout << report.dump(2) << "\n";
    } else if (*mle) {
      const auto samples = lrmm::io::load_sample_set(mle_samples);
      lrmm::MleResult res;
      if (mle_method == "grid") {
        res = lrmm::grid_mle(samples, lrmm::parse_grid(mle_lambda_grid), mle_angles);
      } else {
        lrmm::Matrix init;
        if (mle_init == "zero") {
          init = lrmm::Matrix::Zero(samples.d1, samples.d2);
        } else if (mle_init == "spectral") {
          lrmm::EstimatorConfig cfg;
          cfg.rank = mle_r;
          init = lrmm::estimate(samples, cfg).m_hat;
        } else {
          init = lrmm::io::read_matrix_csv(mle_init);
        }
        res = lrmm::em_mle(samples, mle_r, init, {mle_max_iter, mle_tol});
      }
      json m = json::array();
      for (Eigen::Index i = 0; i < res.m_hat.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < res.m_hat.cols(); ++j) row.push_back(res.m_hat(i, j));
        m.push_back(row);
      }
      const json out = {{"method", lrmm::to_string(res.method)},
                        {"neg_log_lik", nullable(res.neg_log_lik)},
                        {"iterations", res.iterations},
                        {"converged", res.converged},
                        {"m_hat", m}};
      write_text(mle_out, out.dump(2) + "\n");
    } else if (*rate) {
      std::cout << lrmm::to_json(lrmm::classify(rate_n, rate_d, rate_r, rate_lambda)).dump(2)
                << "\n";
    } else if (*low) {
      const auto res = lrmm::lowdeg_norm(low_n, low_d1, low_d2, low_lambda, low_degree,
                                         lrmm::low_degree_mode_from_string(low_mode));
      std::cout << lrmm::to_json(res).dump(2) << "\n";
    } else if (*sweep) {
      lrmm::SweepSpec spec;
      if (!sweep_preset.empty())
        spec = lrmm::preset(sweep_preset);
      else if (!sweep_config.empty())
        spec = lrmm::sweep_spec_from_json(json::parse(read_text(sweep_config)));
      else
        throw lrmm::ParseError("sweep needs --preset or --config");
      if (reps_opt->count()) spec.reps = sweep_reps;
      if (seed_opt->count()) spec.master_seed = sweep_seed;
      if (sweep_split) spec.split = true;
      if (sweep_dump) {
        std::cout << lrmm::to_json(spec).dump(2) << "\n";
        return 0;
      }
      lrmm::SweepOptions opts;
      opts.workers = sweep_workers > 0
                         ? sweep_workers
                         : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
      opts.record_timing = sweep_timing;
      write_text(sweep_out, lrmm::sweep_csv(lrmm::run_sweep(spec, opts)));
    } else if (*summ) {
      const auto rows = lrmm::parse_sweep_csv(read_text(summ_in));
      const auto s = lrmm::summarize(rows, lrmm::regressor_from_string(summ_reg));
      write_text(summ_out, lrmm::summary_csv(s));
    } else if (*phase) {
      std::vector<std::int64_t> ns;
      for (double v : lrmm::parse_grid(phase_n)) ns.push_back(std::llround(v));
      const auto pts = lrmm::phase_diagram(ns, lrmm::parse_grid(phase_lambda), phase_d, phase_r);
      write_text(phase_out, lrmm::phase_csv(pts));
    } else if (*netc) {
      std::optional<int> nodes;
      if (nodes_opt->count()) nodes = net_nodes;
      const auto stack = lrmm::net::load_layers(net_layers, net_undirected, nodes);
      const auto pair = lrmm::net::estimate_pair(
          stack, net_r, lrmm::floor_dim_rule_from_string(net_floor));
      std::optional<fs::path> labels;
      if (!net_labels.empty()) labels = net_labels;
      const auto exported = lrmm::net::reorder_and_export(pair, labels, net_out);
      const fs::path out(net_out);
      lrmm::io::write_matrix_csv(out / "mean.csv", pair.mean);
      lrmm::io::write_matrix_csv(out / "m_hat.csv", pair.m_hat);
      const json report = {{"layers", stack.layers.size()},
                           {"nodes", stack.node_count},
                           {"r", net_r},
                           {"undirected", net_undirected},
                           {"order", exported.order}};
      write_text((out / "report.json").string(), report.dump(2) + "\n");
      std::cout << report.dump() << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "lrmm: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
