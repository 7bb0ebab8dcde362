// Command-line front end: train / sweep / simulate-adam / plot-data.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ganlab/harness.hpp"
#include "ganlab/kernels.hpp"
#include "ganlab/nn.hpp"
#include "ganlab/rng.hpp"

namespace {

namespace hn = ganlab::harness;

// "0..9" (inclusive range), "0,3,7", or a single number
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  auto range_pos = text.find("..");
  if (range_pos != std::string::npos) {
    std::uint64_t lo = std::stoull(text.substr(0, range_pos));
    std::uint64_t hi = std::stoull(text.substr(range_pos + 2));
    if (hi < lo) throw CLI::ValidationError("--seeds", "range upper bound below lower");
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    std::string tok = text.substr(start, comma == std::string::npos ? comma : comma - start);
    if (!tok.empty()) seeds.push_back(std::stoull(tok));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (seeds.empty()) throw CLI::ValidationError("--seeds", "no seeds given");
  return seeds;
}

std::vector<std::string> parse_list(const std::string& text) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    std::string tok = text.substr(start, comma == std::string::npos ? comma : comma - start);
    if (!tok.empty()) items.push_back(tok);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return items;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
  std::filesystem::create_directories(dir);
}

int run_train(const std::string& config_path, std::int64_t seed_override, bool has_seed,
              const std::string& out_dir, bool allow_divergence) {
  hn::RunConfig config = hn::RunConfig::from_json_file(config_path);
  if (has_seed) config.seed = static_cast<std::uint64_t>(seed_override);
  hn::TrainingRecord rec = hn::train(config);

  ensure_dir(out_dir);
  hn::write_file(join_path(out_dir, "timeseries.csv"), hn::timeseries_csv(rec));
  hn::write_file(join_path(out_dir, "summary.json"), hn::run_summary_json(rec));
  hn::write_file(join_path(out_dir, "g_net.json"), ganlab::nn::save_snapshot(rec.g_net) + "\n");
  hn::write_file(join_path(out_dir, "d_net.json"), ganlab::nn::save_snapshot(rec.d_net) + "\n");
  hn::write_file(join_path(out_dir, "final_samples.csv"), hn::final_sample_dump_csv(rec));

  const auto& last = rec.final_row();
  std::cout << "run " << config.formulation << " seed " << config.seed << ": steps="
            << last.step << " n_covered=" << last.modes.n_covered
            << " js=" << last.modes.js_to_data << " none_freq=" << last.modes.none_freq
            << (rec.diverged ? " DIVERGED: " + rec.abort_reason : "") << "\n";
  if (rec.diverged && !allow_divergence) return 2;
  return 0;
}

int run_sweep(const std::string& config_path, const std::string& formulations,
              const std::string& seeds, unsigned jobs, const std::string& out_dir,
              bool allow_divergence) {
  hn::RunConfig base = hn::RunConfig::from_json_file(config_path);
  hn::SweepResult result =
      hn::sweep(base, parse_list(formulations), parse_seeds(seeds), jobs);

  ensure_dir(out_dir);
  hn::write_file(join_path(out_dir, "sweep.csv"), hn::sweep_csv(result));
  hn::write_file(join_path(out_dir, "sweep.json"), hn::sweep_json(result));

  bool any_diverged = false;
  for (const auto& agg : result.aggregates) {
    std::cout << agg.formulation << ": js median " << agg.js_median << " [" << agg.js_min
              << ", " << agg.js_max << "], n_covered median " << agg.n_covered_median
              << ", none_freq median " << agg.none_median << "\n";
  }
  for (const auto& row : result.runs) any_diverged |= row.diverged;
  if (any_diverged) {
    std::cout << "warning: at least one run diverged (see sweep.csv)\n";
    if (!allow_divergence) return 2;
  }
  return 0;
}

int run_simulate(double a, double beta1, double beta2, long steps, double alpha, double eps,
                 const std::string& out_path) {
  ganlab::optim::ScheduleSpec spec{a, steps, alpha, beta1, beta2, eps};
  std::vector<double> mags = ganlab::optim::simulate_schedule(spec);
  const long anchor_t = std::min<long>(5000, steps);
  ganlab::optim::AsymptoticPrediction pred =
      ganlab::optim::approx_update_magnitude(spec, anchor_t);
  double anchor = mags[anchor_t - 1];
  std::string out = "t,g_t,delta_mag,predicted\n";
  for (long t = 1; t <= steps; ++t) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%ld,%.17g,%.17g,%.17g\n", t,
                  std::exp(a * static_cast<double>(t)), mags[t - 1],
                  anchor * std::exp(pred.log_slope * static_cast<double>(t - anchor_t)));
    out += buf;
  }
  if (out_path.empty()) {
    std::cout << out;
  } else {
    hn::write_file(out_path, out);
    std::cout << "asymptotic case " << pred.case_label << ", log-slope " << pred.log_slope
              << "; wrote " << out_path << "\n";
  }
  return 0;
}

int run_plot_data(const std::string& what, const std::string& out_path) {
  std::string content;
  if (what == "scaling-factors") {
    content = hn::scaling_factor_csv();
  } else if (what == "adam-curves") {
    content = hn::adam_curves_csv();
  } else {
    throw CLI::ValidationError("--what", "expected scaling-factors or adam-curves");
  }
  hn::write_file(out_path, content);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GAN cost-formulation laboratory"};
  app.require_subcommand(1);

  std::string kernels_name;
  app.add_option("--kernels", kernels_name, "force kernel implementation (scalar/avx2/neon)");

  // train
  auto* train_cmd = app.add_subcommand("train", "run one training configuration");
  std::string config_path, out_dir = ".";
  std::int64_t seed_override = 0;
  bool allow_divergence = false;
  train_cmd->add_option("--config", config_path, "config JSON file")->required();
  auto* seed_opt = train_cmd->add_option("--seed", seed_override, "override config seed");
  train_cmd->add_option("--out", out_dir, "output directory");
  train_cmd->add_flag("--allow-divergence", allow_divergence,
                      "exit 0 even if the run aborts on non-finite values");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "train formulations x seeds");
  std::string sweep_config, formulations, seeds, sweep_out = ".";
  unsigned jobs = 0;
  bool sweep_allow = false;
  sweep_cmd->add_option("--config", sweep_config, "base config JSON file")->required();
  sweep_cmd->add_option("--formulations", formulations, "comma list, e.g. NS,MM_NSAT")->required();
  sweep_cmd->add_option("--seeds", seeds, "list or range, e.g. 0..9")->required();
  sweep_cmd->add_option("--jobs", jobs, "worker threads (0 = hardware)");
  sweep_cmd->add_option("--out", sweep_out, "output directory");
  sweep_cmd->add_flag("--allow-divergence", sweep_allow, "exit 0 even if runs abort");

  // simulate-adam
  auto* sim_cmd = app.add_subcommand("simulate-adam", "Adam update magnitudes under g_t = exp(a t)");
  double a = -0.001, beta1 = 0.99, beta2 = 0.999, alpha = 1.0, eps = 1e-8;
  long steps = 20000;
  std::string sim_out;
  sim_cmd->add_option("--a", a, "exponential gradient decay rate")->required();
  sim_cmd->add_option("--beta1", beta1, "Adam beta1");
  sim_cmd->add_option("--beta2", beta2, "Adam beta2");
  sim_cmd->add_option("--steps", steps, "horizon");
  sim_cmd->add_option("--alpha", alpha, "learning rate");
  sim_cmd->add_option("--eps", eps, "Adam epsilon");
  sim_cmd->add_option("--out", sim_out, "CSV path (stdout if omitted)");

  // plot-data
  auto* plot_cmd = app.add_subcommand("plot-data", "emit figure-ready CSV data");
  std::string what, plot_out;
  plot_cmd->add_option("--what", what, "scaling-factors | adam-curves")->required();
  plot_cmd->add_option("--out", plot_out, "CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (!kernels_name.empty()) ganlab::kernels::force_isa(kernels_name);
    if (train_cmd->parsed()) {
      return run_train(config_path, seed_override, seed_opt->count() > 0, out_dir,
                       allow_divergence);
    }
    if (sweep_cmd->parsed()) {
      return run_sweep(sweep_config, formulations, seeds, jobs, sweep_out, sweep_allow);
    }
    if (sim_cmd->parsed()) {
      return run_simulate(a, beta1, beta2, steps, alpha, eps, sim_out);
    }
    if (plot_cmd->parsed()) {
      return run_plot_data(what, plot_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
