#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ganlab/config.hpp"
#include "ganlab/costs.hpp"
#include "ganlab/data.hpp"
#include "ganlab/metrics.hpp"
#include "ganlab/nn.hpp"
#include "ganlab/optim.hpp"

namespace ganlab::harness {

// One diagnostics row, taken at step 0 and after every eval_interval steps.
// All quantities are measured on dedicated evaluation batches drawn from
// their own seed streams, so rows are self-contained and evaluation never
// perturbs the training streams. g_update_rms is the per-parameter RMS of
// the latest applied G update (0 in the step-0 row).
struct EvalRow {
  long step = 0;
  double j_d = 0.0;
  double j_g = 0.0;
  double grad_norm_d = 0.0;
  double grad_norm_g = 0.0;  // after batch rescale, i.e. the update gradient
  double dp_real_mean = 0.0, dp_real_min = 0.0, dp_real_max = 0.0;
  double dp_fake_mean = 0.0, dp_fake_min = 0.0, dp_fake_max = 0.0;
  double rescale = 1.0;
  double g_update_rms = 0.0;
  metrics::ModeReport modes;
  metrics::GradDiagnostics ns_vs_mmnsat;  // both computed on the same batch
};

struct PretrainResult {
  bool threshold_reached = false;
  long steps_used = 0;
  double final_mean_fake_prob = -1.0;  // -1 = not measured (no pretraining)
  bool diverged = false;
  std::string abort_reason;
};

struct TrainingRecord {
  RunConfig config;
  PretrainResult pretrain;
  std::vector<EvalRow> rows;
  std::vector<double> g_update_rms_per_step;  // one entry per completed G step
  bool diverged = false;
  long abort_step = -1;
  std::string abort_reason;
  nn::DenseNet g_net, d_net;  // final parameters

  const EvalRow& final_row() const { return rows.back(); }
};

// Mutable run state, exposed so discriminator pretraining can be driven and
// inspected on its own.
struct TrainerState {
  RunConfig config;
  data::MixtureSpec mix;
  costs::CostFormulation form;
  nn::DenseNet g, d;
  optim::AdamState g_opt, d_opt;
  double r_ema = 0.0;  // cross-batch rescale smoothing (config smooth_r)
  bool r_ema_ready = false;
};

TrainerState init_state(const RunConfig& config);

// D-only updates against the frozen G until mean D_p(G(z)) on the current
// batch falls below config.d_pretrain_threshold or the step budget runs out.
PretrainResult pretrain_discriminator(TrainerState& state);

// Full deterministic run: optional D pretraining, then per step
// d_steps_per_g_step discriminator updates followed by one generator update.
// Non-finite gradients or updates abort the run with a diagnosis instead of
// throwing.
TrainingRecord train(const RunConfig& config);

struct SweepRunRow {
  std::string formulation;
  std::uint64_t seed = 0;
  bool diverged = false;
  double final_js = 0.0;
  int final_n_covered = 0;
  double final_none_freq = 0.0;
};

struct SweepAggregate {
  std::string formulation;
  double js_median = 0.0, js_min = 0.0, js_max = 0.0;
  int n_covered_median = 0, n_covered_min = 0, n_covered_max = 0;
  double none_median = 0.0, none_min = 0.0, none_max = 0.0;
};

struct SweepResult {
  std::vector<TrainingRecord> records;  // formulation-major, seed-minor
  std::vector<SweepRunRow> runs;
  std::vector<SweepAggregate> aggregates;  // medians use the lower-median rule
};

// Cartesian product of formulations x seeds over the base config. Runs are
// independent and may execute on `jobs` threads (0 = hardware concurrency);
// results and serialization are identical for any jobs value. Failed runs
// are recorded (diverged flag) and the sweep continues.
SweepResult sweep(const RunConfig& base, const std::vector<std::string>& formulations,
                  const std::vector<std::uint64_t>& seeds, unsigned jobs = 0);

// ---- output builders (pure; file writers below wrap them) ----

// columns: step, j_d, j_g, grad_norm_d, grad_norm_g, dp_real_mean/min/max,
// dp_fake_mean/min/max, rescale, g_update_rms, none_freq, freq_1..freq_K,
// n_covered, js, cos_ns_mmnsat, norm_ratio_ns_mmnsat
std::string timeseries_csv(const TrainingRecord& rec);
// config echo + pretrain + abort diagnostics + final metrics
std::string run_summary_json(const TrainingRecord& rec);
std::string sweep_csv(const SweepResult& result);
std::string sweep_json(const SweepResult& result);
// per-sample |coefficient| curves over a D_p grid, one column per variant
std::string scaling_factor_csv();
// simulated vs predicted |delta_t| for the three reference schedules
std::string adam_curves_csv();
// (x, y, mode_id) rows, mode_id = -1 for beyond-3-sigma samples
std::string sample_dump_csv(const data::MixtureSpec& mix, const Matrix& samples);
// the final evaluation's generated samples, dumped through the final G
std::string final_sample_dump_csv(const TrainingRecord& rec);

void write_file(const std::string& path, const std::string& content);

}  // namespace ganlab::harness
