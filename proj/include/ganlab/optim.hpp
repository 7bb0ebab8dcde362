#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ganlab::optim {

struct AdamConfig {
  double alpha = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;
  long reinit_interval = 0;  // 0 = never; otherwise moments reset every k steps

  void validate() const;
};

struct AdamState {
  AdamConfig cfg;
  std::vector<double> m;
  std::vector<double> v;
  long t = 0;

  AdamState(std::size_t n_params, AdamConfig cfg);
  void reinitialize();  // m = v = 0, t = 0
};

// One Adam step with bias correction. Mutates state, returns the parameter
// delta (to be added to the parameters). If reinit_interval is set and t is
// a positive multiple of it, the state is reset before this step's moment
// update.
std::vector<double> adam_step(AdamState& state, std::span<const double> grad);

// Exponential-gradient schedule g_t = exp(a*t), t = 1..T, on one scalar
// parameter. Drives the saturation analysis.
struct ScheduleSpec {
  double a = 0.0;
  long horizon = 20000;
  double alpha = 1.0;
  double beta1 = 0.99;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// |delta_t| for t = 1..horizon under the schedule (index 0 <-> t = 1).
std::vector<double> simulate_schedule(const ScheduleSpec& spec);

// Large-t behaviour of |delta_t| from the integral approximation of the
// moment sums. Four regimes depending on a vs log(beta1) and (1/2)log(beta2):
//   1: a > log b1, a > 1/2 log b2  -> constant updates
//   2: a < log b1, a < 1/2 log b2  -> (b1/sqrt(b2))^t
//   3: a > log b1, a < 1/2 log b2  -> exp((a - 1/2 log b2) t)
//   4: a < log b1, a > 1/2 log b2  -> exp((log b1 - a) t)
// Valid for reasonably large t (the fit window used throughout starts at
// t = 5000). a == log(beta1) is degenerate and throws.
struct AsymptoticPrediction {
  int case_label = 0;
  double log_slope = 0.0;  // natural-log slope of |delta_t|
  double envelope = 0.0;   // exp(log_slope * t), up to a constant factor
};

AsymptoticPrediction approx_update_magnitude(const ScheduleSpec& spec, long t);

// Least-squares slope of ln(series[t]) over steps t in [t_begin, t_end],
// 1-based to match simulate_schedule. Used to compare simulations against
// the asymptotic prediction.
double fit_log_slope(std::span<const double> series, long t_begin, long t_end);

}  // namespace ganlab::optim
