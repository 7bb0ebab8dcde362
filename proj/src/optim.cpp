#include "ganlab/optim.hpp"

#include <cmath>
#include <stdexcept>

#include "ganlab/kernels.hpp"

namespace ganlab::optim {

void AdamConfig::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
  if (beta1 < 0.0 || beta1 >= 1.0) throw std::invalid_argument("beta1 must be in [0,1)");
  if (beta2 < 0.0 || beta2 >= 1.0) throw std::invalid_argument("beta2 must be in [0,1)");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");
  if (reinit_interval < 0) throw std::invalid_argument("reinit_interval must be >= 0");
}

AdamState::AdamState(std::size_t n_params, AdamConfig c)
    : cfg(c), m(n_params, 0.0), v(n_params, 0.0) {
  cfg.validate();
}

void AdamState::reinitialize() {
  m.assign(m.size(), 0.0);
  v.assign(v.size(), 0.0);
  t = 0;
}

std::vector<double> adam_step(AdamState& state, std::span<const double> grad) {
  if (grad.size() != state.m.size()) throw std::invalid_argument("gradient size mismatch");
  if (state.cfg.reinit_interval > 0 && state.t > 0 &&
      state.t % state.cfg.reinit_interval == 0) {
    state.reinitialize();
  }
  state.t += 1;
  const double bc1 = 1.0 - std::pow(state.cfg.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(state.cfg.beta2, static_cast<double>(state.t));
  std::vector<double> delta(grad.size());
  kernels::active().adam_update(state.m.data(), state.v.data(), delta.data(), grad.data(),
                                state.cfg.beta1, state.cfg.beta2, 1.0 / bc1, 1.0 / bc2,
                                state.cfg.alpha, state.cfg.eps, grad.size());
  return delta;
}

std::vector<double> simulate_schedule(const ScheduleSpec& spec) {
  if (spec.horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  AdamState state(1, AdamConfig{spec.alpha, spec.beta1, spec.beta2, spec.eps, 0});
  std::vector<double> mags;
  mags.reserve(spec.horizon);
  double g[1];
  for (long t = 1; t <= spec.horizon; ++t) {
    g[0] = std::exp(spec.a * static_cast<double>(t));
    mags.push_back(std::abs(adam_step(state, std::span<const double>(g, 1))[0]));
  }
  return mags;
}

AsymptoticPrediction approx_update_magnitude(const ScheduleSpec& spec, long t) {
  const double lb1 = std::log(spec.beta1);
  const double half_lb2 = 0.5 * std::log(spec.beta2);
  if (spec.a == lb1) {
    throw std::domain_error("a == log(beta1): integral approximation degenerate");
  }
  AsymptoticPrediction p;
  if (spec.a > lb1) {
    if (spec.a >= half_lb2) {
      p.case_label = 1;
      p.log_slope = 0.0;
    } else {
      p.case_label = 3;
      p.log_slope = spec.a - half_lb2;
    }
  } else {
    if (spec.a < half_lb2) {
      p.case_label = 2;
      p.log_slope = lb1 - half_lb2;  // per-step ratio beta1/sqrt(beta2)
    } else {
      p.case_label = 4;
      p.log_slope = lb1 - spec.a;
    }
  }
  p.envelope = std::exp(p.log_slope * static_cast<double>(t));
  return p;
}

double fit_log_slope(std::span<const double> series, long t_begin, long t_end) {
  if (t_begin < 1 || t_end > static_cast<long>(series.size()) || t_begin >= t_end) {
    throw std::invalid_argument("bad fit window");
  }
  // least squares on (t, ln y_t)
  double n = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (long t = t_begin; t <= t_end; ++t) {
    double y = series[t - 1];
    if (!(y > 0.0)) throw std::invalid_argument("series must be positive in fit window");
    double x = static_cast<double>(t);
    double ly = std::log(y);
    n += 1.0;
    sx += x;
    sy += ly;
    sxx += x * x;
    sxy += x * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace ganlab::optim
