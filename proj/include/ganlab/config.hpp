#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ganlab/costs.hpp"
#include "ganlab/data.hpp"
#include "ganlab/nn.hpp"
#include "ganlab/optim.hpp"

namespace ganlab::harness {

// Everything a training run depends on. Serialized as a flat JSON object
// (scalars and integer arrays only); every field has a key of the same name.
// "dataset" accepts a family ("ring", "spiral") or a preset ("ring8",
// "spiral12"); presets fill the dataset_* fields, explicit keys override.
struct RunConfig {
  std::string dataset = "ring8";
  std::size_t dataset_modes = 8;
  double ring_radius = 2.0;
  double spiral_r0 = 1.0;
  double spiral_dr = 0.4;
  double dataset_std = 0.02;
  // rescale the mixture into [-1,1]^2 (3-sigma margin), for pipelines with a
  // tanh generator output; off = train in raw data coordinates
  bool normalize_data = false;

  std::size_t noise_dim = 8;
  std::vector<std::size_t> g_layers = {8, 64, 64, 2};
  std::vector<std::size_t> d_layers = {2, 64, 64, 1};
  std::string g_hidden_activation = "tanh";
  std::string g_output_activation = "identity";
  std::string d_hidden_activation = "relu";

  std::string formulation = "MM_NSAT";
  double formulation_a = 0.0;
  double eps_r = 1e-8;
  double smooth_r = 0.0;  // EMA factor for ratio rescales; 0 = off

  std::size_t batch_size = 64;
  long steps = 20000;
  long eval_interval = 200;
  std::size_t eval_samples = 10000;
  std::uint64_t seed = 0;
  long d_steps_per_g_step = 1;
  long d_pretrain_steps = 0;
  double d_pretrain_threshold = 1e-2;

  double g_alpha = 2e-4, g_beta1 = 0.5, g_beta2 = 0.999, g_eps = 1e-8;
  long g_reinit_interval = 0;
  double d_alpha = 2e-4, d_beta1 = 0.5, d_beta2 = 0.999, d_eps = 1e-8;
  long d_reinit_interval = 0;

  bool operator==(const RunConfig&) const = default;

  void validate() const;
  costs::CostFormulation cost_formulation() const;
  data::MixtureSpec mixture() const;
  optim::AdamConfig g_adam() const;
  optim::AdamConfig d_adam() const;

  static RunConfig from_json_text(const std::string& text);
  static RunConfig from_json_file(const std::string& path);
  std::string to_json_text() const;  // full echo, every key present
};

}  // namespace ganlab::harness
