#include "ganlab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace ganlab::harness {

void RunConfig::validate() const {
  mixture();  // throws on bad dataset parameters
  if (noise_dim < 1) throw std::invalid_argument("noise_dim must be >= 1");
  if (g_layers.size() < 2 || d_layers.size() < 2) {
    throw std::invalid_argument("g_layers/d_layers need input and output widths");
  }
  if (g_layers.front() != noise_dim) {
    throw std::invalid_argument("g_layers[0] must equal noise_dim");
  }
  if (g_layers.back() != 2) throw std::invalid_argument("generator must emit 2D points");
  if (d_layers.front() != 2) throw std::invalid_argument("discriminator input must be 2D");
  if (d_layers.back() != 1) throw std::invalid_argument("discriminator must emit one logit");
  nn::parse_activation(g_hidden_activation);
  nn::parse_activation(g_output_activation);
  nn::parse_activation(d_hidden_activation);
  cost_formulation();  // validates name, a, eps_r
  if (smooth_r < 0.0 || smooth_r >= 1.0) throw std::invalid_argument("smooth_r must be in [0,1)");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (steps < 0) throw std::invalid_argument("steps must be >= 0");
  if (eval_interval < 1) throw std::invalid_argument("eval_interval must be >= 1");
  if (steps % eval_interval != 0) throw std::invalid_argument("eval_interval must divide steps");
  if (eval_samples < 1) throw std::invalid_argument("eval_samples must be >= 1");
  if (d_steps_per_g_step < 1) throw std::invalid_argument("d_steps_per_g_step must be >= 1");
  if (d_pretrain_steps < 0) throw std::invalid_argument("d_pretrain_steps must be >= 0");
  if (!(d_pretrain_threshold > 0.0) || !(d_pretrain_threshold < 1.0)) {
    throw std::invalid_argument("d_pretrain_threshold must be in (0,1)");
  }
  g_adam().validate();
  d_adam().validate();
}

costs::CostFormulation RunConfig::cost_formulation() const {
  return costs::CostFormulation::from_name(formulation, formulation_a, eps_r);
}

data::MixtureSpec RunConfig::mixture() const {
  data::MixtureSpec spec;
  if (dataset == "ring" || dataset == "ring8") {
    spec = data::ring_mixture(dataset_modes, ring_radius, dataset_std);
  } else if (dataset == "spiral" || dataset == "spiral12") {
    spec = data::spiral_mixture(dataset_modes, spiral_r0, spiral_dr, dataset_std);
  } else {
    throw std::invalid_argument("unknown dataset: " + dataset);
  }
  return normalize_data ? data::normalized_to_unit_box(spec) : spec;
}

optim::AdamConfig RunConfig::g_adam() const {
  return {g_alpha, g_beta1, g_beta2, g_eps, g_reinit_interval};
}

optim::AdamConfig RunConfig::d_adam() const {
  return {d_alpha, d_beta1, d_beta2, d_eps, d_reinit_interval};
}

namespace {

// preset names pin the dataset_* defaults before explicit keys override
void apply_dataset_defaults(RunConfig& c) {
  if (c.dataset == "ring" || c.dataset == "ring8") {
    c.dataset_modes = 8;
    c.ring_radius = 2.0;
    c.dataset_std = 0.02;
  } else if (c.dataset == "spiral" || c.dataset == "spiral12") {
    c.dataset_modes = 12;
    c.spiral_r0 = 1.0;
    c.spiral_dr = 0.4;
    c.dataset_std = 0.15;
  } else {
    throw std::invalid_argument("unknown dataset: " + c.dataset);
  }
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");

  RunConfig c;
  if (j.contains("dataset")) c.dataset = j.at("dataset").get<std::string>();
  apply_dataset_defaults(c);

  const std::set<std::string> known = {
      "dataset", "dataset_modes", "ring_radius", "spiral_r0", "spiral_dr", "dataset_std",
      "normalize_data", "noise_dim", "g_layers", "d_layers", "g_hidden_activation", "g_output_activation",
      "d_hidden_activation", "formulation", "formulation_a", "eps_r", "smooth_r",
      "batch_size", "steps", "eval_interval", "eval_samples", "seed", "d_steps_per_g_step",
      "d_pretrain_steps", "d_pretrain_threshold", "g_alpha", "g_beta1", "g_beta2", "g_eps",
      "g_reinit_interval", "d_alpha", "d_beta1", "d_beta2", "d_eps", "d_reinit_interval"};
  for (const auto& [key, value] : j.items()) {
    if (known.find(key) == known.end()) {
      throw std::invalid_argument("unknown config key: " + key);
    }
  }

  auto get = [&j](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("dataset_modes", c.dataset_modes);
  get("ring_radius", c.ring_radius);
  get("spiral_r0", c.spiral_r0);
  get("spiral_dr", c.spiral_dr);
  get("dataset_std", c.dataset_std);
  get("normalize_data", c.normalize_data);
  get("noise_dim", c.noise_dim);
  get("g_layers", c.g_layers);
  get("d_layers", c.d_layers);
  get("g_hidden_activation", c.g_hidden_activation);
  get("g_output_activation", c.g_output_activation);
  get("d_hidden_activation", c.d_hidden_activation);
  get("formulation", c.formulation);
  get("formulation_a", c.formulation_a);
  get("eps_r", c.eps_r);
  get("smooth_r", c.smooth_r);
  get("batch_size", c.batch_size);
  get("steps", c.steps);
  get("eval_interval", c.eval_interval);
  get("eval_samples", c.eval_samples);
  get("seed", c.seed);
  get("d_steps_per_g_step", c.d_steps_per_g_step);
  get("d_pretrain_steps", c.d_pretrain_steps);
  get("d_pretrain_threshold", c.d_pretrain_threshold);
  get("g_alpha", c.g_alpha);
  get("g_beta1", c.g_beta1);
  get("g_beta2", c.g_beta2);
  get("g_eps", c.g_eps);
  get("g_reinit_interval", c.g_reinit_interval);
  get("d_alpha", c.d_alpha);
  get("d_beta1", c.d_beta1);
  get("d_beta2", c.d_beta2);
  get("d_eps", c.d_eps);
  get("d_reinit_interval", c.d_reinit_interval);

  c.validate();
  return c;
}

RunConfig RunConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

std::string RunConfig::to_json_text() const {
  nlohmann::ordered_json j;
  j["dataset"] = dataset;
  j["dataset_modes"] = dataset_modes;
  j["ring_radius"] = ring_radius;
  j["spiral_r0"] = spiral_r0;
  j["spiral_dr"] = spiral_dr;
  j["dataset_std"] = dataset_std;
  j["normalize_data"] = normalize_data;
  j["noise_dim"] = noise_dim;
  j["g_layers"] = g_layers;
  j["d_layers"] = d_layers;
  j["g_hidden_activation"] = g_hidden_activation;
  j["g_output_activation"] = g_output_activation;
  j["d_hidden_activation"] = d_hidden_activation;
  j["formulation"] = formulation;
  j["formulation_a"] = formulation_a;
  j["eps_r"] = eps_r;
  j["smooth_r"] = smooth_r;
  j["batch_size"] = batch_size;
  j["steps"] = steps;
  j["eval_interval"] = eval_interval;
  j["eval_samples"] = eval_samples;
  j["seed"] = seed;
  j["d_steps_per_g_step"] = d_steps_per_g_step;
  j["d_pretrain_steps"] = d_pretrain_steps;
  j["d_pretrain_threshold"] = d_pretrain_threshold;
  j["g_alpha"] = g_alpha;
  j["g_beta1"] = g_beta1;
  j["g_beta2"] = g_beta2;
  j["g_eps"] = g_eps;
  j["g_reinit_interval"] = g_reinit_interval;
  j["d_alpha"] = d_alpha;
  j["d_beta1"] = d_beta1;
  j["d_beta2"] = d_beta2;
  j["d_eps"] = d_eps;
  j["d_reinit_interval"] = d_reinit_interval;
  return j.dump(2);
}

}  // namespace ganlab::harness
