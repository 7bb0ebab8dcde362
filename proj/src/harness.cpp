#include "ganlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "ganlab/kernels.hpp"
#include "ganlab/rng.hpp"
#include "json.hpp"

namespace ganlab::harness {

namespace {

// Seed stream tags. Every random draw in a run derives its seed as
// derive_seed(config.seed, tag, step, substep), which keeps all consumers
// independent of each other and of execution order.
enum Stream : std::uint64_t {
  kInitG = 1,
  kInitD = 2,
  kTrainReal = 3,
  kTrainDNoise = 4,
  kTrainGNoise = 5,
  kEvalModeNoise = 6,
  kEvalReal = 7,
  kEvalDiagNoise = 8,
  kPretrainReal = 9,
  kPretrainNoise = 10,
};

std::string fmt(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct DpStats {
  double mean = 0.0, min = 0.0, max = 0.0;
};

DpStats dp_stats(const std::vector<double>& probs) {
  DpStats s;
  s.min = probs.front();
  s.max = probs.front();
  for (double p : probs) {
    s.mean += p;
    s.min = std::min(s.min, p);
    s.max = std::max(s.max, p);
  }
  s.mean /= static_cast<double>(probs.size());
  return s;
}

// One discriminator update on given real points and noise. Returns false
// (with a reason) on non-finite gradients instead of applying them.
bool d_update(TrainerState& st, const Matrix& real, const Matrix& noise,
              costs::DiscSignals* signals_out, std::string* why) {
  const std::size_t n = real.rows();
  nn::ForwardCache g_cache = nn::forward(st.g, noise);
  const Matrix& fake = g_cache.output();
  Matrix joint(n + fake.rows(), 2);
  for (std::size_t i = 0; i < n; ++i) {
    joint(i, 0) = real(i, 0);
    joint(i, 1) = real(i, 1);
  }
  for (std::size_t i = 0; i < fake.rows(); ++i) {
    joint(n + i, 0) = fake(i, 0);
    joint(n + i, 1) = fake(i, 1);
  }
  nn::ForwardCache d_cache = nn::forward(st.d, joint);
  std::vector<double> lr(n), lf(fake.rows());
  for (std::size_t i = 0; i < n; ++i) lr[i] = d_cache.output()(i, 0);
  for (std::size_t i = 0; i < fake.rows(); ++i) lf[i] = d_cache.output()(n + i, 0);
  costs::DiscSignals signals = costs::DiscSignals::from_logits(std::move(lr), std::move(lf));
  costs::DLogitCoeffs co = costs::d_logit_coeffs(st.form, signals);
  Matrix coeffs(joint.rows(), 1);
  for (std::size_t i = 0; i < n; ++i) coeffs(i, 0) = co.real[i];
  for (std::size_t i = 0; i < co.fake.size(); ++i) coeffs(n + i, 0) = co.fake[i];
  nn::ParamGradient grad = nn::backward(st.d, d_cache, coeffs);
  if (!std::isfinite(grad.two_norm()) || !std::isfinite(co.loss)) {
    *why = "non-finite discriminator gradient";
    return false;
  }
  std::vector<double> delta = optim::adam_step(st.d_opt, grad.flat());
  double d2 = kernels::active().sum_squares(delta.data(), delta.size());
  if (!std::isfinite(d2)) {
    *why = "non-finite discriminator update";
    return false;
  }
  st.d.apply_delta(delta);
  if (signals_out != nullptr) *signals_out = std::move(signals);
  return true;
}

EvalRow evaluate(const TrainerState& st, long step, double last_rms) {
  const RunConfig& c = st.config;
  EvalRow row;
  row.step = step;
  row.g_update_rms = last_rms;

  // mode report over fresh generated samples
  Matrix z_big = data::sample_noise({c.noise_dim}, c.eval_samples,
                                    derive_seed(c.seed, kEvalModeNoise, step));
  row.modes = metrics::mode_frequencies(st.mix, nn::forward(st.g, z_big).output());

  // discriminator-side diagnostics on one evaluation batch
  data::RealBatch real = data::sample_real(st.mix, c.batch_size,
                                           derive_seed(c.seed, kEvalReal, step));
  Matrix z = data::sample_noise({c.noise_dim}, c.batch_size,
                                derive_seed(c.seed, kEvalDiagNoise, step));
  nn::ForwardCache g_cache = nn::forward(st.g, z);
  const Matrix& fake = g_cache.output();
  Matrix joint(2 * c.batch_size, 2);
  for (std::size_t i = 0; i < c.batch_size; ++i) {
    joint(i, 0) = real.points(i, 0);
    joint(i, 1) = real.points(i, 1);
    joint(c.batch_size + i, 0) = fake(i, 0);
    joint(c.batch_size + i, 1) = fake(i, 1);
  }
  nn::ForwardCache d_cache = nn::forward(st.d, joint);
  std::vector<double> lr(c.batch_size), lf(c.batch_size);
  for (std::size_t i = 0; i < c.batch_size; ++i) {
    lr[i] = d_cache.output()(i, 0);
    lf[i] = d_cache.output()(c.batch_size + i, 0);
  }
  costs::DiscSignals signals = costs::DiscSignals::from_logits(std::move(lr), std::move(lf));
  costs::DLogitCoeffs co = costs::d_logit_coeffs(st.form, signals);
  Matrix coeffs(joint.rows(), 1);
  for (std::size_t i = 0; i < c.batch_size; ++i) {
    coeffs(i, 0) = co.real[i];
    coeffs(c.batch_size + i, 0) = co.fake[i];
  }
  row.grad_norm_d = nn::backward(st.d, d_cache, coeffs).two_norm();
  row.j_d = co.loss / static_cast<double>(c.batch_size);
  DpStats rs = dp_stats(signals.probs_real);
  DpStats fs = dp_stats(signals.probs_fake);
  row.dp_real_mean = rs.mean;
  row.dp_real_min = rs.min;
  row.dp_real_max = rs.max;
  row.dp_fake_mean = fs.mean;
  row.dp_fake_min = fs.min;
  row.dp_fake_max = fs.max;

  // generator-side diagnostics on the same noise batch
  costs::GBatchResult gres = costs::g_batch_gradient(st.form, st.g, st.d, z);
  row.j_g = gres.loss / static_cast<double>(c.batch_size);
  row.grad_norm_g = gres.grad.two_norm();
  row.rescale = gres.rescale.r;

  costs::CostFormulation ns{costs::Variant::ns, 0.0, c.eps_r};
  costs::CostFormulation nsat{costs::Variant::mm_nsat, 0.0, c.eps_r};
  costs::GBatchResult ns_res = costs::g_batch_gradient(ns, st.g, st.d, z);
  costs::GBatchResult nsat_res = costs::g_batch_gradient(nsat, st.g, st.d, z);
  if (ns_res.grad.two_norm() > 0.0 || nsat_res.grad.two_norm() > 0.0) {
    row.ns_vs_mmnsat = metrics::grad_diagnostics(ns_res.grad, nsat_res.grad);
  }  // else leave zeros: a fully dead pairing should not kill the run
  return row;
}

}  // namespace

TrainerState init_state(const RunConfig& config) {
  config.validate();
  nn::DenseNet g = nn::init_net(config.g_layers,
                                nn::parse_activation(config.g_hidden_activation),
                                nn::parse_activation(config.g_output_activation),
                                derive_seed(config.seed, kInitG));
  nn::DenseNet d = nn::init_net(config.d_layers,
                                nn::parse_activation(config.d_hidden_activation),
                                nn::Activation::identity, derive_seed(config.seed, kInitD));
  optim::AdamState g_opt(g.n_params(), config.g_adam());
  optim::AdamState d_opt(d.n_params(), config.d_adam());
  return TrainerState{config, config.mixture(), config.cost_formulation(),
                      std::move(g), std::move(d), std::move(g_opt), std::move(d_opt)};
}

PretrainResult pretrain_discriminator(TrainerState& st) {
  const RunConfig& c = st.config;
  PretrainResult res;
  for (long p = 1; p <= c.d_pretrain_steps; ++p) {
    data::RealBatch real = data::sample_real(st.mix, c.batch_size,
                                             derive_seed(c.seed, kPretrainReal, p));
    Matrix z = data::sample_noise({c.noise_dim}, c.batch_size,
                                  derive_seed(c.seed, kPretrainNoise, p));
    std::string why;
    if (!d_update(st, real.points, z, nullptr, &why)) {
      res.diverged = true;
      res.abort_reason = why + " (pretraining)";
      return res;
    }
    res.steps_used = p;
    // threshold check on this batch's fake side, after the update
    nn::ForwardCache gc = nn::forward(st.g, z);
    nn::ForwardCache dc = nn::forward(st.d, gc.output());
    double mean = 0.0;
    for (std::size_t i = 0; i < dc.output().rows(); ++i) mean += costs::sigmoid(dc.output()(i, 0));
    mean /= static_cast<double>(dc.output().rows());
    res.final_mean_fake_prob = mean;
    if (mean < c.d_pretrain_threshold) {
      res.threshold_reached = true;
      break;
    }
  }
  return res;
}

TrainingRecord train(const RunConfig& config) {
  TrainerState st = init_state(config);
  const RunConfig& c = st.config;

  TrainingRecord rec;
  rec.config = c;
  rec.pretrain = pretrain_discriminator(st);
  if (rec.pretrain.diverged) {
    rec.diverged = true;
    rec.abort_step = 0;
    rec.abort_reason = rec.pretrain.abort_reason;
  }

  rec.rows.push_back(evaluate(st, 0, 0.0));

  double last_rms = 0.0;
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(st.g.n_params()));
  for (long t = 1; !rec.diverged && t <= c.steps; ++t) {
    std::string why;
    for (long s = 0; s < c.d_steps_per_g_step; ++s) {
      data::RealBatch real = data::sample_real(st.mix, c.batch_size,
                                               derive_seed(c.seed, kTrainReal, t, s));
      Matrix zd = data::sample_noise({c.noise_dim}, c.batch_size,
                                     derive_seed(c.seed, kTrainDNoise, t, s));
      if (!d_update(st, real.points, zd, nullptr, &why)) {
        rec.diverged = true;
        rec.abort_step = t;
        rec.abort_reason = why;
        break;
      }
    }
    if (rec.diverged) break;

    Matrix zg = data::sample_noise({c.noise_dim}, c.batch_size,
                                   derive_seed(c.seed, kTrainGNoise, t));
    costs::GBatchResult gres = costs::g_batch_gradient(st.form, st.g, st.d, zg);
    if (!std::isfinite(gres.grad.two_norm()) || !std::isfinite(gres.loss)) {
      rec.diverged = true;
      rec.abort_step = t;
      rec.abort_reason = "non-finite generator gradient";
      break;
    }
    if (c.smooth_r > 0.0 && gres.rescale.rule != costs::RescaleRule::identity) {
      // EMA over the instantaneous batch factors; the gradient was already
      // scaled by the raw R, so rescale it to the smoothed value.
      if (!st.r_ema_ready) {
        st.r_ema = gres.rescale.r;
        st.r_ema_ready = true;
      } else {
        st.r_ema = c.smooth_r * st.r_ema + (1.0 - c.smooth_r) * gres.rescale.r;
      }
      if (gres.rescale.r > 0.0) gres.grad.scale_all(st.r_ema / gres.rescale.r);
    }
    std::vector<double> delta = optim::adam_step(st.g_opt, gres.grad.flat());
    double d2 = kernels::active().sum_squares(delta.data(), delta.size());
    if (!std::isfinite(d2)) {
      rec.diverged = true;
      rec.abort_step = t;
      rec.abort_reason = "non-finite generator update";
      break;
    }
    st.g.apply_delta(delta);
    last_rms = std::sqrt(d2) * inv_sqrt_n;
    rec.g_update_rms_per_step.push_back(last_rms);
    if (t % c.eval_interval == 0) {
      rec.rows.push_back(evaluate(st, t, last_rms));
    }
  }
  if (rec.diverged && rec.abort_step > rec.rows.back().step) {
    rec.rows.push_back(evaluate(st, rec.abort_step, last_rms));  // diagnosis snapshot
  }
  rec.g_net = std::move(st.g);
  rec.d_net = std::move(st.d);
  return rec;
}

SweepResult sweep(const RunConfig& base, const std::vector<std::string>& formulations,
                  const std::vector<std::uint64_t>& seeds, unsigned jobs) {
  if (formulations.empty() || seeds.empty()) {
    throw std::invalid_argument("sweep needs nonempty formulation and seed lists");
  }
  std::vector<RunConfig> configs;
  for (const std::string& f : formulations) {
    for (std::uint64_t s : seeds) {
      RunConfig c = base;
      c.formulation = f;
      c.seed = s;
      c.validate();
      configs.push_back(std::move(c));
    }
  }

  SweepResult result;
  result.records.resize(configs.size());
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, configs.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next.fetch_add(1); i < configs.size(); i = next.fetch_add(1)) {
      try {
        result.records[i] = train(configs[i]);
      } catch (const std::exception& e) {
        result.records[i].config = configs[i];
        result.records[i].diverged = true;
        result.records[i].abort_reason = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();

  for (const TrainingRecord& rec : result.records) {
    SweepRunRow row;
    row.formulation = rec.config.formulation;
    row.seed = rec.config.seed;
    row.diverged = rec.diverged;
    if (!rec.rows.empty()) {
      row.final_js = rec.final_row().modes.js_to_data;
      row.final_n_covered = rec.final_row().modes.n_covered;
      row.final_none_freq = rec.final_row().modes.none_freq;
    }
    result.runs.push_back(std::move(row));
  }

  auto lower_median = [](auto v) {
    std::sort(v.begin(), v.end());
    return v[(v.size() - 1) / 2];
  };
  for (const std::string& f : formulations) {
    std::vector<double> js, none;
    std::vector<int> ncov;
    for (const SweepRunRow& row : result.runs) {
      if (row.formulation != f) continue;
      js.push_back(row.final_js);
      none.push_back(row.final_none_freq);
      ncov.push_back(row.final_n_covered);
    }
    SweepAggregate agg;
    agg.formulation = f;
    agg.js_median = lower_median(js);
    agg.js_min = *std::min_element(js.begin(), js.end());
    agg.js_max = *std::max_element(js.begin(), js.end());
    agg.n_covered_median = lower_median(ncov);
    agg.n_covered_min = *std::min_element(ncov.begin(), ncov.end());
    agg.n_covered_max = *std::max_element(ncov.begin(), ncov.end());
    agg.none_median = lower_median(none);
    agg.none_min = *std::min_element(none.begin(), none.end());
    agg.none_max = *std::max_element(none.begin(), none.end());
    result.aggregates.push_back(std::move(agg));
  }
  return result;
}

std::string timeseries_csv(const TrainingRecord& rec) {
  const std::size_t k_modes = rec.rows.front().modes.per_mode_freq.size();
  std::string out =
      "step,j_d,j_g,grad_norm_d,grad_norm_g,dp_real_mean,dp_real_min,dp_real_max,"
      "dp_fake_mean,dp_fake_min,dp_fake_max,rescale,g_update_rms,none_freq";
  for (std::size_t k = 1; k <= k_modes; ++k) out += ",freq_" + std::to_string(k);
  out += ",n_covered,js,cos_ns_mmnsat,norm_ratio_ns_mmnsat\n";
  for (const EvalRow& r : rec.rows) {
    out += std::to_string(r.step);
    for (double v : {r.j_d, r.j_g, r.grad_norm_d, r.grad_norm_g, r.dp_real_mean,
                     r.dp_real_min, r.dp_real_max, r.dp_fake_mean, r.dp_fake_min,
                     r.dp_fake_max, r.rescale, r.g_update_rms, r.modes.none_freq}) {
      out += ',';
      out += fmt(v);
    }
    for (double f : r.modes.per_mode_freq) {
      out += ',';
      out += fmt(f);
    }
    out += ',' + std::to_string(r.modes.n_covered);
    out += ',' + fmt(r.modes.js_to_data);
    out += ',' + fmt(r.ns_vs_mmnsat.cosine);
    out += ',' + fmt(r.ns_vs_mmnsat.norm_ratio);
    out += '\n';
  }
  return out;
}

std::string run_summary_json(const TrainingRecord& rec) {
  nlohmann::ordered_json j;
  j["config"] = nlohmann::ordered_json::parse(rec.config.to_json_text());
  j["pretrain"] = {{"threshold_reached", rec.pretrain.threshold_reached},
                   {"steps_used", rec.pretrain.steps_used},
                   {"final_mean_fake_prob", rec.pretrain.final_mean_fake_prob}};
  j["diverged"] = rec.diverged;
  j["abort_step"] = rec.abort_step;
  j["abort_reason"] = rec.abort_reason;
  const EvalRow& last = rec.final_row();
  j["final"] = {{"step", last.step},
                {"j_d", last.j_d},
                {"j_g", last.j_g},
                {"grad_norm_d", last.grad_norm_d},
                {"grad_norm_g", last.grad_norm_g},
                {"rescale", last.rescale},
                {"g_update_rms", last.g_update_rms},
                {"none_freq", last.modes.none_freq},
                {"per_mode_freq", last.modes.per_mode_freq},
                {"n_covered", last.modes.n_covered},
                {"js", last.modes.js_to_data}};
  return j.dump(2) + "\n";
}

std::string sweep_csv(const SweepResult& result) {
  std::string out =
      "row_type,formulation,seed,diverged,final_js,final_n_covered,final_none_freq,"
      "js_median,js_min,js_max,n_covered_median,n_covered_min,n_covered_max,"
      "none_freq_median,none_freq_min,none_freq_max\n";
  for (const SweepRunRow& r : result.runs) {
    out += "run," + r.formulation + ',' + std::to_string(r.seed) + ',' +
           (r.diverged ? "1" : "0") + ',' + fmt(r.final_js) + ',' +
           std::to_string(r.final_n_covered) + ',' + fmt(r.final_none_freq) +
           ",,,,,,,,,\n";
  }
  for (const SweepAggregate& a : result.aggregates) {
    out += "aggregate," + a.formulation + ",,,,,," + fmt(a.js_median) + ',' +
           fmt(a.js_min) + ',' + fmt(a.js_max) + ',' + std::to_string(a.n_covered_median) +
           ',' + std::to_string(a.n_covered_min) + ',' + std::to_string(a.n_covered_max) +
           ',' + fmt(a.none_median) + ',' + fmt(a.none_min) + ',' + fmt(a.none_max) + '\n';
  }
  return out;
}

std::string sweep_json(const SweepResult& result) {
  nlohmann::ordered_json j;
  j["runs"] = nlohmann::ordered_json::array();
  for (const SweepRunRow& r : result.runs) {
    j["runs"].push_back({{"formulation", r.formulation},
                         {"seed", r.seed},
                         {"diverged", r.diverged},
                         {"final_js", r.final_js},
                         {"final_n_covered", r.final_n_covered},
                         {"final_none_freq", r.final_none_freq}});
  }
  j["aggregates"] = nlohmann::ordered_json::array();
  for (const SweepAggregate& a : result.aggregates) {
    j["aggregates"].push_back({{"formulation", a.formulation},
                               {"js_median", a.js_median},
                               {"js_min", a.js_min},
                               {"js_max", a.js_max},
                               {"n_covered_median", a.n_covered_median},
                               {"n_covered_min", a.n_covered_min},
                               {"n_covered_max", a.n_covered_max},
                               {"none_freq_median", a.none_median},
                               {"none_freq_min", a.none_min},
                               {"none_freq_max", a.none_max}});
  }
  return j.dump(2) + "\n";
}

std::string scaling_factor_csv() {
  struct Col {
    const char* header;
    costs::CostFormulation form;
  };
  const std::vector<Col> cols = {
      {"MM", {costs::Variant::mm}},
      {"NS", {costs::Variant::ns}},
      {"HINGE", {costs::Variant::hinge}},
      {"LS", {costs::Variant::ls}},
      {"LINCOMB_NS_MM_a0.5", {costs::Variant::lincomb_ns_mm, 0.5}},
      {"NS_ADD_a0.5", {costs::Variant::ns_add, 0.5}},
      {"MM_NSAT_ADD_a0.5", {costs::Variant::mm_nsat_add, 0.5}},
      {"NS_EXP2", {costs::Variant::ns_exp2}},
      {"MM_NSAT_EXP2", {costs::Variant::mm_nsat_exp2}},
      {"NS_EXP_HALF", {costs::Variant::ns_exp_half}},
      {"MM_NSAT_EXP_HALF", {costs::Variant::mm_nsat_exp_half}},
  };
  std::string out = "d_p,logit";
  for (const Col& c : cols) out += std::string(",") + c.header;
  out += '\n';
  for (int i = 1; i < 512; ++i) {
    double p = static_cast<double>(i) / 512.0;
    double logit = std::log(p / (1.0 - p));
    out += fmt(p) + ',' + fmt(logit);
    for (const Col& c : cols) {
      out += ',';
      out += fmt(std::abs(costs::g_sample_coeff(c.form, logit)));
    }
    out += '\n';
  }
  return out;
}

std::string adam_curves_csv() {
  std::string out = "a,t,g_t,delta_mag,predicted\n";
  const long fit_start = 5000;
  for (double a : {-0.001, -0.0002, -0.02}) {
    optim::ScheduleSpec spec{a, 20000, 1.0, 0.99, 0.999, 1e-8};
    std::vector<double> mags = optim::simulate_schedule(spec);
    optim::AsymptoticPrediction pred = optim::approx_update_magnitude(spec, fit_start);
    double anchor = mags[fit_start - 1];
    for (long t = 1; t <= spec.horizon; ++t) {
      double predicted =
          anchor * std::exp(pred.log_slope * static_cast<double>(t - fit_start));
      out += fmt(a) + ',' + std::to_string(t) + ',' +
             fmt(std::exp(a * static_cast<double>(t))) + ',' + fmt(mags[t - 1]) + ',' +
             fmt(predicted) + '\n';
    }
  }
  return out;
}

std::string sample_dump_csv(const data::MixtureSpec& mix, const Matrix& samples) {
  if (samples.cols() != 2) throw std::invalid_argument("sample dump needs 2D samples");
  std::string out = "x,y,mode_id\n";
  for (std::size_t i = 0; i < samples.rows(); ++i) {
    int mode = metrics::assign_mode(mix, {samples(i, 0), samples(i, 1)});
    out += fmt(samples(i, 0)) + ',' + fmt(samples(i, 1)) + ',' + std::to_string(mode) + '\n';
  }
  return out;
}

std::string final_sample_dump_csv(const TrainingRecord& rec) {
  const RunConfig& c = rec.config;
  Matrix z = data::sample_noise({c.noise_dim}, c.eval_samples,
                                derive_seed(c.seed, kEvalModeNoise, rec.final_row().step));
  return sample_dump_csv(c.mixture(), nn::forward(rec.g_net, z).output());
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace ganlab::harness
