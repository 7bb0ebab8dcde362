#include "ganlab/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace ganlab::metrics {

int assign_mode(const data::MixtureSpec& spec, std::array<double, 2> x) {
  int best = kNoMode;
  double best_d2 = 0.0;
  for (std::size_t k = 0; k < spec.centers.size(); ++k) {
    double dx = x[0] - spec.centers[k][0];
    double dy = x[1] - spec.centers[k][1];
    double d2 = dx * dx + dy * dy;
    if (best == kNoMode || d2 < best_d2) {  // strict: ties keep the lower index
      best = static_cast<int>(k);
      best_d2 = d2;
    }
  }
  const double limit = 3.0 * spec.stddev;
  if (best_d2 > limit * limit) return kNoMode;
  return best;
}

ModeReport mode_frequencies(const data::MixtureSpec& spec, const Matrix& samples,
                            double coverage_threshold) {
  if (samples.rows() == 0) throw std::invalid_argument("mode_frequencies: empty sample set");
  if (samples.cols() != 2) throw std::invalid_argument("mode_frequencies: samples must be 2D");
  const std::size_t k_modes = spec.n_modes();
  std::vector<std::size_t> counts(k_modes, 0);
  std::size_t none = 0;
  for (std::size_t i = 0; i < samples.rows(); ++i) {
    int k = assign_mode(spec, {samples(i, 0), samples(i, 1)});
    if (k == kNoMode) {
      ++none;
    } else {
      ++counts[static_cast<std::size_t>(k)];
    }
  }
  const double n = static_cast<double>(samples.rows());
  ModeReport report;
  report.per_mode_freq.reserve(k_modes);
  for (std::size_t k = 0; k < k_modes; ++k) {
    double f = static_cast<double>(counts[k]) / n;
    report.per_mode_freq.push_back(f);
    if (f >= coverage_threshold) ++report.n_covered;
  }
  report.none_freq = static_cast<double>(none) / n;

  const std::size_t assigned = samples.rows() - none;
  if (assigned == 0) {
    report.js_to_data = 1.0;
    return report;
  }
  std::vector<double> q(k_modes);
  for (std::size_t k = 0; k < k_modes; ++k) {
    q[k] = static_cast<double>(counts[k]) / static_cast<double>(assigned);
  }
  report.js_to_data = js_divergence(spec.weights, q);
  return report;
}

namespace {

// KL(p || m) with base-2 logs and 0 log 0 = 0
double kl2(std::span<const double> p, std::span<const double> m) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) s += p[i] * std::log2(p[i] / m[i]);
  }
  return s;
}

}  // namespace

double js_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("js_divergence: length mismatch");
  if (p.empty()) throw std::invalid_argument("js_divergence: empty distributions");
  double sp = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0.0 || q[i] < 0.0) throw std::invalid_argument("js_divergence: negative mass");
    sp += p[i];
    sq += q[i];
  }
  if (std::abs(sp - 1.0) > 1e-8 || std::abs(sq - 1.0) > 1e-8) {
    throw std::invalid_argument("js_divergence: inputs must sum to 1");
  }
  std::vector<double> m(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) m[i] = 0.5 * (p[i] + q[i]);
  double js = 0.5 * kl2(p, m) + 0.5 * kl2(q, m);
  if (js < 0.0) js = 0.0;  // guard fp wiggle at p == q
  if (js > 1.0) js = 1.0;
  return js;
}

double optimal_disc(const data::MixtureSpec& real_spec, const data::MixtureSpec& fake_spec,
                    std::array<double, 2> x) {
  double r = data::mixture_density(real_spec, x);
  double g = data::mixture_density(fake_spec, x);
  if (r + g <= 0.0) {
    throw std::domain_error("optimal_disc: both densities underflowed at this point");
  }
  return r / (r + g);
}

GradDiagnostics grad_diagnostics(const nn::ParamGradient& a, const nn::ParamGradient& b) {
  double na = a.two_norm();
  double nb = b.two_norm();
  if (na == 0.0 && nb == 0.0) throw std::invalid_argument("grad_diagnostics: both gradients zero");
  GradDiagnostics d;
  d.norm_ratio = na / nb;
  d.cosine = (na == 0.0 || nb == 0.0) ? 0.0 : nn::dot(a, b) / (na * nb);
  return d;
}

}  // namespace ganlab::metrics
