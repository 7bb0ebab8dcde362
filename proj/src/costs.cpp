#include "ganlab/costs.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace ganlab::costs {

namespace {

struct VariantInfo {
  Variant variant;
  const char* name;
  bool uses_a;
};

constexpr VariantInfo kVariants[] = {
    {Variant::mm, "MM", false},
    {Variant::ns, "NS", false},
    {Variant::mm_nsat, "MM_NSAT", false},
    {Variant::mm_unit, "MM_UNIT", false},
    {Variant::ns_unit, "NS_UNIT", false},
    {Variant::hinge, "HINGE", false},
    {Variant::ls, "LS", false},
    {Variant::lincomb_ns_mm, "LINCOMB_NS_MM", true},
    {Variant::lincomb_ns_mmnsat, "LINCOMB_NS_MMNSAT", true},
    {Variant::ns_add, "NS_ADD", true},
    {Variant::mm_nsat_add, "MM_NSAT_ADD", true},
    {Variant::ns_exp2, "NS_EXP2", false},
    {Variant::mm_nsat_exp2, "MM_NSAT_EXP2", false},
    {Variant::ns_exp_half, "NS_EXP_HALF", false},
    {Variant::mm_nsat_exp_half, "MM_NSAT_EXP_HALF", false},
};

const VariantInfo& info(Variant v) {
  for (const auto& vi : kVariants) {
    if (vi.variant == v) return vi;
  }
  throw std::logic_error("bad variant enum");
}

}  // namespace

void CostFormulation::validate() const {
  if (eps_r < 0.0) throw std::invalid_argument("eps_r must be >= 0");
  if (!std::isfinite(a)) throw std::invalid_argument("a must be finite");
  switch (variant) {
    case Variant::lincomb_ns_mm:
    case Variant::lincomb_ns_mmnsat:
      if (a < 0.0 || a > 1.0) throw std::invalid_argument("LINCOMB weight a must be in [0,1]");
      break;
    case Variant::ns_add:
    case Variant::mm_nsat_add:
      if (a < 0.0) throw std::invalid_argument("ADD offset a must be >= 0");
      break;
    default:
      break;
  }
}

std::string CostFormulation::name() const { return info(variant).name; }

bool CostFormulation::uses_a() const { return info(variant).uses_a; }

CostFormulation CostFormulation::from_name(const std::string& name, double a, double eps_r) {
  for (const auto& vi : kVariants) {
    if (name == vi.name) {
      CostFormulation f{vi.variant, a, eps_r};
      f.validate();
      return f;
    }
  }
  throw std::invalid_argument("unknown cost formulation: " + name);
}

std::vector<std::string> all_variant_names() {
  std::vector<std::string> names;
  for (const auto& vi : kVariants) names.emplace_back(vi.name);
  return names;
}

double sigmoid(double logit) {
  if (logit >= 0.0) {
    return 1.0 / (1.0 + std::exp(-logit));
  }
  double e = std::exp(logit);
  return e / (1.0 + e);
}

double softplus(double x) {
  // log(1+exp(x)) = max(x,0) + log1p(exp(-|x|))
  return (x > 0.0 ? x : 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double log_sigmoid(double logit) { return -softplus(-logit); }

DiscSignals DiscSignals::from_logits(std::vector<double> real, std::vector<double> fake) {
  DiscSignals s;
  s.logits_real = std::move(real);
  s.logits_fake = std::move(fake);
  s.probs_real.reserve(s.logits_real.size());
  for (double l : s.logits_real) s.probs_real.push_back(sigmoid(l));
  s.probs_fake.reserve(s.logits_fake.size());
  double sum = 0.0;
  for (double l : s.logits_fake) {
    s.probs_fake.push_back(sigmoid(l));
    sum += s.probs_fake.back();
  }
  s.mean_fake_prob = s.probs_fake.empty() ? 0.0 : sum / static_cast<double>(s.probs_fake.size());
  return s;
}

DLogitCoeffs d_logit_coeffs(const CostFormulation& form, const DiscSignals& signals) {
  if (signals.logits_real.empty() || signals.logits_fake.empty()) {
    throw std::invalid_argument("d_logit_coeffs needs nonempty real and fake batches");
  }
  DLogitCoeffs out;
  out.real.reserve(signals.logits_real.size());
  out.fake.reserve(signals.logits_fake.size());
  switch (form.variant) {
    case Variant::hinge:
      for (double l : signals.logits_real) {
        out.real.push_back(l < 1.0 ? -1.0 : 0.0);
        out.loss += l < 1.0 ? 1.0 - l : 0.0;
      }
      for (double l : signals.logits_fake) {
        out.fake.push_back(l > -1.0 ? 1.0 : 0.0);
        out.loss += l > -1.0 ? 1.0 + l : 0.0;
      }
      break;
    case Variant::ls:
      for (double l : signals.logits_real) {
        out.real.push_back(l - 1.0);
        out.loss += 0.5 * (l - 1.0) * (l - 1.0);
      }
      for (double l : signals.logits_fake) {
        out.fake.push_back(l);
        out.loss += 0.5 * l * l;
      }
      break;
    default:
      // cross-entropy for the whole MM/NS family
      for (double l : signals.logits_real) {
        out.real.push_back(-sigmoid(-l));
        out.loss += softplus(-l);
      }
      for (double l : signals.logits_fake) {
        out.fake.push_back(sigmoid(l));
        out.loss += softplus(l);
      }
      break;
  }
  return out;
}

double g_sample_coeff(const CostFormulation& form, double fake_logit) {
  const double l = fake_logit;
  switch (form.variant) {
    case Variant::mm:
    case Variant::mm_nsat:
    case Variant::mm_unit:
      return -sigmoid(l);
    case Variant::ns:
    case Variant::ns_unit:
      return -sigmoid(-l);
    case Variant::hinge:
      return -1.0;
    case Variant::ls:
      return l - 1.0;
    case Variant::lincomb_ns_mm:
    case Variant::lincomb_ns_mmnsat:
      return (1.0 - form.a) * -sigmoid(-l) + form.a * -sigmoid(l);
    case Variant::ns_add:
      return -(sigmoid(-l) + form.a);
    case Variant::mm_nsat_add:
      return -(sigmoid(l) + form.a);
    case Variant::ns_exp2: {
      double q = sigmoid(-l);
      return -q * q;
    }
    case Variant::mm_nsat_exp2: {
      double p = sigmoid(l);
      return -p * p;
    }
    case Variant::ns_exp_half:
      return -std::exp(0.5 * log_sigmoid(-l));
    case Variant::mm_nsat_exp_half:
      return -std::exp(0.5 * log_sigmoid(l));
  }
  throw std::logic_error("bad variant enum");
}

double g_sample_cost(const CostFormulation& form, double fake_logit) {
  const double l = fake_logit;
  switch (form.variant) {
    case Variant::mm:
    case Variant::mm_nsat:
    case Variant::mm_unit:
      return -softplus(l);  // log(1 - D_p)
    case Variant::ns:
    case Variant::ns_unit:
      return softplus(-l);  // -log D_p
    case Variant::hinge:
      return -l;
    case Variant::ls:
      return 0.5 * (l - 1.0) * (l - 1.0);
    case Variant::lincomb_ns_mm:
    case Variant::lincomb_ns_mmnsat:
      return (1.0 - form.a) * softplus(-l) + form.a * -softplus(l);
    case Variant::ns_add:
      return softplus(-l) - form.a * l;
    case Variant::mm_nsat_add:
      return -softplus(l) - form.a * l;
    case Variant::ns_exp2:
      return softplus(-l) + sigmoid(l);
    case Variant::mm_nsat_exp2:
      return -softplus(l) + sigmoid(l);
    case Variant::ns_exp_half: {
      // d/dl [2 log(1+u) + softplus(-l)] = -u with u = sqrt(1 - D_p)
      double u = std::exp(0.5 * log_sigmoid(-l));
      return 2.0 * std::log1p(u) + softplus(-l);
    }
    case Variant::mm_nsat_exp_half: {
      double w = std::exp(0.5 * log_sigmoid(l));
      return -(2.0 * std::log1p(w) + softplus(l));
    }
  }
  throw std::logic_error("bad variant enum");
}

RescaleFactor batch_rescale(const CostFormulation& form, const DiscSignals& signals,
                            double raw_grad_norm, double n_params) {
  if (signals.logits_fake.empty()) throw std::invalid_argument("batch_rescale: empty fake batch");
  const double mean = signals.mean_fake_prob;
  const double eps = form.eps_r;
  switch (form.variant) {
    case Variant::mm_nsat:
    case Variant::lincomb_ns_mmnsat:
      return {(1.0 - mean) / (eps + mean), RescaleRule::mean_prob_ratio};
    case Variant::mm_unit:
    case Variant::ns_unit:
      if (n_params <= 0.0) throw std::invalid_argument("unit rescale needs n_params");
      return {n_params / (eps + raw_grad_norm), RescaleRule::unit_norm};
    case Variant::ns_add:
      return {(1.0 - mean) / (eps + form.a + (1.0 - mean)), RescaleRule::variant_specific};
    case Variant::mm_nsat_add:
      return {(1.0 - mean) / (eps + form.a + mean), RescaleRule::variant_specific};
    case Variant::ns_exp2:
      return {1.0 / (eps + (1.0 - mean)), RescaleRule::variant_specific};
    case Variant::mm_nsat_exp2:
      return {(1.0 - mean) / (eps + mean * mean), RescaleRule::variant_specific};
    case Variant::ns_exp_half:
      return {std::sqrt(1.0 - mean), RescaleRule::variant_specific};
    case Variant::mm_nsat_exp_half:
      return {(1.0 - mean) / (eps + std::sqrt(mean)), RescaleRule::variant_specific};
    default:
      return {1.0, RescaleRule::identity};
  }
}

GBatchResult g_batch_gradient(const CostFormulation& form, const nn::DenseNet& g,
                              const nn::DenseNet& d, const Matrix& noise) {
  form.validate();

  // LINCOMB endpoints delegate so a=0 / a=1 reproduce the members bit-exactly.
  if (form.variant == Variant::lincomb_ns_mmnsat) {
    if (form.a == 0.0) {
      CostFormulation ns{Variant::ns, 0.0, form.eps_r};
      GBatchResult r = g_batch_gradient(ns, g, d, noise);
      r.rescale.rule = RescaleRule::identity;
      return r;
    }
    if (form.a == 1.0) {
      CostFormulation nsat{Variant::mm_nsat, 0.0, form.eps_r};
      return g_batch_gradient(nsat, g, d, noise);
    }
  }

  GBatchResult out;
  nn::ForwardCache g_cache = nn::forward(g, noise);
  nn::ForwardCache d_cache = nn::forward(d, g_cache.output());
  if (d.out_dim() != 1) throw std::invalid_argument("discriminator must emit one logit");

  const std::size_t n = noise.rows();
  std::vector<double> logits(n);
  for (std::size_t i = 0; i < n; ++i) logits[i] = d_cache.output()(i, 0);
  out.signals = DiscSignals::from_logits({}, std::move(logits));

  if (form.variant == Variant::lincomb_ns_mmnsat) {
    // (1-a) * NS gradient + a * R * MM gradient, with R from the MM member's
    // mean-prob rule. R is constant across the batch, so both members fold
    // into one effective per-sample coefficient and one backward pass.
    CostFormulation ns{Variant::ns, 0.0, form.eps_r};
    CostFormulation mm{Variant::mm, 0.0, form.eps_r};
    RescaleFactor member = batch_rescale(form, out.signals);
    Matrix coeffs(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
      double li = out.signals.logits_fake[i];
      coeffs(i, 0) = (1.0 - form.a) * g_sample_coeff(ns, li) +
                     form.a * member.r * g_sample_coeff(mm, li);
      out.loss += (1.0 - form.a) * g_sample_cost(ns, li) +
                  form.a * member.r * g_sample_cost(mm, li);
    }
    out.grad = nn::chained_generator_gradient(g, g_cache, d, d_cache, coeffs);
    out.rescale = member;
    return out;
  }

  Matrix coeffs(n, 1);
  double raw_loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double li = out.signals.logits_fake[i];
    coeffs(i, 0) = g_sample_coeff(form, li);
    raw_loss += g_sample_cost(form, li);
  }
  out.grad = nn::chained_generator_gradient(g, g_cache, d, d_cache, coeffs);
  out.rescale = batch_rescale(form, out.signals, out.grad.two_norm(),
                              static_cast<double>(out.grad.n_params()));
  if (out.rescale.r != 1.0) out.grad.scale_all(out.rescale.r);
  out.loss = out.rescale.r * raw_loss;
  return out;
}

std::vector<double> importance_weights(std::span<const double> fake_probs, double eps_r) {
  const double cap = eps_r > 0.0 ? 1.0 / eps_r : std::numeric_limits<double>::infinity();
  std::vector<double> w;
  w.reserve(fake_probs.size());
  for (double p : fake_probs) {
    double odds = p / (1.0 - p);
    w.push_back(odds < cap ? odds : cap);
  }
  return w;
}

}  // namespace ganlab::costs
