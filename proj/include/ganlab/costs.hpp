#pragma once

#include <span>
#include <string>
#include <vector>

#include "ganlab/matrix.hpp"
#include "ganlab/nn.hpp"

namespace ganlab::costs {

// Generator cost variants. The *_NSAT / *_UNIT / *_ADD / *_EXP* members keep
// a per-sample weighting and restore the batch gradient magnitude with a
// whole-batch rescale factor; see batch_rescale().
enum class Variant {
  mm,                  // minimax: per-sample factor D_p
  ns,                  // non-saturating: factor 1-D_p
  mm_nsat,             // minimax weighting, batch rescaled by (1-mean)/(eps+mean)
  mm_unit,             // minimax weighting, batch gradient renormed to ~N_theta
  ns_unit,             // NS weighting, same renorm
  hinge,               // clipped-linear D, linear G
  ls,                  // quadratic (least-squares) costs
  lincomb_ns_mm,       // (1-a)*NS + a*MM, no rescale
  lincomb_ns_mmnsat,   // (1-a)*NS + a*MM_NSAT (member rescale folded in)
  ns_add,              // factor (1-D_p)+a, rescale restores NS magnitude
  mm_nsat_add,         // factor D_p+a, likewise
  ns_exp2,             // factor (1-D_p)^2
  mm_nsat_exp2,        // factor D_p^2
  ns_exp_half,         // factor (1-D_p)^(1/2)
  mm_nsat_exp_half,    // factor D_p^(1/2)
};

struct CostFormulation {
  Variant variant = Variant::mm_nsat;
  double a = 0.0;       // weight (LINCOMB_*) or offset (*_ADD)
  double eps_r = 1e-8;  // rescale stabilizer; caps R at 1/eps_r style bounds

  // LINCOMB needs a in [0,1], ADD needs a >= 0, eps_r >= 0 always.
  // (eps_r = 0 is allowed so exact-identity checks can disable the cap.)
  void validate() const;
  std::string name() const;
  bool uses_a() const;

  static CostFormulation from_name(const std::string& name, double a = 0.0,
                                   double eps_r = 1e-8);
};

std::vector<std::string> all_variant_names();

double sigmoid(double logit);      // stable for large |logit|, no overflow
double log_sigmoid(double logit);  // log(sigmoid(logit)), stable
double softplus(double x);         // log(1+exp(x)), stable

// Discriminator outputs for one batch, logits plus derived probabilities.
struct DiscSignals {
  std::vector<double> logits_real;
  std::vector<double> logits_fake;
  std::vector<double> probs_real;
  std::vector<double> probs_fake;
  double mean_fake_prob = 0.0;

  static DiscSignals from_logits(std::vector<double> real, std::vector<double> fake);
};

// Per-logit derivatives of the discriminator loss (batch sum form) plus the
// loss value. Cross-entropy for every MM/NS-family variant; HINGE and LS use
// their own costs.
struct DLogitCoeffs {
  std::vector<double> real;
  std::vector<double> fake;
  double loss = 0.0;
};

DLogitCoeffs d_logit_coeffs(const CostFormulation& form, const DiscSignals& signals);

// Per-sample generator coefficient c = dJ_G/d(logit). The G parameter
// gradient is R * sum_i c_i * d(logit_i)/d(theta).
double g_sample_coeff(const CostFormulation& form, double fake_logit);

// Antiderivative of g_sample_coeff in the logit: the per-sample G cost.
// Used by finite-difference oracles and for loss reporting.
double g_sample_cost(const CostFormulation& form, double fake_logit);

enum class RescaleRule { identity, mean_prob_ratio, unit_norm, variant_specific };

struct RescaleFactor {
  double r = 1.0;
  RescaleRule rule = RescaleRule::identity;
};

// Whole-batch rescale factor. raw_grad_norm and n_params are only consulted
// by the unit-norm rule (R = n_params / (eps_r + raw_grad_norm)).
// For LINCOMB_NS_MMNSAT this returns the factor applied to the MM member.
RescaleFactor batch_rescale(const CostFormulation& form, const DiscSignals& signals,
                            double raw_grad_norm = 0.0, double n_params = 0.0);

struct GBatchResult {
  nn::ParamGradient grad;   // rescaled batch gradient (sum over samples)
  RescaleFactor rescale;
  DiscSignals signals;      // fake side only
  double loss = 0.0;        // batch cost consistent with grad (R held constant)
};

// Full generator gradient for one noise batch: forward g, forward d, apply
// per-sample coefficients, backpropagate, then multiply the summed gradient
// by R. No derivative flows through R (stop-gradient).
GBatchResult g_batch_gradient(const CostFormulation& form, const nn::DenseNet& g,
                              const nn::DenseNet& d, const Matrix& noise);

// w_i = p_i/(1-p_i), clamped at 1/eps_r. Reweights NS per-sample gradients
// back to minimax sample emphasis.
std::vector<double> importance_weights(std::span<const double> fake_probs,
                                       double eps_r = 1e-8);

}  // namespace ganlab::costs
