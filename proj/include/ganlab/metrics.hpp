#pragma once

#include <array>
#include <span>
#include <vector>

#include "ganlab/data.hpp"
#include "ganlab/matrix.hpp"
#include "ganlab/nn.hpp"

namespace ganlab::metrics {

inline constexpr int kNoMode = -1;

// Nearest center if within 3 standard deviations, else kNoMode.
// Ties go to the lowest mode index.
int assign_mode(const data::MixtureSpec& spec, std::array<double, 2> x);

struct ModeReport {
  std::vector<double> per_mode_freq;  // fractions of all samples
  double none_freq = 0.0;             // fraction beyond 3 sigma of every mode
  int n_covered = 0;                  // modes with raw freq >= threshold
  double js_to_data = 0.0;            // normalized divergence in [0,1]
};

// Assignment frequencies over the sample rows plus the divergence between
// the assigned-mode distribution (NONE excluded, renormalized) and the spec
// weights. With zero assigned samples js_to_data is 1 (total collapse off
// the modes).
ModeReport mode_frequencies(const data::MixtureSpec& spec, const Matrix& samples,
                            double coverage_threshold = 0.02);

// Jensen-Shannon divergence with base-2 logarithms, so the value lies in
// [0,1]. 0*log(0) is 0. Throws on length mismatch or non-distributions.
double js_divergence(std::span<const double> p, std::span<const double> q);

// D_p(x) of the density-ratio optimal discriminator r/(r+g).
double optimal_disc(const data::MixtureSpec& real_spec, const data::MixtureSpec& fake_spec,
                    std::array<double, 2> x);

struct GradDiagnostics {
  double cosine = 0.0;      // of the flattened gradients
  double norm_ratio = 0.0;  // |a| / |b|
};

// Throws if both gradients are zero; with exactly one zero the cosine is
// reported as 0 and the ratio is the IEEE quotient (0 or inf).
GradDiagnostics grad_diagnostics(const nn::ParamGradient& a, const nn::ParamGradient& b);

}  // namespace ganlab::metrics
