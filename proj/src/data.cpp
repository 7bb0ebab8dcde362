#include "ganlab/data.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ganlab/rng.hpp"

namespace ganlab::data {

void MixtureSpec::validate() const {
  if (centers.empty()) throw std::invalid_argument("mixture needs at least one mode");
  if (!(stddev > 0.0)) throw std::invalid_argument("mixture stddev must be > 0");
  if (weights.size() != centers.size()) {
    throw std::invalid_argument("weights/centers length mismatch");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("negative mixture weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("mixture weights must sum to 1");
  for (std::size_t i = 0; i < centers.size(); ++i) {
    for (std::size_t j = i + 1; j < centers.size(); ++j) {
      if (centers[i] == centers[j]) throw std::invalid_argument("duplicate mixture centers");
    }
  }
}

MixtureSpec ring_mixture(std::size_t n_modes, double radius, double stddev) {
  if (n_modes < 2) throw std::invalid_argument("ring needs >= 2 modes");
  if (!(radius > 0.0)) throw std::invalid_argument("ring radius must be > 0");
  if (!(stddev > 0.0)) throw std::invalid_argument("ring stddev must be > 0");
  MixtureSpec spec;
  spec.stddev = stddev;
  for (std::size_t k = 0; k < n_modes; ++k) {
    double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_modes);
    spec.centers.push_back({radius * std::cos(angle), radius * std::sin(angle)});
    spec.weights.push_back(1.0 / static_cast<double>(n_modes));
  }
  spec.validate();
  return spec;
}

MixtureSpec spiral_mixture(std::size_t n_modes, double r0, double dr, double stddev) {
  if (n_modes < 2) throw std::invalid_argument("spiral needs >= 2 modes");
  if (!(r0 > 0.0) || !(dr > 0.0) || !(stddev > 0.0)) {
    throw std::invalid_argument("spiral parameters must be > 0");
  }
  MixtureSpec spec;
  spec.stddev = stddev;
  // 2.3 revolutions across the modes; with the default dr the winding gap
  // stays far above 6*stddev, keeping mode assignment unambiguous.
  const double omega = 2.3 * 2.0 * std::numbers::pi / static_cast<double>(n_modes - 1);
  for (std::size_t i = 0; i < n_modes; ++i) {
    double r = r0 + dr * static_cast<double>(i);
    double angle = omega * static_cast<double>(i);
    spec.centers.push_back({r * std::cos(angle), r * std::sin(angle)});
  }
  if (n_modes == 12) {
    // graded density profile, lightest to heaviest (percent, normalized below)
    const double profile[12] = {2.0, 3.1, 4.3, 5.4, 6.6, 7.7, 8.9, 10.0, 11.0, 12.0, 13.0, 15.0};
    double sum = 0.0;
    for (double p : profile) sum += p;
    for (double p : profile) spec.weights.push_back(p / sum);
  } else {
    // linear ramp with the same 1 : 7.5 extremes
    double sum = 0.0;
    std::vector<double> raw(n_modes);
    for (std::size_t i = 0; i < n_modes; ++i) {
      raw[i] = 1.0 + 6.5 * static_cast<double>(i) / static_cast<double>(n_modes - 1);
      sum += raw[i];
    }
    for (double w : raw) spec.weights.push_back(w / sum);
  }
  spec.validate();
  return spec;
}

MixtureSpec preset_mixture(const std::string& name) {
  if (name == "ring8") return ring_mixture(8, 2.0, 0.02);
  if (name == "spiral12") return spiral_mixture(12);
  throw std::invalid_argument("unknown dataset preset: " + name);
}

MixtureSpec normalized_to_unit_box(const MixtureSpec& spec) {
  spec.validate();
  double extent = 0.0;
  for (const auto& c : spec.centers) {
    extent = std::max({extent, std::abs(c[0]), std::abs(c[1])});
  }
  extent += 3.0 * spec.stddev;
  if (extent <= 0.0) throw std::invalid_argument("mixture has no extent to normalize");
  const double s = 1.0 / extent;
  MixtureSpec out = spec;
  for (auto& c : out.centers) {
    c[0] *= s;
    c[1] *= s;
  }
  out.stddev *= s;
  out.validate();
  return out;
}

RealBatch sample_real(const MixtureSpec& spec, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("need n >= 1");
  spec.validate();
  RngStream rng(seed);
  RealBatch batch;
  batch.points = Matrix(n, 2);
  batch.modes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double u = rng.uniform();
    std::size_t k = 0;
    double acc = spec.weights[0];
    while (k + 1 < spec.weights.size() && u >= acc) acc += spec.weights[++k];
    batch.modes[i] = static_cast<int>(k);
    batch.points(i, 0) = spec.centers[k][0] + spec.stddev * rng.normal();
    batch.points(i, 1) = spec.centers[k][1] + spec.stddev * rng.normal();
  }
  return batch;
}

double mixture_density(const MixtureSpec& spec, std::array<double, 2> x) {
  const double inv_two_var = 1.0 / (2.0 * spec.stddev * spec.stddev);
  const double norm = 1.0 / (2.0 * std::numbers::pi * spec.stddev * spec.stddev);
  double density = 0.0;
  for (std::size_t k = 0; k < spec.centers.size(); ++k) {
    double dx = x[0] - spec.centers[k][0];
    double dy = x[1] - spec.centers[k][1];
    density += spec.weights[k] * norm * std::exp(-(dx * dx + dy * dy) * inv_two_var);
  }
  return density;
}

Matrix sample_noise(const NoiseSpec& spec, std::size_t n, std::uint64_t seed) {
  if (spec.dim < 1) throw std::invalid_argument("noise dim must be >= 1");
  if (n < 1) throw std::invalid_argument("need n >= 1");
  RngStream rng(seed);
  Matrix z(n, spec.dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < spec.dim; ++j) z(i, j) = rng.normal();
  }
  return z;
}

}  // namespace ganlab::data
