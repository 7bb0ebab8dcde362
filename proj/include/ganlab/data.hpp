#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ganlab/matrix.hpp"

namespace ganlab::data {

// Isotropic 2D Gaussian mixture.
struct MixtureSpec {
  std::vector<std::array<double, 2>> centers;
  double stddev = 0.0;
  std::vector<double> weights;  // sums to 1

  std::size_t n_modes() const { return centers.size(); }
  void validate() const;
};

struct NoiseSpec {
  std::size_t dim = 8;  // standard normal per component
};

// n_modes equally spaced centers on a circle, equal weights.
MixtureSpec ring_mixture(std::size_t n_modes, double radius, double stddev);

// Centers along an expanding spiral (radius r0 + dr*i, angle omega*i, with
// omega spanning a bit over two revolutions), weights increasing along the
// spiral. The 12-mode preset uses the graded profile 2.0% .. 15%
// (normalized); other n get a linear 1 : 7.5 ramp.
MixtureSpec spiral_mixture(std::size_t n_modes, double r0 = 1.0, double dr = 0.4,
                           double stddev = 0.15);

// Named presets used by the harness config ("ring8", "spiral12").
MixtureSpec preset_mixture(const std::string& name);

// Uniformly rescaled copy: centers and stddev shrunk so the mixture fits
// inside [-1,1]^2 with a 3-sigma margin (largest |coordinate| + 3 std maps
// to 1). Matches a tanh output layer on the generator. Mode-frequency
// metrics are scale-invariant, so reported coverage is unaffected.
MixtureSpec normalized_to_unit_box(const MixtureSpec& spec);

struct RealBatch {
  Matrix points;           // n x 2
  std::vector<int> modes;  // generating mode per row
};

// i.i.d. draws: categorical mode, then Gaussian around its center.
// Deterministic per seed; callers derive per-purpose seeds (see rng.hpp).
RealBatch sample_real(const MixtureSpec& spec, std::size_t n, std::uint64_t seed);

// Exact density sum_k w_k N(x; c_k, std^2 I).
double mixture_density(const MixtureSpec& spec, std::array<double, 2> x);

// n x dim standard normal draws, deterministic per seed.
Matrix sample_noise(const NoiseSpec& spec, std::size_t n, std::uint64_t seed);

}  // namespace ganlab::data
