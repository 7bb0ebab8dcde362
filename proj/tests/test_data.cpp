#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "ganlab/data.hpp"

using namespace ganlab;
using data::MixtureSpec;

TEST_CASE("spec validation") {
  MixtureSpec s;
  s.centers = {{0.0, 0.0}, {1.0, 0.0}};
  s.stddev = 0.1;
  s.weights = {0.5, 0.5};
  CHECK_NOTHROW(s.validate());

  auto bad = s;
  bad.stddev = 0.0;
  CHECK_THROWS(bad.validate());
  bad = s;
  bad.weights = {0.5, 0.6};
  CHECK_THROWS(bad.validate());
  bad = s;
  bad.weights = {1.5, -0.5};
  CHECK_THROWS(bad.validate());
  bad = s;
  bad.weights = {0.5};
  CHECK_THROWS(bad.validate());
  bad = s;
  bad.centers = {{0.0, 0.0}, {0.0, 0.0}};
  CHECK_THROWS(bad.validate());
}

TEST_CASE("ring centers sit equally spaced on the circle") {
  auto s = data::ring_mixture(4, 1.0, 0.1);
  REQUIRE(s.n_modes() == 4);
  const double expect[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (int k = 0; k < 4; ++k) {
    CHECK(std::abs(s.centers[k][0] - expect[k][0]) < 1e-15);
    CHECK(std::abs(s.centers[k][1] - expect[k][1]) < 1e-15);
    CHECK(s.weights[k] == 0.25);
  }

  auto s8 = data::ring_mixture(8, 2.0, 0.02);
  double gap = 2.0 * 2.0 * std::sin(std::numbers::pi / 8.0);  // chord between neighbours
  for (int k = 0; k < 8; ++k) {
    double dx = s8.centers[k][0] - s8.centers[(k + 1) % 8][0];
    double dy = s8.centers[k][1] - s8.centers[(k + 1) % 8][1];
    CHECK(std::hypot(dx, dy) == doctest::Approx(gap).epsilon(1e-12));
  }

  CHECK_THROWS(data::ring_mixture(1, 1.0, 0.1));
  CHECK_THROWS(data::ring_mixture(8, -1.0, 0.1));
}

TEST_CASE("spiral weights ramp from lightest to heaviest") {
  auto s = data::spiral_mixture(12);
  REQUIRE(s.n_modes() == 12);
  double sum = 0.0;
  for (double w : s.weights) sum += w;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s.weights.back() / s.weights.front() == doctest::Approx(7.5).epsilon(1e-12));
  for (std::size_t i = 1; i < 12; ++i) CHECK(s.weights[i] > s.weights[i - 1]);

  // modes stay well separated relative to their spread
  for (std::size_t i = 0; i < 12; ++i) {
    for (std::size_t j = i + 1; j < 12; ++j) {
      double dx = s.centers[i][0] - s.centers[j][0];
      double dy = s.centers[i][1] - s.centers[j][1];
      CHECK(std::hypot(dx, dy) > 6.0 * s.stddev);
    }
  }

  // non-preset sizes keep the ramp shape
  auto s7 = data::spiral_mixture(7);
  double sum7 = 0.0;
  for (double w : s7.weights) sum7 += w;
  CHECK(sum7 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s7.weights.back() / s7.weights.front() == doctest::Approx(7.5).epsilon(1e-12));
}

TEST_CASE("presets") {
  auto ring = data::preset_mixture("ring8");
  CHECK(ring.n_modes() == 8);
  CHECK(ring.stddev == 0.02);
  auto spiral = data::preset_mixture("spiral12");
  CHECK(spiral.n_modes() == 12);
  CHECK(spiral.stddev == 0.15);
  CHECK_THROWS(data::preset_mixture("grid25"));
}

TEST_CASE("unit-box normalization rescales centers and spread together") {
  auto ring = data::preset_mixture("ring8");
  auto norm = data::normalized_to_unit_box(ring);
  // ring8 extent: radius 2 plus 3 sigma -> scale 1/2.06
  const double s = 1.0 / 2.06;
  CHECK(norm.stddev == doctest::Approx(0.02 * s));
  CHECK(norm.weights == ring.weights);
  double max_coord = 0.0;
  for (std::size_t k = 0; k < norm.n_modes(); ++k) {
    CHECK(norm.centers[k][0] == doctest::Approx(ring.centers[k][0] * s));
    CHECK(norm.centers[k][1] == doctest::Approx(ring.centers[k][1] * s));
    max_coord = std::max({max_coord, std::abs(norm.centers[k][0]),
                          std::abs(norm.centers[k][1])});
  }
  CHECK(max_coord + 3.0 * norm.stddev == doctest::Approx(1.0));
  // idempotent up to the fixed margin: already-normalized input keeps scale 1
  auto again = data::normalized_to_unit_box(norm);
  CHECK(again.stddev == doctest::Approx(norm.stddev));
}

TEST_CASE("real samples are deterministic per seed") {
  auto spec = data::preset_mixture("ring8");
  auto a = data::sample_real(spec, 64, 7);
  auto b = data::sample_real(spec, 64, 7);
  auto c = data::sample_real(spec, 64, 8);
  CHECK(a.modes == b.modes);
  bool same = true, diff = false;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    same = same && a.points.data()[i] == b.points.data()[i];
    diff = diff || a.points.data()[i] != c.points.data()[i];
  }
  CHECK(same);
  CHECK(diff);
}

TEST_CASE("mode frequencies follow the weights") {
  auto spec = data::preset_mixture("ring8");
  const std::size_t n = 100000;
  auto batch = data::sample_real(spec, n, 123);
  std::vector<double> count(8, 0.0);
  for (int m : batch.modes) {
    REQUIRE(m >= 0);
    REQUIRE(m < 8);
    count[m] += 1.0;
  }
  // chi-squared against uniform: 7 dof, 24.32 is the p=0.001 cutoff
  double chi2 = 0.0;
  const double expect = n / 8.0;
  for (double c : count) chi2 += (c - expect) * (c - expect) / expect;
  CHECK(chi2 < 24.32);

  // graded spiral: the heaviest mode should dominate the lightest clearly
  auto sp = data::preset_mixture("spiral12");
  auto sb = data::sample_real(sp, n, 321);
  std::vector<double> sc(12, 0.0);
  for (int m : sb.modes) sc[m] += 1.0;
  CHECK(sc[11] / n == doctest::Approx(sp.weights[11]).epsilon(0.05));
  CHECK(sc[0] / n == doctest::Approx(sp.weights[0]).epsilon(0.12));
}

TEST_CASE("vanishing spread collapses samples onto the centers") {
  auto spec = data::ring_mixture(8, 2.0, 1e-12);
  auto batch = data::sample_real(spec, 256, 5);
  for (std::size_t i = 0; i < 256; ++i) {
    auto c = spec.centers[batch.modes[i]];
    CHECK(std::abs(batch.points(i, 0) - c[0]) < 1e-10);
    CHECK(std::abs(batch.points(i, 1) - c[1]) < 1e-10);
  }
}

TEST_CASE("density: peak value and normalization") {
  MixtureSpec one;
  one.centers = {{0.3, -0.7}};
  one.stddev = 0.5;
  one.weights = {1.0};
  CHECK(data::mixture_density(one, {0.3, -0.7}) ==
        doctest::Approx(1.0 / (2.0 * std::numbers::pi * 0.25)).epsilon(1e-14));
  CHECK(data::mixture_density(one, {100.0, 100.0}) == 0.0);  // underflows cleanly

  MixtureSpec two;
  two.centers = {{-1.0, 0.0}, {1.5, 0.5}};
  two.stddev = 0.5;
  two.weights = {0.3, 0.7};
  double integral = 0.0;
  const int grid = 300;
  const double lo = -4.0, hi = 5.0, dx = (hi - lo) / grid;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      integral += data::mixture_density(
          two, {lo + (i + 0.5) * dx, lo + (j + 0.5) * dx});
    }
  }
  integral *= dx * dx;
  CHECK(integral == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("noise batches: moments and determinism") {
  data::NoiseSpec spec{2};
  auto a = data::sample_noise(spec, 1000, 99);
  auto b = data::sample_noise(spec, 1000, 99);
  bool same = true;
  for (std::size_t i = 0; i < a.size(); ++i) same = same && a.data()[i] == b.data()[i];
  CHECK(same);

  auto big = data::sample_noise(spec, 1000000, 3);
  for (std::size_t j = 0; j < 2; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < big.rows(); ++i) mean += big(i, j);
    mean /= static_cast<double>(big.rows());
    CHECK(std::abs(mean) < 0.01);
    double var = 0.0;
    for (std::size_t i = 0; i < big.rows(); ++i) var += (big(i, j) - mean) * (big(i, j) - mean);
    var /= static_cast<double>(big.rows() - 1);
    CHECK(std::abs(var - 1.0) < 0.01);
  }

  CHECK_THROWS(data::sample_noise(data::NoiseSpec{0}, 10, 1));
  CHECK_THROWS(data::sample_noise(spec, 0, 1));
}
