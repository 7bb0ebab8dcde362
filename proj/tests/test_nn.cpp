#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "ganlab/nn.hpp"
#include "ganlab/rng.hpp"

using namespace ganlab;
using nn::Activation;

namespace {

Matrix random_matrix(RngStream& rng, std::size_t r, std::size_t c, double s = 1.0) {
  Matrix m(r, c);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-s, s);
  return m;
}

// dJ/d(out) for J = sum_ij C_ij * out_ij is just C
double weighted_sum(const Matrix& c, const Matrix& out) {
  double j = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) j += c.data()[i] * out.data()[i];
  return j;
}

}  // namespace

TEST_CASE("parameter count and flat round-trip") {
  auto net = nn::init_net({2, 16, 16, 1}, Activation::relu, Activation::identity, 1);
  CHECK(net.n_params() == 337);  // 2*16+16 + 16*16+16 + 16*1+1

  auto flat = net.flat_params();
  REQUIRE(flat.size() == 337);
  auto net2 = nn::init_net({2, 16, 16, 1}, Activation::relu, Activation::identity, 99);
  net2.set_flat_params(flat);
  CHECK(net2.flat_params() == flat);

  std::vector<double> wrong(5, 0.0);
  CHECK_THROWS(net2.set_flat_params(wrong));
}

TEST_CASE("init is seed-deterministic, bounded, biases zero") {
  auto a = nn::init_net({3, 8, 2}, Activation::tanh, Activation::identity, 42);
  auto b = nn::init_net({3, 8, 2}, Activation::tanh, Activation::identity, 42);
  auto c = nn::init_net({3, 8, 2}, Activation::tanh, Activation::identity, 43);
  CHECK(a.flat_params() == b.flat_params());
  CHECK(a.flat_params() != c.flat_params());

  for (std::size_t l = 0; l < a.n_layers(); ++l) {
    double bound = std::sqrt(6.0 / static_cast<double>(a.dims[l]));
    for (std::size_t i = 0; i < a.weights[l].size(); ++i) {
      CHECK(std::abs(a.weights[l].data()[i]) <= bound);
    }
    for (double bi : a.biases[l]) CHECK(bi == 0.0);
  }

  CHECK_THROWS(nn::init_net({4}, Activation::relu, Activation::identity, 0));
}

TEST_CASE("forward matches a hand computation") {
  // 1 -> 2 -> 1, relu hidden, identity output
  nn::DenseNet net;
  net.dims = {1, 2, 1};
  net.hidden_act = Activation::relu;
  net.output_act = Activation::identity;
  net.weights = {Matrix::from_rows({{2.0, -3.0}}), Matrix::from_rows({{1.0}, {4.0}})};
  net.biases = {{0.5, 0.0}, {-1.0}};

  Matrix x = Matrix::from_rows({{1.0}, {-1.0}});
  auto cache = nn::forward(net, x);
  // row 0: pre = (2.5, -3) -> post (2.5, 0) -> out 2.5*1 + 0*4 - 1 = 1.5
  // row 1: pre = (-1.5, 3) -> post (0, 3)  -> out 0 + 12 - 1 = 11
  CHECK(cache.output()(0, 0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(cache.output()(1, 0) == doctest::Approx(11.0).epsilon(1e-15));

  net.output_act = Activation::tanh;
  auto cache2 = nn::forward(net, x);
  CHECK(cache2.output()(0, 0) == doctest::Approx(std::tanh(1.5)).epsilon(1e-15));

  Matrix bad(2, 3);
  CHECK_THROWS(nn::forward(net, bad));
}

TEST_CASE("backward matches central finite differences") {
  RngStream rng(2024);
  struct Case {
    std::vector<std::size_t> dims;
    Activation hidden, output;
  };
  for (const Case& c : {Case{{2, 7, 3}, Activation::relu, Activation::identity},
                        Case{{3, 5, 5, 2}, Activation::tanh, Activation::identity},
                        Case{{2, 6, 1}, Activation::relu, Activation::tanh},
                        Case{{4, 4, 2}, Activation::tanh, Activation::tanh}}) {
    auto net = nn::init_net(c.dims, c.hidden, c.output, rng.next_u64());
    Matrix x = random_matrix(rng, 5, c.dims.front(), 2.0);
    Matrix coeffs = random_matrix(rng, 5, c.dims.back(), 1.5);
    auto cache = nn::forward(net, x);
    auto analytic = nn::backward(net, cache, coeffs).flat();
    auto fd = nn::finite_diff_grad(
        net, x, [&](const Matrix& out) { return weighted_sum(coeffs, out); }, 1e-5);
    REQUIRE(analytic.size() == fd.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < fd.size(); ++i) {
      num += (analytic[i] - fd[i]) * (analytic[i] - fd[i]);
      den += fd[i] * fd[i];
    }
    CHECK(std::sqrt(num) <= 1e-6 * std::sqrt(den));
  }
}

TEST_CASE("backward_input matches finite differences on the input") {
  RngStream rng(77);
  auto net = nn::init_net({3, 6, 2}, Activation::tanh, Activation::tanh, 5);
  Matrix x = random_matrix(rng, 4, 3);
  Matrix coeffs = random_matrix(rng, 4, 2);
  auto cache = nn::forward(net, x);
  Matrix analytic = nn::backward_input(net, cache, coeffs);
  REQUIRE(analytic.rows() == 4);
  REQUIRE(analytic.cols() == 3);

  const double h = 1e-6;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      Matrix xp = x, xm = x;
      xp(i, j) += h;
      xm(i, j) -= h;
      double jp = weighted_sum(coeffs, nn::forward(net, xp).output());
      double jm = weighted_sum(coeffs, nn::forward(net, xm).output());
      double fd = (jp - jm) / (2 * h);
      CHECK(analytic(i, j) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("backward sums over the batch") {
  RngStream rng(8);
  auto net = nn::init_net({2, 5, 2}, Activation::relu, Activation::identity, 3);
  Matrix x = random_matrix(rng, 2, 2);
  Matrix coeffs = random_matrix(rng, 2, 2);

  auto whole = nn::backward(net, nn::forward(net, x), coeffs).flat();

  auto row_grad = [&](std::size_t i) {
    Matrix xi(1, 2), ci(1, 2);
    xi(0, 0) = x(i, 0);
    xi(0, 1) = x(i, 1);
    ci(0, 0) = coeffs(i, 0);
    ci(0, 1) = coeffs(i, 1);
    return nn::backward(net, nn::forward(net, xi), ci).flat();
  };
  auto g0 = row_grad(0), g1 = row_grad(1);
  for (std::size_t i = 0; i < whole.size(); ++i) {
    CHECK(whole[i] == doctest::Approx(g0[i] + g1[i]).epsilon(1e-12));
  }
}

TEST_CASE("chained generator gradient matches finite differences") {
  RngStream rng(31);
  auto g = nn::init_net({3, 6, 2}, Activation::relu, Activation::identity, 11);
  auto d = nn::init_net({2, 5, 1}, Activation::relu, Activation::identity, 12);
  Matrix z = random_matrix(rng, 6, 3);
  Matrix coeffs = random_matrix(rng, 6, 1);

  auto g_cache = nn::forward(g, z);
  auto d_cache = nn::forward(d, g_cache.output());
  auto analytic = nn::chained_generator_gradient(g, g_cache, d, d_cache, coeffs).flat();

  auto fd = nn::finite_diff_grad(
      g, z,
      [&](const Matrix& fake) {
        return weighted_sum(coeffs, nn::forward(d, fake).output());
      },
      1e-5);
  REQUIRE(analytic.size() == fd.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < fd.size(); ++i) {
    num += (analytic[i] - fd[i]) * (analytic[i] - fd[i]);
    den += fd[i] * fd[i];
  }
  CHECK(std::sqrt(num) <= 1e-6 * std::sqrt(den));
}

TEST_CASE("apply_delta adds in flat order") {
  auto net = nn::init_net({2, 3, 1}, Activation::relu, Activation::identity, 4);
  auto before = net.flat_params();
  std::vector<double> delta(net.n_params());
  for (std::size_t i = 0; i < delta.size(); ++i) delta[i] = 0.01 * static_cast<double>(i);
  net.apply_delta(delta);
  auto after = net.flat_params();
  for (std::size_t i = 0; i < after.size(); ++i) {
    CHECK(after[i] == doctest::Approx(before[i] + delta[i]).epsilon(1e-15));
  }
}

TEST_CASE("gradient utilities: norm, dot, scaling") {
  auto net = nn::init_net({2, 3, 1}, Activation::relu, Activation::identity, 4);
  auto g = nn::ParamGradient::zeros_like(net);
  CHECK(g.n_params() == net.n_params());
  CHECK(g.two_norm() == 0.0);

  g.d_weights[0](0, 0) = 3.0;
  g.d_biases[1][0] = 4.0;
  CHECK(g.two_norm() == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(nn::dot(g, g) == doctest::Approx(25.0).epsilon(1e-15));

  auto g2 = nn::ParamGradient::zeros_like(net);
  g2.add_scaled(g, -2.0);
  CHECK(g2.two_norm() == doctest::Approx(10.0).epsilon(1e-15));
  g2.scale_all(0.5);
  CHECK(g2.two_norm() == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("snapshot round-trips exactly") {
  auto net = nn::init_net({4, 9, 3}, Activation::tanh, Activation::tanh, 314);
  auto text = nn::save_snapshot(net);
  auto back = nn::load_snapshot(text);
  CHECK(back.dims == net.dims);
  CHECK(back.hidden_act == net.hidden_act);
  CHECK(back.output_act == net.output_act);
  CHECK(back.flat_params() == net.flat_params());

  RngStream rng(1);
  Matrix x = random_matrix(rng, 3, 4);
  auto o1 = nn::forward(net, x);
  auto o2 = nn::forward(back, x);
  for (std::size_t i = 0; i < o1.output().size(); ++i) {
    CHECK(o1.output().data()[i] == o2.output().data()[i]);
  }

  CHECK_THROWS(nn::load_snapshot("{\"dims\": [2]}"));
}

TEST_CASE("activation names parse both ways") {
  for (auto a : {Activation::relu, Activation::tanh, Activation::identity}) {
    CHECK(nn::parse_activation(nn::activation_name(a)) == a);
  }
  CHECK_THROWS(nn::parse_activation("swish"));
}
