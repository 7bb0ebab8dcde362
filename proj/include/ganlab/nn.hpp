#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ganlab/matrix.hpp"

namespace ganlab::nn {

enum class Activation { relu, tanh, identity };

Activation parse_activation(const std::string& name);
std::string activation_name(Activation a);

// Fully-connected net. weights[l] has shape dims[l] x dims[l+1] (row-major,
// row = input unit), biases[l] has length dims[l+1]. The flat parameter
// order used by apply_delta / flat_params / snapshots is
// W0 (row-major), b0, W1, b1, ...
struct DenseNet {
  std::vector<std::size_t> dims;
  Activation hidden_act = Activation::relu;
  Activation output_act = Activation::identity;
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;

  std::size_t n_layers() const { return weights.size(); }
  std::size_t in_dim() const { return dims.front(); }
  std::size_t out_dim() const { return dims.back(); }
  std::size_t n_params() const;

  std::vector<double> flat_params() const;
  void set_flat_params(std::span<const double> p);
  void apply_delta(std::span<const double> delta);  // params += delta
};

// Weights drawn uniform in ±sqrt(6 / fan_in), biases zero. Draw order is
// fixed (layer, then input unit, then output unit) so a seed pins the net.
DenseNet init_net(const std::vector<std::size_t>& dims, Activation hidden,
                  Activation output, std::uint64_t seed);

struct ForwardCache {
  Matrix input;
  std::vector<Matrix> pre;   // pre-activation per layer, n x dims[l+1]
  std::vector<Matrix> post;  // post-activation per layer
  const Matrix& output() const { return post.back(); }
};

ForwardCache forward(const DenseNet& net, const Matrix& x);

struct ParamGradient {
  std::vector<Matrix> d_weights;
  std::vector<std::vector<double>> d_biases;

  static ParamGradient zeros_like(const DenseNet& net);
  std::size_t n_params() const;
  std::vector<double> flat() const;
  double two_norm() const;
  void scale_all(double a);
  void add_scaled(const ParamGradient& other, double coeff);
};

double dot(const ParamGradient& a, const ParamGradient& b);

// Vector-Jacobian products. output_coeffs is n x out_dim; entry (i, j) is
// dJ / d out(i, j). Both return sums over the batch: backward() the gradient
// w.r.t. parameters, backward_input() the gradient w.r.t. each input row
// (n x in_dim, no batch sum since rows are independent).
ParamGradient backward(const DenseNet& net, const ForwardCache& cache,
                       const Matrix& output_coeffs);
Matrix backward_input(const DenseNet& net, const ForwardCache& cache,
                      const Matrix& output_coeffs);

// Gradient of sum_i J(d(g(z_i))) w.r.t. g's parameters: propagate the given
// coefficients through d to its input, then through g.
ParamGradient chained_generator_gradient(const DenseNet& g, const ForwardCache& g_cache,
                                         const DenseNet& d, const ForwardCache& d_cache,
                                         const Matrix& d_output_coeffs);

// Central-difference gradient of loss(forward(net, x).output()) w.r.t. the
// flat parameters. The net is perturbed in place and restored exactly.
std::vector<double> finite_diff_grad(
    DenseNet& net, const Matrix& x,
    const std::function<double(const Matrix&)>& loss_of_output, double h);

// Flat JSON: dims, activations, params in the canonical flat order.
std::string save_snapshot(const DenseNet& net);
DenseNet load_snapshot(const std::string& json_text);

}  // namespace ganlab::nn
