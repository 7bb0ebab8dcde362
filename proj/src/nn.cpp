#include "ganlab/nn.hpp"

#include <cmath>
#include <stdexcept>

#include "ganlab/kernels.hpp"
#include "ganlab/rng.hpp"
#include "json.hpp"

namespace ganlab::nn {

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  if (name == "identity") return Activation::identity;
  throw std::invalid_argument("unknown activation: " + name);
}

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::identity: return "identity";
  }
  throw std::logic_error("bad activation enum");
}

std::size_t DenseNet::n_params() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    n += weights[l].size() + biases[l].size();
  }
  return n;
}

std::vector<double> DenseNet::flat_params() const {
  std::vector<double> p;
  p.reserve(n_params());
  for (std::size_t l = 0; l < weights.size(); ++l) {
    p.insert(p.end(), weights[l].data(), weights[l].data() + weights[l].size());
    p.insert(p.end(), biases[l].begin(), biases[l].end());
  }
  return p;
}

void DenseNet::set_flat_params(std::span<const double> p) {
  if (p.size() != n_params()) throw std::invalid_argument("flat param size mismatch");
  std::size_t off = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    for (std::size_t i = 0; i < weights[l].size(); ++i) weights[l].data()[i] = p[off++];
    for (double& b : biases[l]) b = p[off++];
  }
}

void DenseNet::apply_delta(std::span<const double> delta) {
  if (delta.size() != n_params()) throw std::invalid_argument("delta size mismatch");
  const auto& K = kernels::active();
  std::size_t off = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    K.axpy(1.0, delta.data() + off, weights[l].data(), weights[l].size());
    off += weights[l].size();
    K.axpy(1.0, delta.data() + off, biases[l].data(), biases[l].size());
    off += biases[l].size();
  }
}

DenseNet init_net(const std::vector<std::size_t>& dims, Activation hidden,
                  Activation output, std::uint64_t seed) {
  if (dims.size() < 2) throw std::invalid_argument("need at least input and output dims");
  for (std::size_t d : dims) {
    if (d == 0) throw std::invalid_argument("zero-width layer");
  }
  DenseNet net;
  net.dims = dims;
  net.hidden_act = hidden;
  net.output_act = output;
  RngStream rng(seed);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    Matrix w(dims[l], dims[l + 1]);
    const double bound = std::sqrt(6.0 / static_cast<double>(dims[l]));
    for (std::size_t k = 0; k < w.rows(); ++k) {
      for (std::size_t j = 0; j < w.cols(); ++j) w(k, j) = rng.uniform(-bound, bound);
    }
    net.weights.push_back(std::move(w));
    net.biases.emplace_back(dims[l + 1], 0.0);
  }
  return net;
}

namespace {

void apply_activation(Activation a, const Matrix& pre, Matrix& post) {
  const auto& K = kernels::active();
  switch (a) {
    case Activation::relu:
      K.relu(pre.data(), post.data(), pre.size());
      break;
    case Activation::tanh:
      for (std::size_t i = 0; i < pre.size(); ++i) post.data()[i] = std::tanh(pre.data()[i]);
      break;
    case Activation::identity:
      for (std::size_t i = 0; i < pre.size(); ++i) post.data()[i] = pre.data()[i];
      break;
  }
}

// delta := dJ/d(pre) given dJ/d(post) in delta
void activation_backward(Activation a, const Matrix& pre, const Matrix& post, Matrix& delta) {
  const auto& K = kernels::active();
  switch (a) {
    case Activation::relu:
      K.relu_backward(pre.data(), delta.data(), delta.data(), delta.size());
      break;
    case Activation::tanh:
      for (std::size_t i = 0; i < delta.size(); ++i) {
        double y = post.data()[i];
        delta.data()[i] *= 1.0 - y * y;
      }
      break;
    case Activation::identity:
      break;
  }
}

}  // namespace

ForwardCache forward(const DenseNet& net, const Matrix& x) {
  if (x.cols() != net.in_dim()) throw std::invalid_argument("input width mismatch");
  const auto& K = kernels::active();
  ForwardCache cache;
  cache.input = x;
  const Matrix* a = &cache.input;
  for (std::size_t l = 0; l < net.n_layers(); ++l) {
    const Matrix& w = net.weights[l];
    const std::size_t out = w.cols();
    Matrix pre(x.rows(), out);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      double* pr = pre.row(i);
      for (std::size_t j = 0; j < out; ++j) pr[j] = net.biases[l][j];
      const double* ar = a->row(i);
      for (std::size_t k = 0; k < w.rows(); ++k) {
        K.axpy(ar[k], w.row(k), pr, out);
      }
    }
    Matrix post(x.rows(), out);
    apply_activation(l + 1 == net.n_layers() ? net.output_act : net.hidden_act, pre, post);
    cache.pre.push_back(std::move(pre));
    cache.post.push_back(std::move(post));
    a = &cache.post.back();
  }
  return cache;
}

ParamGradient ParamGradient::zeros_like(const DenseNet& net) {
  ParamGradient g;
  for (std::size_t l = 0; l < net.n_layers(); ++l) {
    g.d_weights.emplace_back(net.weights[l].rows(), net.weights[l].cols());
    g.d_biases.emplace_back(net.biases[l].size(), 0.0);
  }
  return g;
}

std::size_t ParamGradient::n_params() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < d_weights.size(); ++l) {
    n += d_weights[l].size() + d_biases[l].size();
  }
  return n;
}

std::vector<double> ParamGradient::flat() const {
  std::vector<double> p;
  p.reserve(n_params());
  for (std::size_t l = 0; l < d_weights.size(); ++l) {
    p.insert(p.end(), d_weights[l].data(), d_weights[l].data() + d_weights[l].size());
    p.insert(p.end(), d_biases[l].begin(), d_biases[l].end());
  }
  return p;
}

double ParamGradient::two_norm() const {
  const auto& K = kernels::active();
  double s = 0.0;
  for (std::size_t l = 0; l < d_weights.size(); ++l) {
    s += K.sum_squares(d_weights[l].data(), d_weights[l].size());
    s += K.sum_squares(d_biases[l].data(), d_biases[l].size());
  }
  return std::sqrt(s);
}

void ParamGradient::scale_all(double a) {
  const auto& K = kernels::active();
  for (std::size_t l = 0; l < d_weights.size(); ++l) {
    K.scale(a, d_weights[l].data(), d_weights[l].size());
    K.scale(a, d_biases[l].data(), d_biases[l].size());
  }
}

void ParamGradient::add_scaled(const ParamGradient& other, double coeff) {
  if (other.n_params() != n_params()) throw std::invalid_argument("gradient shape mismatch");
  const auto& K = kernels::active();
  for (std::size_t l = 0; l < d_weights.size(); ++l) {
    K.axpy(coeff, other.d_weights[l].data(), d_weights[l].data(), d_weights[l].size());
    K.axpy(coeff, other.d_biases[l].data(), d_biases[l].data(), d_biases[l].size());
  }
}

double dot(const ParamGradient& a, const ParamGradient& b) {
  if (a.n_params() != b.n_params()) throw std::invalid_argument("gradient shape mismatch");
  const auto& K = kernels::active();
  double s = 0.0;
  for (std::size_t l = 0; l < a.d_weights.size(); ++l) {
    s += K.dot(a.d_weights[l].data(), b.d_weights[l].data(), a.d_weights[l].size());
    s += K.dot(a.d_biases[l].data(), b.d_biases[l].data(), a.d_biases[l].size());
  }
  return s;
}

namespace {

// Shared spine of backward/backward_input. Propagates output_coeffs down to
// the requested layer, accumulating parameter gradients unless params ==
// nullptr; returns dJ/d(input) if want_input.
Matrix backprop(const DenseNet& net, const ForwardCache& cache,
                const Matrix& output_coeffs, ParamGradient* params, bool want_input) {
  const std::size_t n = cache.input.rows();
  if (output_coeffs.rows() != n || output_coeffs.cols() != net.out_dim()) {
    throw std::invalid_argument("output coefficient shape mismatch");
  }
  const auto& K = kernels::active();
  Matrix delta = output_coeffs;
  activation_backward(net.output_act, cache.pre.back(), cache.post.back(), delta);
  for (std::size_t l = net.n_layers(); l-- > 0;) {
    const Matrix& w = net.weights[l];
    const Matrix& a = l == 0 ? cache.input : cache.post[l - 1];
    if (params != nullptr) {
      Matrix& dw = params->d_weights[l];
      std::vector<double>& db = params->d_biases[l];
      for (std::size_t i = 0; i < n; ++i) {
        const double* dr = delta.row(i);
        const double* ar = a.row(i);
        for (std::size_t k = 0; k < w.rows(); ++k) {
          K.axpy(ar[k], dr, dw.row(k), w.cols());
        }
        K.axpy(1.0, dr, db.data(), w.cols());
      }
    }
    if (l == 0 && !want_input) break;
    Matrix prev(n, w.rows());
    for (std::size_t i = 0; i < n; ++i) {
      const double* dr = delta.row(i);
      double* pr = prev.row(i);
      for (std::size_t k = 0; k < w.rows(); ++k) {
        pr[k] = K.dot(dr, w.row(k), w.cols());
      }
    }
    if (l > 0) {
      activation_backward(net.hidden_act, cache.pre[l - 1], cache.post[l - 1], prev);
    }
    delta = std::move(prev);
  }
  return delta;
}

}  // namespace

ParamGradient backward(const DenseNet& net, const ForwardCache& cache,
                       const Matrix& output_coeffs) {
  ParamGradient g = ParamGradient::zeros_like(net);
  backprop(net, cache, output_coeffs, &g, false);
  return g;
}

Matrix backward_input(const DenseNet& net, const ForwardCache& cache,
                      const Matrix& output_coeffs) {
  return backprop(net, cache, output_coeffs, nullptr, true);
}

ParamGradient chained_generator_gradient(const DenseNet& g, const ForwardCache& g_cache,
                                         const DenseNet& d, const ForwardCache& d_cache,
                                         const Matrix& d_output_coeffs) {
  Matrix fake_grads = backward_input(d, d_cache, d_output_coeffs);
  return backward(g, g_cache, fake_grads);
}

std::vector<double> finite_diff_grad(
    DenseNet& net, const Matrix& x,
    const std::function<double(const Matrix&)>& loss_of_output, double h) {
  std::vector<double> params = net.flat_params();
  std::vector<double> grad(params.size());
  std::vector<double> work = params;
  for (std::size_t j = 0; j < params.size(); ++j) {
    work[j] = params[j] + h;
    net.set_flat_params(work);
    double up = loss_of_output(forward(net, x).output());
    work[j] = params[j] - h;
    net.set_flat_params(work);
    double down = loss_of_output(forward(net, x).output());
    work[j] = params[j];
    grad[j] = (up - down) / (2.0 * h);
  }
  net.set_flat_params(params);
  return grad;
}

std::string save_snapshot(const DenseNet& net) {
  nlohmann::ordered_json j;
  j["dims"] = net.dims;
  j["hidden_activation"] = activation_name(net.hidden_act);
  j["output_activation"] = activation_name(net.output_act);
  j["params"] = net.flat_params();
  return j.dump(2);
}

DenseNet load_snapshot(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  DenseNet net = init_net(j.at("dims").get<std::vector<std::size_t>>(),
                          parse_activation(j.at("hidden_activation").get<std::string>()),
                          parse_activation(j.at("output_activation").get<std::string>()),
                          0);
  net.set_flat_params(j.at("params").get<std::vector<double>>());
  return net;
}

}  // namespace ganlab::nn
