#include "ganlab/kernels.hpp"

#include <cmath>

namespace ganlab::kernels {
namespace {

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double sum_squares(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
  return s;
}

void scale(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void relu(const double* z, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = z[i] > 0.0 ? z[i] : 0.0;
}

void relu_backward(const double* z, const double* g, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = z[i] > 0.0 ? g[i] : 0.0;
}

void adam_update(double* m, double* v, double* delta, const double* g,
                 double beta1, double beta2, double inv_bc1, double inv_bc2,
                 double alpha, double eps, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
    double mhat = m[i] * inv_bc1;
    double vhat = v[i] * inv_bc2;
    delta[i] = -alpha * mhat / (std::sqrt(vhat) + eps);
  }
}

}  // namespace

extern const Table kScalarTable = {
    "scalar", axpy, dot, sum_squares, scale, relu, relu_backward, adam_update,
};

}  // namespace ganlab::kernels
