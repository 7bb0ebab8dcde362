#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace ganlab::kernels {

// Function table for the hot inner loops (dense layer forward/backward and
// the Adam element-wise update). One table per instruction set; the active
// one is chosen at startup from CPU features and can be overridden, e.g. to
// run the scalar reference on an AVX2 machine.
//
// All reductions use a fixed association order, so repeated calls with the
// same inputs on the same table are bit-identical.
struct Table {
  const char* name;

  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // sum_i x[i]^2
  double (*sum_squares)(const double* x, std::size_t n);
  // x[i] *= a
  void (*scale)(double a, double* x, std::size_t n);
  // y[i] = max(z[i], 0)
  void (*relu)(const double* z, double* y, std::size_t n);
  // y[i] = z[i] > 0 ? g[i] : 0   (derivative at 0 taken as 0)
  void (*relu_backward)(const double* z, const double* g, double* y, std::size_t n);
  // Per element:
  //   m = beta1*m + (1-beta1)*g
  //   v = beta2*v + (1-beta2)*g^2
  //   delta = -alpha * (m*inv_bc1) / (sqrt(v*inv_bc2) + eps)
  // inv_bc1/inv_bc2 are the inverse bias-correction factors 1/(1-beta^t).
  void (*adam_update)(double* m, double* v, double* delta, const double* g,
                      double beta1, double beta2, double inv_bc1, double inv_bc2,
                      double alpha, double eps, std::size_t n);
};

// Active table (auto-detected best unless forced).
const Table& active();

// Names of tables usable on this machine, in preference order.
std::vector<std::string> available();

// Pin a specific implementation ("scalar", "avx2", "neon"). Throws
// std::invalid_argument if the name is unknown or unusable here. Not meant
// to be called concurrently with running computations.
void force_isa(const std::string& name);

// Return to auto-detection.
void reset_isa();

const Table* find(const std::string& name);  // nullptr if unavailable

}  // namespace ganlab::kernels
