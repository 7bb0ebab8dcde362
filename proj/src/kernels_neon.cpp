// NEON (aarch64) variants of the inner-loop kernels. Only compiled on ARM
// builds; double-precision NEON is 2 lanes wide, so this mostly buys the
// fused multiply-adds.
#include "ganlab/kernels.hpp"

#include <arm_neon.h>

#include <cmath>

namespace ganlab::kernels {
namespace {

inline double hsum(float64x2_t v) { return vgetq_lane_f64(v, 0) + vgetq_lane_f64(v, 1); }

void axpy(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  }
  for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

double dot(const double* x, const double* y, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
  }
  for (; i + 2 <= n; i += 2) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
  }
  double s = hsum(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s = std::fma(x[i], y[i], s);
  return s;
}

double sum_squares(const double* x, std::size_t n) { return dot(x, x, n); }

void scale(double a, double* x, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
  }
  for (; i < n; ++i) x[i] *= a;
}

void relu(const double* z, double* y, std::size_t n) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vmaxq_f64(vld1q_f64(z + i), zero));
  }
  for (; i < n; ++i) y[i] = z[i] > 0.0 ? z[i] : 0.0;
}

void relu_backward(const double* z, const double* g, double* y, std::size_t n) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    uint64x2_t mask = vcgtq_f64(vld1q_f64(z + i), zero);
    float64x2_t gi = vld1q_f64(g + i);
    vst1q_f64(y + i, vreinterpretq_f64_u64(
                         vandq_u64(mask, vreinterpretq_u64_f64(gi))));
  }
  for (; i < n; ++i) y[i] = z[i] > 0.0 ? g[i] : 0.0;
}

void adam_update(double* m, double* v, double* delta, const double* g,
                 double beta1, double beta2, double inv_bc1, double inv_bc2,
                 double alpha, double eps, std::size_t n) {
  const float64x2_t vb1 = vdupq_n_f64(beta1);
  const float64x2_t vb2 = vdupq_n_f64(beta2);
  const float64x2_t vc1 = vdupq_n_f64(1.0 - beta1);
  const float64x2_t vc2 = vdupq_n_f64(1.0 - beta2);
  const float64x2_t vibc1 = vdupq_n_f64(inv_bc1);
  const float64x2_t vibc2 = vdupq_n_f64(inv_bc2);
  const float64x2_t vnalpha = vdupq_n_f64(-alpha);
  const float64x2_t veps = vdupq_n_f64(eps);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t gi = vld1q_f64(g + i);
    float64x2_t mi = vfmaq_f64(vmulq_f64(vc1, gi), vb1, vld1q_f64(m + i));
    float64x2_t vi = vfmaq_f64(vmulq_f64(vc2, vmulq_f64(gi, gi)), vb2, vld1q_f64(v + i));
    vst1q_f64(m + i, mi);
    vst1q_f64(v + i, vi);
    float64x2_t num = vmulq_f64(vnalpha, vmulq_f64(mi, vibc1));
    float64x2_t den = vaddq_f64(vsqrtq_f64(vmulq_f64(vi, vibc2)), veps);
    vst1q_f64(delta + i, vdivq_f64(num, den));
  }
  for (; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
    double mhat = m[i] * inv_bc1;
    double vhat = v[i] * inv_bc2;
    delta[i] = -alpha * mhat / (std::sqrt(vhat) + eps);
  }
}

}  // namespace

extern const Table kNeonTable = {
    "neon", axpy, dot, sum_squares, scale, relu, relu_backward, adam_update,
};

}  // namespace ganlab::kernels
