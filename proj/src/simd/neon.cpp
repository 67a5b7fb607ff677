#include <arm_neon.h>

#include <cmath>

#include "gcgail/simd.hpp"

namespace gcgail::simd {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void adam_neon(double* param, double* m, double* v, const double* grad,
               std::size_t n, const AdamCoefficients& c) {
  const double one_minus_b1 = 1.0 - c.beta1;
  const double one_minus_b2 = 1.0 - c.beta2;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t g = vld1q_f64(grad + i);
    const float64x2_t mi = vaddq_f64(vmulq_n_f64(vld1q_f64(m + i), c.beta1),
                                     vmulq_n_f64(g, one_minus_b1));
    const float64x2_t vi = vaddq_f64(vmulq_n_f64(vld1q_f64(v + i), c.beta2),
                                     vmulq_n_f64(vmulq_f64(g, g), one_minus_b2));
    vst1q_f64(m + i, mi);
    vst1q_f64(v + i, vi);
    const float64x2_t denom =
        vaddq_f64(vsqrtq_f64(vmulq_n_f64(vi, c.second_scale)), vdupq_n_f64(c.eps));
    const float64x2_t delta = vdivq_f64(vmulq_n_f64(mi, c.step_size), denom);
    vst1q_f64(param + i, vsubq_f64(vld1q_f64(param + i), delta));
  }
  for (; i < n; ++i) {
    const double gi = grad[i];
    m[i] = c.beta1 * m[i] + one_minus_b1 * gi;
    v[i] = c.beta2 * v[i] + one_minus_b2 * (gi * gi);
    const double denom = std::sqrt(v[i] * c.second_scale) + c.eps;
    param[i] -= c.step_size * m[i] / denom;
  }
}

const KernelTable kNeon{Backend::Neon, dot_neon, axpy_neon, adam_neon};

}  // namespace

const KernelTable* neon_kernels() { return &kNeon; }

}  // namespace gcgail::simd
