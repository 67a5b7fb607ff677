#include <cmath>

#include "gcgail/simd.hpp"

namespace gcgail::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void adam_scalar(double* param, double* m, double* v, const double* grad,
                 std::size_t n, const AdamCoefficients& c) {
  const double one_minus_b1 = 1.0 - c.beta1;
  const double one_minus_b2 = 1.0 - c.beta2;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grad[i];
    m[i] = c.beta1 * m[i] + one_minus_b1 * g;
    v[i] = c.beta2 * v[i] + one_minus_b2 * (g * g);
    const double denom = std::sqrt(v[i] * c.second_scale) + c.eps;
    param[i] -= c.step_size * m[i] / denom;
  }
}

const KernelTable kScalar{Backend::Scalar, dot_scalar, axpy_scalar, adam_scalar};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace gcgail::simd
