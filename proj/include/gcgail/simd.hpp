#pragma once

// Dense-vector kernels used by the MLP engine. A scalar reference
// implementation is always available; vector variants (AVX2+FMA on x86-64,
// NEON on aarch64) are picked once at startup when the CPU supports them.
// GCGAIL_SIMD=scalar in the environment forces the reference path.
//
// Elementwise kernels (axpy, adam_step) produce bit-identical results on
// every backend. dot() reassociates the sum on vector backends, so results
// agree with the reference only to rounding.

#include <cstddef>
#include <span>
#include <string_view>

namespace gcgail::simd {

enum class Backend { Scalar, Avx2, Neon };

std::string_view backend_name(Backend b);

struct AdamCoefficients {
  double beta1;
  double beta2;
  double step_size;      // learning rate / (1 - beta1^t)
  double second_scale;   // 1 / (1 - beta2^t)
  double eps;
};

struct KernelTable {
  Backend backend;
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  void (*adam_step)(double* param, double* m, double* v, const double* grad,
                    std::size_t n, const AdamCoefficients& c);
};

// Tables for individual backends; nullptr when not compiled in or when the
// running CPU lacks the instructions.
const KernelTable& scalar_kernels();
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

// The table selected for this process.
const KernelTable& active();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace gcgail::simd
