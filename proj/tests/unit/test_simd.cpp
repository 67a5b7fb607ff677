#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "gcgail/rng.hpp"
#include "gcgail/simd.hpp"

using namespace gcgail;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = 4.0 * uniform01(rng) - 2.0;
  return v;
}

std::vector<const simd::KernelTable*> vector_backends() {
  std::vector<const simd::KernelTable*> out;
  if (auto* t = simd::avx2_kernels()) out.push_back(t);
  if (auto* t = simd::neon_kernels()) out.push_back(t);
  return out;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("scalar dot and axpy against plain loops") {
  const auto& s = simd::scalar_kernels();
  const std::vector<double> a{1, 2, 3}, b{4, -5, 6};
  CHECK(s.dot(a.data(), b.data(), 3) == 1 * 4 - 2 * 5 + 3 * 6);
  std::vector<double> y{1, 1, 1};
  s.axpy(2.0, a.data(), y.data(), 3);
  CHECK(y == std::vector<double>{3, 5, 7});
  CHECK(s.dot(a.data(), b.data(), 0) == 0.0);
}

TEST_CASE("scalar adam step matches the closed form") {
  const auto& s = simd::scalar_kernels();
  double p = 1.0, m = 0.0, v = 0.0;
  const double g = 0.5;
  simd::AdamCoefficients c{0.9, 0.999, 0.01 / (1 - 0.9), 1.0 / (1 - 0.999), 1e-8};
  s.adam_step(&p, &m, &v, &g, 1, c);
  CHECK(m == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(v == doctest::Approx(0.00025).epsilon(1e-15));
  // First step moves the parameter by lr * g / (|g| + eps') ~ lr.
  CHECK(p == doctest::Approx(1.0 - 0.01 * 0.5 / (0.5 + 1e-8)).epsilon(1e-12));
}

TEST_CASE("vector backends agree with the scalar reference") {
  const auto backends = vector_backends();
  if (backends.empty()) {
    MESSAGE("no vector backend on this machine");
    return;
  }
  const auto& ref = simd::scalar_kernels();
  Rng rng = make_rng(7);
  for (const auto* t : backends) {
    CAPTURE(simd::backend_name(t->backend));
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 11u, 64u, 65u, 257u}) {
      CAPTURE(n);
      const auto a = random_vec(rng, n);
      const auto b = random_vec(rng, n);
      const double d_ref = ref.dot(a.data(), b.data(), n);
      const double d_vec = t->dot(a.data(), b.data(), n);
      double mag = 0.0;
      for (std::size_t i = 0; i < n; ++i) mag += std::abs(a[i] * b[i]);
      CHECK(std::abs(d_ref - d_vec) <= 1e-14 * (mag + 1.0));

      auto y_ref = random_vec(rng, n);
      auto y_vec = y_ref;
      ref.axpy(-0.37, a.data(), y_ref.data(), n);
      t->axpy(-0.37, a.data(), y_vec.data(), n);
      CHECK(same_bits(y_ref, y_vec));

      auto p_ref = random_vec(rng, n), p_vec = p_ref;
      auto m_ref = random_vec(rng, n), m_vec = m_ref;
      std::vector<double> v_ref(n);
      for (double& x : v_ref) x = uniform01(rng);
      auto v_vec = v_ref;
      const simd::AdamCoefficients c{0.9, 0.999, 1e-3 / (1 - std::pow(0.9, 3)),
                                     1.0 / (1 - std::pow(0.999, 3)), 1e-8};
      ref.adam_step(p_ref.data(), m_ref.data(), v_ref.data(), b.data(), n, c);
      t->adam_step(p_vec.data(), m_vec.data(), v_vec.data(), b.data(), n, c);
      CHECK(same_bits(p_ref, p_vec));
      CHECK(same_bits(m_ref, m_vec));
      CHECK(same_bits(v_ref, v_vec));
    }
  }
}

TEST_CASE("active table is one of the compiled backends") {
  const auto& t = simd::active();
  const bool known = &t == &simd::scalar_kernels() || &t == simd::avx2_kernels() ||
                     &t == simd::neon_kernels();
  CHECK(known);
}
