#pragma once

#include <cstdint>
#include <random>

namespace gcgail {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent per-entity streams from a
// run seed so parallel work is independent of scheduling order.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t salt = 0) {
  return mix64(mix64(seed ^ mix64(salt)) ^ stream);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t salt = 0) {
  return Rng(derive_seed(seed, stream, salt));
}

// 53-bit uniform in [0, 1), independent of the standard library's
// distribution implementations.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace gcgail
