#include <cstdlib>
#include <string_view>

#include "gcgail/simd.hpp"

namespace gcgail::simd {

#if !defined(GCGAIL_HAVE_AVX2)
const KernelTable* avx2_kernels() { return nullptr; }
#endif
#if !defined(GCGAIL_HAVE_NEON)
const KernelTable* neon_kernels() { return nullptr; }
#endif

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "unknown";
}

namespace {

const KernelTable& select() {
  const char* forced = std::getenv("GCGAIL_SIMD");
  if (forced != nullptr && std::string_view(forced) == "scalar") return scalar_kernels();
  if (const KernelTable* t = avx2_kernels()) return *t;
  if (const KernelTable* t = neon_kernels()) return *t;
  return scalar_kernels();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace gcgail::simd
