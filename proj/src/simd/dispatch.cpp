#include <cstdlib>
#include <string_view>

#include "kernels_internal.hpp"

namespace ridgelab::simd {

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
    case Isa::kNeon: return "neon";
  }
  return "unknown";
}

const KernelTable& scalar_kernels() noexcept { return detail::kScalarTable; }

std::vector<const KernelTable*> available_kernels() {
  std::vector<const KernelTable*> out{&detail::kScalarTable};
#if RIDGELAB_HAVE_AVX2_KERNELS
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    out.push_back(&detail::kAvx2Table);
  }
#endif
#if RIDGELAB_HAVE_NEON_KERNELS
  out.push_back(&detail::kNeonTable);
#endif
  return out;
}

namespace {

const KernelTable& select_kernels() {
  const char* env = std::getenv("RIDGELAB_SIMD");
  const auto tables = available_kernels();
  if (env != nullptr) {
    const std::string_view want{env};
    for (const KernelTable* t : tables) {
      if (isa_name(t->isa) == want) return *t;
    }
  }
  return *tables.back();
}

}  // namespace

const KernelTable& active() noexcept {
  static const KernelTable& table = select_kernels();
  return table;
}

}  // namespace ridgelab::simd
