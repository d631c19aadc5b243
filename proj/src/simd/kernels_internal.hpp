#pragma once

#include "ridgelab/simd.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define RIDGELAB_HAVE_AVX2_KERNELS 1
#else
#define RIDGELAB_HAVE_AVX2_KERNELS 0
#endif

#if defined(__aarch64__) && defined(__ARM_NEON)
#define RIDGELAB_HAVE_NEON_KERNELS 1
#else
#define RIDGELAB_HAVE_NEON_KERNELS 0
#endif

namespace ridgelab::simd::detail {

extern const KernelTable kScalarTable;
#if RIDGELAB_HAVE_AVX2_KERNELS
extern const KernelTable kAvx2Table;
#endif
#if RIDGELAB_HAVE_NEON_KERNELS
extern const KernelTable kNeonTable;
#endif

}  // namespace ridgelab::simd::detail
