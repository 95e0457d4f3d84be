#pragma once

#include "needlets/simd/kernels.hpp"

namespace needlets::simd::detail {

const KernelSet& scalar_kernels();
#if defined(NEEDLETS_HAVE_AVX2)
const KernelSet& avx2_kernels();
#endif
#if defined(NEEDLETS_HAVE_NEON)
const KernelSet& neon_kernels();
#endif

}  // namespace needlets::simd::detail
