#pragma once

#include "sarplan/simd/kernels.hpp"

namespace sarplan::simd::detail {

extern const KernelTable kScalarTable;
#if defined(SARPLAN_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif

} // namespace sarplan::simd::detail
