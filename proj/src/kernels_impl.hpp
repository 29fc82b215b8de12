#pragma once

#include "dnbs/kernels.hpp"

namespace dnbs::kernels::detail {

const KernelTable& scalar_table();
#if defined(DNBS_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

}  // namespace dnbs::kernels::detail
