#pragma once

#include "keplerlab/kernels.hpp"

namespace keplerlab::kernels::detail {

const KernelTable& scalar_table();
#if defined(KEPLERLAB_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

}  // namespace keplerlab::kernels::detail
