#pragma once

#include "citerank/kernels.hpp"

namespace citerank::kernels::detail {

inline constexpr std::size_t kStripes = 4;

const KernelTable& scalar_table();
// nullptr when the variant was not compiled into this build.
const KernelTable* avx2_table();
const KernelTable* neon_table();

}  // namespace citerank::kernels::detail
