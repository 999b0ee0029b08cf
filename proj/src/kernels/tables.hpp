#pragma once

#include <cstddef>

#include "cifs/kernels.hpp"

namespace cifs::kernels::detail {

void scalar_affine_apply(double ratio, const double* translation, std::size_t dim,
                         const double* in, double* out, std::size_t points);
double scalar_min_squared_distance(const double* query, std::size_t dim, const double* points,
                                   std::size_t count);
void scalar_word_fixed_points(double ratio, double translation, const double* ratios,
                              const double* translations, double* out, std::size_t count);
double scalar_weighted_abs_sum(const double* a, const double* w, std::size_t count);

#if defined(CIFS_HAVE_AVX2_TU)
const KernelTable& avx2_table();
#endif

}  // namespace cifs::kernels::detail
