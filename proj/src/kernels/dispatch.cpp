#include <cstdlib>
#include <string_view>

#include "cifs/error.hpp"
#include "kernels/tables.hpp"

namespace cifs::kernels {

const KernelTable& scalar() {
  static const KernelTable table{"scalar", detail::scalar_affine_apply,
                                 detail::scalar_min_squared_distance,
                                 detail::scalar_word_fixed_points, detail::scalar_weighted_abs_sum};
  return table;
}

const KernelTable* avx2() {
#if defined(CIFS_HAVE_AVX2_TU)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& chosen = []() -> const KernelTable& {
    const char* forced = std::getenv("CIFS_KERNELS");
    if (forced != nullptr && std::string_view(forced) == "scalar") return scalar();
    if (const KernelTable* t = avx2()) return *t;
    return scalar();
  }();
  return chosen;
}

void affine_apply(double ratio, std::span<const double> translation, std::span<const double> in,
                  std::span<double> out) {
  const std::size_t dim = translation.size();
  if (dim == 0 || in.size() % dim != 0 || out.size() < in.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "affine_apply: buffer sizes do not match");
  }
  active().affine_apply(ratio, translation.data(), dim, in.data(), out.data(), in.size() / dim);
}

double min_squared_distance(std::span<const double> query, std::span<const double> points) {
  const std::size_t dim = query.size();
  if (dim == 0 || points.size() % dim != 0) {
    throw Error(ErrorCode::kDimensionMismatch, "min_squared_distance: buffer sizes do not match");
  }
  return active().min_squared_distance(query.data(), dim, points.data(), points.size() / dim);
}

}  // namespace cifs::kernels
