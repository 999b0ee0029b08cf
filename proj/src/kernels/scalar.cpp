#include "kernels/tables.hpp"

#include <cmath>
#include <limits>

namespace cifs::kernels::detail {

void scalar_affine_apply(double ratio, const double* translation, std::size_t dim,
                         const double* in, double* out, std::size_t points) {
  for (std::size_t p = 0; p < points; ++p) {
    for (std::size_t j = 0; j < dim; ++j) out[p * dim + j] = ratio * in[p * dim + j] + translation[j];
  }
}

double scalar_min_squared_distance(const double* query, std::size_t dim, const double* points,
                                   std::size_t count) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < count; ++p) {
    const double* x = points + p * dim;
    double diff = query[0] - x[0];
    double sq = diff * diff;
    for (std::size_t j = 1; j < dim; ++j) {
      diff = query[j] - x[j];
      sq = sq + diff * diff;
    }
    best = sq < best ? sq : best;
  }
  return best;
}

void scalar_word_fixed_points(double ratio, double translation, const double* ratios,
                              const double* translations, double* out, std::size_t count) {
  for (std::size_t j = 0; j < count; ++j) {
    out[j] = (ratio * translations[j] + translation) / (1.0 - ratio * ratios[j]);
  }
}

double scalar_weighted_abs_sum(const double* a, const double* w, std::size_t count) {
  double sum = 0;
  for (std::size_t k = 0; k < count; ++k) sum += std::abs(a[k]) * w[k];
  return sum;
}

}  // namespace cifs::kernels::detail
