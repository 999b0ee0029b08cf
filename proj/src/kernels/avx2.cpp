// Compiled with -mavx2 only (no -mfma): every lane performs the same
// multiply/add/divide sequence as the scalar reference.

#include <immintrin.h>

#include <cmath>
#include <limits>

#include "kernels/tables.hpp"

namespace cifs::kernels::detail {
namespace {

constexpr std::size_t kMaxPatternDim = 16;

void avx2_affine_apply(double ratio, const double* translation, std::size_t dim,
                       const double* in, double* out, std::size_t points) {
  if (dim > kMaxPatternDim) {
    scalar_affine_apply(ratio, translation, dim, in, out, points);
    return;
  }
  // A block of 4*dim doubles starts on a point boundary, so the translation
  // pattern repeats exactly once per block.
  alignas(32) double pattern[4 * kMaxPatternDim];
  const std::size_t block = 4 * dim;
  for (std::size_t t = 0; t < block; ++t) pattern[t] = translation[t % dim];
  const std::size_t total = points * dim;
  const __m256d r = _mm256_set1_pd(ratio);
  std::size_t s = 0;
  for (; s + block <= total; s += block) {
    for (std::size_t t = 0; t < block; t += 4) {
      __m256d x = _mm256_loadu_pd(in + s + t);
      __m256d b = _mm256_load_pd(pattern + t);
      _mm256_storeu_pd(out + s + t, _mm256_add_pd(_mm256_mul_pd(r, x), b));
    }
  }
  for (; s < total; ++s) out[s] = ratio * in[s] + translation[s % dim];
}

double horizontal_min(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  double best = lanes[0];
  for (int k = 1; k < 4; ++k) best = lanes[k] < best ? lanes[k] : best;
  return best;
}

double avx2_min_squared_distance(const double* query, std::size_t dim, const double* points,
                                 std::size_t count) {
  if (dim == 1) {
    const __m256d q = _mm256_set1_pd(query[0]);
    __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    std::size_t p = 0;
    for (; p + 4 <= count; p += 4) {
      __m256d d = _mm256_sub_pd(q, _mm256_loadu_pd(points + p));
      best = _mm256_min_pd(best, _mm256_mul_pd(d, d));
    }
    double result = horizontal_min(best);
    if (p < count) {
      double tail = scalar_min_squared_distance(query, 1, points + p, count - p);
      result = tail < result ? tail : result;
    }
    return result;
  }
  if (dim == 2) {
    const __m256d q = _mm256_setr_pd(query[0], query[1], query[0], query[1]);
    __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    std::size_t p = 0;
    for (; p + 4 <= count; p += 4) {
      __m256d d0 = _mm256_sub_pd(q, _mm256_loadu_pd(points + 2 * p));
      __m256d d1 = _mm256_sub_pd(q, _mm256_loadu_pd(points + 2 * p + 4));
      // [x0^2+y0^2, x2^2+y2^2, x1^2+y1^2, x3^2+y3^2]
      __m256d sums = _mm256_hadd_pd(_mm256_mul_pd(d0, d0), _mm256_mul_pd(d1, d1));
      best = _mm256_min_pd(best, sums);
    }
    double result = horizontal_min(best);
    if (p < count) {
      double tail = scalar_min_squared_distance(query, 2, points + 2 * p, count - p);
      result = tail < result ? tail : result;
    }
    return result;
  }
  return scalar_min_squared_distance(query, dim, points, count);
}

void avx2_word_fixed_points(double ratio, double translation, const double* ratios,
                            const double* translations, double* out, std::size_t count) {
  const __m256d r = _mm256_set1_pd(ratio);
  const __m256d b = _mm256_set1_pd(translation);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t j = 0;
  for (; j + 4 <= count; j += 4) {
    __m256d num = _mm256_add_pd(_mm256_mul_pd(r, _mm256_loadu_pd(translations + j)), b);
    __m256d den = _mm256_sub_pd(one, _mm256_mul_pd(r, _mm256_loadu_pd(ratios + j)));
    _mm256_storeu_pd(out + j, _mm256_div_pd(num, den));
  }
  if (j < count) {
    scalar_word_fixed_points(ratio, translation, ratios + j, translations + j, out + j, count - j);
  }
}

double avx2_weighted_abs_sum(const double* a, const double* w, std::size_t count) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= count; k += 4) {
    __m256d v = _mm256_andnot_pd(sign, _mm256_loadu_pd(a + k));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(v, _mm256_loadu_pd(w + k)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; k < count; ++k) sum += std::abs(a[k]) * w[k];
  return sum;
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{"avx2", avx2_affine_apply, avx2_min_squared_distance,
                                 avx2_word_fixed_points, avx2_weighted_abs_sum};
  return table;
}

}  // namespace cifs::kernels::detail
