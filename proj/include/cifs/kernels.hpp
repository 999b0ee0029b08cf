#pragma once

// Data-parallel inner loops with a scalar reference and SIMD variants chosen
// at runtime. Variants must agree bit-for-bit with the scalar reference,
// except weighted_abs_sum whose reduction order differs (1e-12 relative).
//
// Set CIFS_KERNELS=scalar in the environment to force the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace cifs::kernels {

struct KernelTable {
  const char* name;

  // out[p*dim + j] = ratio * in[p*dim + j] + translation[j]
  void (*affine_apply)(double ratio, const double* translation, std::size_t dim,
                       const double* in, double* out, std::size_t points);

  // min over points of sum_j (query[j] - p[j])^2, summed in j order;
  // +infinity when points == 0.
  double (*min_squared_distance)(const double* query, std::size_t dim, const double* points,
                                 std::size_t count);

  // Fixed points of prefix o letter_j for a batch of letters, one coordinate:
  // out[j] = (ratio * translations[j] + translation) / (1 - ratio * ratios[j])
  void (*word_fixed_points)(double ratio, double translation, const double* ratios,
                            const double* translations, double* out, std::size_t count);

  // sum_k |a[k]| * w[k]
  double (*weighted_abs_sum)(const double* a, const double* w, std::size_t count);
};

const KernelTable& scalar();
// nullptr when not compiled in or not supported by this CPU.
const KernelTable* avx2();
// Best available table, chosen once per process.
const KernelTable& active();

// Span conveniences over active().
void affine_apply(double ratio, std::span<const double> translation, std::span<const double> in,
                  std::span<double> out);
double min_squared_distance(std::span<const double> query, std::span<const double> points);

}  // namespace cifs::kernels
