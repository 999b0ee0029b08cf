#include "cifs/hausdorff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cifs/error.hpp"
#include "cifs/kernels.hpp"

namespace cifs {

namespace {

constexpr std::size_t kMaxCells = std::size_t{1} << 24;
constexpr double kMaxCellCoordinate = 1e15;

std::int64_t cell_coordinate(double x, double origin, double cell) {
  double c = std::floor((x - origin) / cell);
  c = std::clamp(c, -kMaxCellCoordinate, kMaxCellCoordinate);
  return static_cast<std::int64_t>(c);
}

}  // namespace

NearestIndex::NearestIndex(const PointCloud& cloud) : dim_(cloud.dimension()) {
  if (cloud.empty()) throw Error(ErrorCode::kInvalidArgument, "nearest index over an empty cloud");
  const std::size_t n = cloud.size();
  origin_ = cloud.lower();
  std::vector<double> hi = cloud.upper();
  double widest = 0;
  for (std::size_t j = 0; j < dim_; ++j) widest = std::max(widest, hi[j] - origin_[j]);

  double per_axis = std::max(1.0, std::floor(std::pow(static_cast<double>(n), 1.0 / dim_)));
  cell_ = widest > 0 ? widest / per_axis : 1.0;
  extent_.assign(dim_, 1);
  for (;;) {
    std::size_t total = 1;
    bool overflow = false;
    for (std::size_t j = 0; j < dim_; ++j) {
      extent_[j] = static_cast<std::int64_t>(std::floor((hi[j] - origin_[j]) / cell_)) + 1;
      if (total > kMaxCells / static_cast<std::size_t>(extent_[j])) overflow = true;
      total *= static_cast<std::size_t>(extent_[j]);
    }
    if (!overflow && total <= 4 * n + 16) break;
    cell_ *= 2;
  }

  stride_.assign(dim_, 1);
  for (std::size_t j = dim_ - 1; j-- > 0;) stride_[j] = stride_[j + 1] * static_cast<std::size_t>(extent_[j + 1]);
  const std::size_t cells = stride_[0] * static_cast<std::size_t>(extent_[0]);

  std::vector<std::size_t> bucket(n);
  start_.assign(cells + 1, 0);
  for (std::size_t k = 0; k < n; ++k) {
    auto p = cloud.point(k);
    std::size_t linear = 0;
    for (std::size_t j = 0; j < dim_; ++j) {
      std::int64_t c = std::clamp<std::int64_t>(cell_coordinate(p[j], origin_[j], cell_), 0, extent_[j] - 1);
      linear += static_cast<std::size_t>(c) * stride_[j];
    }
    bucket[k] = linear;
    ++start_[linear + 1];
  }
  for (std::size_t c = 0; c < cells; ++c) start_[c + 1] += start_[c];
  std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
  sorted_.resize(n * dim_);
  for (std::size_t k = 0; k < n; ++k) {
    auto p = cloud.point(k);
    std::copy(p.begin(), p.end(), sorted_.begin() + static_cast<std::ptrdiff_t>(fill[bucket[k]]++ * dim_));
  }
}

void NearestIndex::scan_ring(std::span<const double> query, const std::vector<std::int64_t>& center,
                             std::int64_t ring, double& best) const {
  const auto& table = kernels::active();
  const std::size_t last = dim_ - 1;
  std::vector<std::int64_t> lo(dim_), hi(dim_), at(dim_);
  for (std::size_t j = 0; j < dim_; ++j) {
    lo[j] = std::max<std::int64_t>(center[j] - ring, 0);
    hi[j] = std::min<std::int64_t>(center[j] + ring, extent_[j] - 1);
    if (lo[j] > hi[j]) return;
    at[j] = lo[j];
  }
  auto scan_cells = [&](std::size_t base, std::int64_t from, std::int64_t to) {
    std::size_t first = base + static_cast<std::size_t>(from);
    std::size_t past = base + static_cast<std::size_t>(to) + 1;
    std::size_t count = start_[past] - start_[first];
    if (count == 0) return;
    double d = table.min_squared_distance(query.data(), dim_, sorted_.data() + start_[first] * dim_, count);
    best = d < best ? d : best;
  };
  for (;;) {
    bool on_shell = false;
    std::size_t base = 0;
    for (std::size_t j = 0; j < last; ++j) {
      on_shell = on_shell || at[j] == center[j] - ring || at[j] == center[j] + ring;
      base += static_cast<std::size_t>(at[j]) * stride_[j];
    }
    if (on_shell) {
      scan_cells(base, lo[last], hi[last]);
    } else {
      auto inside = [&](std::int64_t c) { return c >= lo[last] && c <= hi[last]; };
      if (inside(center[last] - ring)) scan_cells(base, center[last] - ring, center[last] - ring);
      if (ring > 0 && inside(center[last] + ring)) {
        scan_cells(base, center[last] + ring, center[last] + ring);
      }
    }
    // odometer over the leading axes
    std::size_t j = last;
    while (j > 0) {
      --j;
      if (++at[j] <= hi[j]) break;
      at[j] = lo[j];
      if (j == 0) return;
    }
    if (last == 0) return;
  }
}

double NearestIndex::min_squared_distance(std::span<const double> query) const {
  if (query.size() != dim_) throw Error(ErrorCode::kDimensionMismatch, "query dimension mismatch");
  std::vector<std::int64_t> center(dim_);
  std::int64_t first_ring = 0;
  std::int64_t last_ring = 0;
  for (std::size_t j = 0; j < dim_; ++j) {
    center[j] = cell_coordinate(query[j], origin_[j], cell_);
    std::int64_t top = extent_[j] - 1;
    std::int64_t outside = center[j] < 0 ? -center[j] : (center[j] > top ? center[j] - top : 0);
    first_ring = std::max(first_ring, outside);
    last_ring = std::max({last_ring, center[j] < 0 ? top - center[j] : center[j], top - center[j]});
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::int64_t ring = first_ring; ring <= last_ring; ++ring) {
    scan_ring(query, center, ring, best);
    // Unscanned points sit at least (ring - 2) cells away, allowing one cell
    // of rounding slack for both the query and the stored points.
    if (ring >= 2) {
      double reach = static_cast<double>(ring - 2) * cell_;
      if (best <= reach * reach) break;
    }
  }
  return best;
}

double NearestIndex::distance(std::span<const double> query) const {
  return std::sqrt(min_squared_distance(query));
}

double directed_hausdorff(const PointCloud& from, const NearestIndex& to) {
  if (from.empty()) throw Error(ErrorCode::kInvalidArgument, "Hausdorff distance of an empty cloud");
  if (from.dimension() != to.dimension()) {
    throw Error(ErrorCode::kDimensionMismatch, "Hausdorff distance across dimensions");
  }
  double worst = 0;
  for (std::size_t k = 0; k < from.size(); ++k) worst = std::max(worst, to.min_squared_distance(from.point(k)));
  return std::sqrt(worst);
}

double directed_hausdorff(const PointCloud& from, const PointCloud& to) {
  if (to.empty()) throw Error(ErrorCode::kInvalidArgument, "Hausdorff distance of an empty cloud");
  return directed_hausdorff(from, NearestIndex(to));
}

double hausdorff(const PointCloud& a, const PointCloud& b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::kInvalidArgument, "Hausdorff distance of an empty cloud");
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

double hausdorff_brute_force(const PointCloud& a, const PointCloud& b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::kInvalidArgument, "Hausdorff distance of an empty cloud");
  if (a.dimension() != b.dimension()) {
    throw Error(ErrorCode::kDimensionMismatch, "Hausdorff distance across dimensions");
  }
  const std::size_t d = a.dimension();
  auto directed = [d](const PointCloud& from, const PointCloud& to) {
    double worst = 0;
    for (std::size_t p = 0; p < from.size(); ++p) {
      auto x = from.point(p);
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t q = 0; q < to.size(); ++q) {
        auto y = to.point(q);
        double diff = x[0] - y[0];
        double sq = diff * diff;
        for (std::size_t j = 1; j < d; ++j) {
          diff = x[j] - y[j];
          sq = sq + diff * diff;
        }
        best = sq < best ? sq : best;
      }
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::sqrt(std::max(directed(a, b), directed(b, a)));
}

}  // namespace cifs
