#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cifs/point_cloud.hpp"

namespace cifs {

/// Uniform-grid bucket index over a point cloud for exact nearest squared
/// distances. Queries return exactly what a linear scan would: the grid only
/// decides which buckets can be skipped.
class NearestIndex {
 public:
  explicit NearestIndex(const PointCloud& cloud);

  std::size_t dimension() const noexcept { return dim_; }
  double min_squared_distance(std::span<const double> query) const;
  double distance(std::span<const double> query) const;

 private:
  void scan_ring(std::span<const double> query, const std::vector<std::int64_t>& center,
                 std::int64_t ring, double& best) const;

  std::size_t dim_;
  std::vector<double> origin_;
  double cell_ = 1.0;
  std::vector<std::int64_t> extent_;   // cells per axis
  std::vector<std::size_t> stride_;
  std::vector<std::size_t> start_;     // bucket offsets, size cells + 1
  std::vector<double> sorted_;         // points grouped by bucket
};

// sup_{a in from} d(a, to), grid accelerated.
double directed_hausdorff(const PointCloud& from, const PointCloud& to);
double directed_hausdorff(const PointCloud& from, const NearestIndex& to);
double hausdorff(const PointCloud& a, const PointCloud& b);

// O(|a||b|) reference with the same per-pair arithmetic.
double hausdorff_brute_force(const PointCloud& a, const PointCloud& b);

}  // namespace cifs
