#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace cifs {

inline constexpr double kDedupTolerance = 1e-12;

/// Finite set of points in R^d stored row-major. Finite sets are closed, so a
/// cloud stands in for the closure of whatever it samples.
class PointCloud {
 public:
  explicit PointCloud(std::size_t dimension);
  PointCloud(std::size_t dimension, std::vector<double> coords);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return coords_.size() / dimension_; }
  bool empty() const noexcept { return coords_.empty(); }

  std::span<const double> point(std::size_t k) const {
    return {coords_.data() + k * dimension_, dimension_};
  }
  std::span<const double> coords() const noexcept { return coords_; }
  std::vector<double>& mutable_coords() noexcept { return coords_; }

  void add(std::span<const double> p);
  void append(const PointCloud& other);
  void reserve(std::size_t points) { coords_.reserve(points * dimension_); }

  // Lexicographic sort, then drop points within `tolerance` (max-norm) of the
  // previously kept one.
  void deduplicate(double tolerance = kDedupTolerance);

  // Keep the first point met in each cell of the lattice resolution * Z^d,
  // then sort. Order-dependent by design of the callers (length-lex words).
  void thin(double resolution);

  // Per-coordinate [min, max]; empty cloud -> empty vectors.
  std::vector<double> lower() const;
  std::vector<double> upper() const;

  // Largest gap between neighbours along the line (d = 1), else 0.
  double spacing() const;

  friend bool operator==(const PointCloud&, const PointCloud&) = default;

 private:
  std::size_t dimension_;
  std::vector<double> coords_;
};

// One point per row, d columns, 17 significant digits.
void write_csv(std::ostream& out, const PointCloud& cloud);
PointCloud read_csv(std::istream& in);

}  // namespace cifs
