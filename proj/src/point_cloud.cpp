#include "cifs/point_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_set>

#include "cifs/error.hpp"

namespace cifs {

PointCloud::PointCloud(std::size_t dimension) : dimension_(dimension) {
  if (dimension_ == 0) throw Error(ErrorCode::kInvalidArgument, "dimension must be positive");
}

PointCloud::PointCloud(std::size_t dimension, std::vector<double> coords)
    : dimension_(dimension), coords_(std::move(coords)) {
  if (dimension_ == 0) throw Error(ErrorCode::kInvalidArgument, "dimension must be positive");
  if (coords_.size() % dimension_ != 0) {
    throw Error(ErrorCode::kDimensionMismatch, "coordinate count is not a multiple of dimension");
  }
}

void PointCloud::add(std::span<const double> p) {
  if (p.size() != dimension_) {
    throw Error(ErrorCode::kDimensionMismatch, "point dimension does not match cloud");
  }
  coords_.insert(coords_.end(), p.begin(), p.end());
}

void PointCloud::append(const PointCloud& other) {
  if (other.dimension_ != dimension_) {
    throw Error(ErrorCode::kDimensionMismatch, "cannot merge clouds of different dimension");
  }
  coords_.insert(coords_.end(), other.coords_.begin(), other.coords_.end());
}

void PointCloud::deduplicate(double tolerance) {
  const std::size_t d = dimension_;
  const std::size_t n = size();
  if (n == 0) return;
  if (d == 1) {
    std::sort(coords_.begin(), coords_.end());
    std::size_t kept = 1;
    for (std::size_t k = 1; k < n; ++k) {
      if (coords_[k] - coords_[kept - 1] > tolerance) coords_[kept++] = coords_[k];
    }
    coords_.resize(kept);
    return;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(coords_.begin() + a * d, coords_.begin() + (a + 1) * d,
                                        coords_.begin() + b * d, coords_.begin() + (b + 1) * d);
  });
  std::vector<double> out;
  out.reserve(coords_.size());
  for (std::size_t k : order) {
    const double* p = coords_.data() + k * d;
    if (!out.empty()) {
      const double* last = out.data() + out.size() - d;
      double diff = 0;
      for (std::size_t j = 0; j < d; ++j) diff = std::max(diff, std::abs(p[j] - last[j]));
      if (diff <= tolerance) continue;
    }
    out.insert(out.end(), p, p + d);
  }
  coords_ = std::move(out);
}

namespace {

struct CellHash {
  std::size_t operator()(const std::vector<long long>& key) const noexcept {
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    for (long long v : key) {
      h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

}  // namespace

void PointCloud::thin(double resolution) {
  if (!(resolution > 0)) throw Error(ErrorCode::kInvalidArgument, "resolution must be positive");
  const std::size_t d = dimension_;
  std::unordered_set<std::vector<long long>, CellHash> seen;
  std::vector<double> out;
  std::vector<long long> key(d);
  for (std::size_t k = 0; k < size(); ++k) {
    const double* p = coords_.data() + k * d;
    for (std::size_t j = 0; j < d; ++j) key[j] = std::llround(p[j] / resolution);
    if (seen.insert(key).second) out.insert(out.end(), p, p + d);
  }
  coords_ = std::move(out);
  deduplicate(0.0);
}

std::vector<double> PointCloud::lower() const {
  if (empty()) return {};
  std::vector<double> lo(coords_.begin(), coords_.begin() + dimension_);
  for (std::size_t k = 1; k < size(); ++k) {
    for (std::size_t j = 0; j < dimension_; ++j) lo[j] = std::min(lo[j], coords_[k * dimension_ + j]);
  }
  return lo;
}

std::vector<double> PointCloud::upper() const {
  if (empty()) return {};
  std::vector<double> hi(coords_.begin(), coords_.begin() + dimension_);
  for (std::size_t k = 1; k < size(); ++k) {
    for (std::size_t j = 0; j < dimension_; ++j) hi[j] = std::max(hi[j], coords_[k * dimension_ + j]);
  }
  return hi;
}

double PointCloud::spacing() const {
  if (dimension_ != 1 || size() < 2) return 0.0;
  std::vector<double> sorted = coords_;
  std::sort(sorted.begin(), sorted.end());
  double gap = 0;
  for (std::size_t k = 1; k < sorted.size(); ++k) gap = std::max(gap, sorted[k] - sorted[k - 1]);
  return gap;
}

void write_csv(std::ostream& out, const PointCloud& cloud) {
  char buffer[32];
  for (std::size_t k = 0; k < cloud.size(); ++k) {
    auto p = cloud.point(k);
    for (std::size_t j = 0; j < p.size(); ++j) {
      std::snprintf(buffer, sizeof buffer, "%.17g", p[j]);
      if (j) out << ',';
      out << buffer;
    }
    out << '\n';
  }
}

PointCloud read_csv(std::istream& in) {
  std::vector<double> coords;
  std::size_t dimension = 0;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream fields(line);
    std::string field;
    std::size_t columns = 0;
    while (std::getline(fields, field, ',')) {
      try {
        coords.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw Error(ErrorCode::kIo, "bad number '" + field + "' on CSV row " + std::to_string(row));
      }
      ++columns;
    }
    if (dimension == 0) dimension = columns;
    if (columns != dimension) {
      throw Error(ErrorCode::kIo, "ragged CSV row " + std::to_string(row));
    }
  }
  if (dimension == 0) throw Error(ErrorCode::kIo, "empty CSV");
  return PointCloud(dimension, std::move(coords));
}

}  // namespace cifs
