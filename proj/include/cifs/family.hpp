#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cifs/contraction.hpp"
#include "cifs/dsl.hpp"
#include "cifs/point_cloud.hpp"

namespace cifs {

/// A parameter of a branch, i -> value. Either a DSL expression or a native
/// generator (used by builtins whose closed form is outside the DSL).
class Coefficient {
 public:
  using Generator = std::function<Rational(std::uint64_t)>;

  Coefficient(dsl::Expr expr);  // NOLINT(google-explicit-constructor)
  static Coefficient parse(std::string_view source);
  static Coefficient native(std::string description, Generator generator);

  Rational evaluate(std::uint64_t i) const;
  std::string describe() const;
  const dsl::Expr* expression() const noexcept { return expr_ ? &*expr_ : nullptr; }

 private:
  Coefficient() = default;
  std::optional<dsl::Expr> expr_;
  std::string description_;
  Generator generator_;
};

struct BranchSpec {
  std::string label;
  Coefficient ratio;
  std::vector<Coefficient> translation;
};

/// Position of one map in a family: branch (0-based) and i (1-based).
struct MapIndex {
  std::size_t branch = 0;
  std::uint64_t i = 1;

  friend bool operator==(const MapIndex&, const MapIndex&) = default;
};

/// Countable family F = {F_i} given as a union of parametrized branches,
/// materialized up to a per-branch truncation N. Externally the family has a
/// single global index g = 1, 2, ... that interleaves branches:
/// g -> (branch (g-1) mod B, i (g-1) / B + 1).
///
/// All maps up to the truncation are built and validated at construction;
/// afterwards the object is immutable and safe to share across threads.
class IndexedFamily {
 public:
  struct Options {
    std::uint64_t truncation = 1;
    // Analytic sup |r_i| supplied by the user; never inferred.
    std::optional<Rational> declared_sup_ratio;
    // Finite families (DYADIC, tabulated lists) cap the truncation here.
    std::optional<std::uint64_t> max_index;
  };

  IndexedFamily(std::string name, std::size_t dimension, std::vector<BranchSpec> branches,
                Options options);

  const std::string& name() const noexcept { return name_; }
  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t branch_count() const noexcept { return branches_.size(); }
  const BranchSpec& branch(std::size_t b) const { return branches_.at(b); }
  std::uint64_t truncation() const noexcept { return truncation_; }
  const std::optional<Rational>& declared_sup_ratio() const noexcept { return declared_; }
  const std::optional<std::uint64_t>& max_index() const noexcept { return max_index_; }

  // Number of maps with per-branch index <= n (n clamped to the truncation).
  std::size_t map_count(std::uint64_t n) const;
  std::size_t map_count() const { return map_count(truncation_); }

  // Global index (1-based) <-> pair.
  MapIndex pair_of(std::size_t global) const;
  std::size_t global_of(MapIndex index) const;

  const MapDescriptor& materialize(MapIndex index) const;
  const MapDescriptor& map(std::size_t global) const;
  const AffineMap& float_map(std::size_t global) const;

  // Maps in global order restricted to per-branch index <= n.
  std::vector<AffineMap> float_maps(std::uint64_t n) const;
  std::vector<MapDescriptor> maps(std::uint64_t n) const;

  // Same family re-materialized with another truncation.
  IndexedFamily with_truncation(std::uint64_t n) const;

  nlohmann::json to_json() const;

 private:
  std::uint64_t clamp(std::uint64_t n) const;

  std::string name_;
  std::size_t dimension_;
  std::vector<BranchSpec> branches_;
  std::uint64_t truncation_;
  std::optional<Rational> declared_;
  std::optional<std::uint64_t> max_index_;
  std::vector<MapDescriptor> exact_;  // global order
  std::vector<AffineMap> float_;
};

// Truncated set of fixed points D_n, deduplicated within 1e-12.
PointCloud fixed_point_set(const IndexedFamily& family, std::uint64_t n);
// Exact fixed points in global order (no deduplication).
std::vector<std::vector<Rational>> exact_fixed_points(const IndexedFamily& family,
                                                      std::uint64_t n);

struct SupRatio {
  Rational empirical_exact;
  double empirical = 0;
  std::optional<double> declared;
  // Set when declared - empirical > 0.01.
  bool truncation_warning = false;
};

SupRatio sup_ratio(const IndexedFamily& family);
SupRatio sup_ratio(const IndexedFamily& family, std::uint64_t n);

namespace builtins {

IndexedFamily ex1(std::uint64_t truncation);
IndexedFamily ex2(std::uint64_t truncation);
IndexedFamily dyadic();
IndexedFamily geo(const Rational& q, std::uint64_t truncation);
IndexedFamily single_half();
// EX1 on each coordinate of the plane, second coordinate mirrored.
IndexedFamily ex1_planar(std::uint64_t truncation);

// Names: EX1, EX2, DYADIC, SINGLE, EX1_2D, GEO(q) e.g. "GEO(1/3)".
IndexedFamily by_name(std::string_view name, std::uint64_t truncation);
std::vector<std::string> names();

}  // namespace builtins

// { "dimension": d, "truncation": N, "declared_sup_ratio": x|null,
//   "branches": [ { "ratio": "<expr>", "translation": ["<expr>", ...] } ] }
// Optional extras: "name", "max_index", per-branch "label".
IndexedFamily family_from_json(const nlohmann::json& config);
IndexedFamily load_family(const std::filesystem::path& path);

}  // namespace cifs
