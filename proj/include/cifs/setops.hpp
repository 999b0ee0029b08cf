#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cifs/family.hpp"
#include "cifs/hausdorff.hpp"
#include "cifs/point_cloud.hpp"
#include "cifs/rational.hpp"

namespace cifs {

// ---------------------------------------------------------------------------
// Fixed points of finite compositions

struct EnumerationOptions {
  // Upper bound on the number of words visited (all lengths together).
  std::uint64_t budget = 1'000'000;
  // Points closer than this collapse. Above kDedupTolerance the first word
  // (length-lexicographic order) in each lattice cell is kept.
  double resolution = kDedupTolerance;
};

struct Enumeration {
  PointCloud points;
  std::uint64_t words = 0;
  double resolution = kDedupTolerance;
};

/// Fixed points x_w of every word w of length 1..k over the maps with
/// per-branch index <= n. Throws kBudgetExceeded before doing any work when
/// the word count exceeds the budget.
Enumeration enumerate_fixed_points(const IndexedFamily& family, std::uint64_t n, unsigned k,
                                   const EnumerationOptions& options = {});

// Number of words of length 1..k over an alphabet of size m, saturating.
std::uint64_t word_count(std::uint64_t alphabet, unsigned k);

// ---------------------------------------------------------------------------
// Hutchinson operator and attractor

// Union of F_g(cloud) for all maps with per-branch index <= n, without
// deduplication. Order: map-major, then cloud order.
PointCloud hutchinson_image(const PointCloud& cloud, const IndexedFamily& family, std::uint64_t n);

// hutchinson_image followed by deduplication within kDedupTolerance.
PointCloud hutchinson_step(const PointCloud& cloud, const IndexedFamily& family, std::uint64_t n);

struct AttractorOptions {
  double tol = 1e-3;
  unsigned max_iters = 200;
  // Thinning lattice for intermediate clouds; 0 picks tol / 16.
  double resolution = 0;
};

struct AttractorResult {
  PointCloud cloud;
  bool converged = false;
  double last_delta = 0;
  unsigned iterations = 0;
  double resolution = 0;
};

/// Iterates the Hutchinson operator from {x_1} until successive clouds are
/// within tol in Hausdorff distance. Refuses (kRefused) when the truncated
/// sup ratio is >= 1 - 1e-9.
AttractorResult attractor_approx(const IndexedFamily& family, std::uint64_t n,
                                 const AttractorOptions& options = {});

// ---------------------------------------------------------------------------
// Invariance residuals

struct InvarianceResiduals {
  // max_g sup_{a} d(F_g(a), cloud)
  double outer = 0;
  // sup_{a} d(a, U_g F_g(cloud))
  double inner = 0;
  // Largest neighbour gap of the cloud (d = 1), else 0.
  double resolution = 0;
};

InvarianceResiduals check_invariance(const PointCloud& cloud, const IndexedFamily& family,
                                     std::uint64_t n);

// ---------------------------------------------------------------------------
// Enlargements

struct Interval {
  double lo;
  double hi;
};

/// Open enlargement A_eps = {y : d(y, A) < eps} of a cloud.
class Enlargement {
 public:
  Enlargement(PointCloud cloud, double eps);

  double eps() const noexcept { return eps_; }
  const PointCloud& base() const noexcept { return cloud_; }

  bool contains(std::span<const double> y) const;

  // Maximal open intervals making up A_eps; d = 1 only.
  std::vector<Interval> intervals() const;

  // Points on the boundary of A_eps: interval endpoints in d = 1, otherwise
  // axis and diagonal directions around each point, filtered to the boundary.
  PointCloud boundary_samples() const;

  // Points strictly inside: each base point shifted by fractions of eps.
  PointCloud interior_samples(unsigned per_point) const;

 private:
  PointCloud cloud_;
  double eps_;
  NearestIndex index_;
};

// ---------------------------------------------------------------------------
// Checks of closed-form statements

struct IntervalCheck {
  std::size_t global = 0;
  MapIndex index;
  Rational image_lo;
  Rational image_hi;
  bool inside = false;
};

struct NondecreasingReport {
  Rational alpha;  // inf of truncated D
  Rational beta;   // sup of truncated D
  std::vector<IntervalCheck> checks;
  bool all_pass = false;
};

/// For d = 1 families whose maps all have ratio >= 0: checks exactly that
/// F_g([inf D, sup D]) lies in [inf D, sup D] for every materialized map.
/// Refuses (kRefused, naming the map) on a negative ratio.
NondecreasingReport verify_nondecreasing_interval(const IndexedFamily& family, std::uint64_t n);

// Exact check that every map with index <= n sends [lo, hi] into itself.
bool interval_is_forward_invariant(const IndexedFamily& family, std::uint64_t n,
                                   const Rational& lo, const Rational& hi);

struct EnlargementEntry {
  Rational eps;
  std::vector<Rational> lo;  // closed hull of the enlargement
  std::vector<Rational> hi;
  double outer = 0;
  double inner = 0;
  bool outer_exact = false;  // outer residual computed in rationals
  bool inner_exact = false;  // inner residual computed in rationals (d = 1)
  double resolution = 0;     // sampling resolution of the inner residual when not exact
};

struct EnlargementReport {
  std::vector<EnlargementEntry> entries;
};

/// For each eps > 0: the closed interval/rectangle hull of A_eps, i.e.
/// prod_j [min_j A - eps, max_j A + eps], and its two invariance residuals.
/// d = 1 is exact interval arithmetic; d >= 2 gets an exact outer residual
/// and an inner residual sampled on a grid with `samples_per_axis` points.
/// eps = 0 reduces to check_invariance on A itself.
EnlargementReport verify_enlargement_invariance(const IndexedFamily& family, std::uint64_t n,
                                                const PointCloud& A,
                                                std::span<const Rational> eps_grid,
                                                unsigned samples_per_axis = 101);

struct WitnessEntry {
  std::uint64_t i = 0;
  Rational y;  // fixed point of F~_i o F_i
  Rational z;  // fixed point of F_i o F~_i
};

struct WitnessReport {
  std::vector<WitnessEntry> entries;
  Rational max_abs_y;
  Rational max_abs_z;
  bool y_monotone = false;  // |y_i| strictly increasing in i
  bool z_monotone = false;
  // Only for EX2: y_i = -2i(i+1)/(2i+1), z_i = (-i^2 + (i+1)^2 (2i+1)) / (i(2i+1)).
  std::optional<bool> closed_form_match;
};

Rational ex2_y_closed_form(std::uint64_t i);
Rational ex2_z_closed_form(std::uint64_t i);

/// Two-branch families: fixed points of the cross compositions of branch 1
/// and branch 2 at equal index, for i <= i_max.
WitnessReport witness_unbounded_P(const IndexedFamily& family, std::uint64_t i_max);

}  // namespace cifs
