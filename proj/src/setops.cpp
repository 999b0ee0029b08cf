#include "cifs/setops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "cifs/error.hpp"
#include "cifs/hausdorff.hpp"
#include "cifs/kernels.hpp"

namespace cifs {

std::uint64_t word_count(std::uint64_t alphabet, unsigned k) {
  constexpr std::uint64_t kCap = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t total = 0;
  std::uint64_t level = 1;
  for (unsigned length = 1; length <= k; ++length) {
    if (alphabet != 0 && level > kCap / alphabet) return kCap;
    level *= alphabet;
    if (total > kCap - level) return kCap;
    total += level;
  }
  return total;
}

namespace {

// Collects points either exactly (dedup at the end) or onto a lattice.
class PointSink {
 public:
  PointSink(std::size_t dim, double resolution)
      : cloud_(dim), resolution_(resolution), lattice_(resolution > kDedupTolerance) {}

  void add(const double* p) {
    const std::size_t d = cloud_.dimension();
    if (!lattice_) {
      cloud_.add({p, d});
      return;
    }
    if (d == 1) {
      if (cells1_.insert(std::llround(p[0] / resolution_)).second) cloud_.add({p, 1});
      return;
    }
    key_.resize(d);
    for (std::size_t j = 0; j < d; ++j) key_[j] = std::llround(p[j] / resolution_);
    if (cells_.insert(key_).second) cloud_.add({p, d});
  }

  PointCloud finish() {
    cloud_.deduplicate(lattice_ ? 0.0 : kDedupTolerance);
    return std::move(cloud_);
  }

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<long long>& key) const noexcept {
      std::size_t h = 1469598103934665603ULL;
      for (long long v : key) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ULL;
      return h;
    }
  };

  PointCloud cloud_;
  double resolution_;
  bool lattice_;
  std::unordered_set<long long> cells1_;
  std::unordered_set<std::vector<long long>, KeyHash> cells_;
  std::vector<long long> key_;
};

}  // namespace

Enumeration enumerate_fixed_points(const IndexedFamily& family, std::uint64_t n, unsigned k,
                                   const EnumerationOptions& options) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "N must be >= 1");
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "word length k must be >= 1");
  if (!(options.resolution > 0)) throw Error(ErrorCode::kInvalidArgument, "resolution must be positive");
  const std::vector<AffineMap> maps = family.float_maps(n);
  const std::size_t m = maps.size();
  const std::size_t d = family.dimension();
  const std::uint64_t total = word_count(m, k);
  if (total > options.budget) {
    throw Error(ErrorCode::kBudgetExceeded,
                std::to_string(total) + " words over " + std::to_string(m) + " maps up to length " +
                    std::to_string(k) + " exceed the budget of " + std::to_string(options.budget) +
                    "; use a smaller N or k");
  }

  std::vector<double> ratios(m);
  std::vector<std::vector<double>> translations(d, std::vector<double>(m));
  for (std::size_t g = 0; g < m; ++g) {
    ratios[g] = maps[g].ratio();
    for (std::size_t j = 0; j < d; ++j) translations[j][g] = maps[g].translation()[j];
  }

  const auto& table = kernels::active();
  PointSink sink(d, std::max(options.resolution, kDedupTolerance));
  std::vector<std::vector<double>> batch(d, std::vector<double>(m));
  std::vector<double> point(d);

  // prefix_ratio[t], prefix_shift[t*d + j]: composition of the first t letters.
  std::vector<double> prefix_ratio(k, 1.0);
  std::vector<double> prefix_shift(static_cast<std::size_t>(k) * d, 0.0);
  std::vector<std::size_t> letters(k, 0);

  auto emit_leaves = [&](std::size_t depth) {
    const double ratio = prefix_ratio[depth];
    for (std::size_t j = 0; j < d; ++j) {
      table.word_fixed_points(ratio, prefix_shift[depth * d + j], ratios.data(),
                              translations[j].data(), batch[j].data(), m);
    }
    for (std::size_t g = 0; g < m; ++g) {
      for (std::size_t j = 0; j < d; ++j) point[j] = batch[j][g];
      sink.add(point.data());
    }
  };
  auto extend = [&](std::size_t t) {  // prefix of length t+1 from t and letters[t]
    const AffineMap& f = maps[letters[t]];
    prefix_ratio[t + 1] = prefix_ratio[t] * f.ratio();
    for (std::size_t j = 0; j < d; ++j) {
      prefix_shift[(t + 1) * d + j] = prefix_ratio[t] * f.translation()[j] + prefix_shift[t * d + j];
    }
  };

  for (unsigned length = 1; length <= k; ++length) {
    const std::size_t depth = length - 1;  // prefix length
    std::fill(letters.begin(), letters.end(), 0);
    if (length == 1) {
      // single letters: correctly rounded exact fixed points
      for (const auto& x : exact_fixed_points(family, n)) {
        for (std::size_t j = 0; j < d; ++j) point[j] = to_double(x[j]);
        sink.add(point.data());
      }
      continue;
    }
    for (std::size_t t = 0; t < depth; ++t) extend(t);
    for (;;) {
      emit_leaves(depth);
      // advance the prefix odometer (rightmost letter fastest)
      std::size_t t = depth;
      while (t > 0 && letters[t - 1] + 1 == m) letters[--t] = 0;
      if (t == 0) break;
      ++letters[t - 1];
      for (std::size_t u = t - 1; u < depth; ++u) extend(u);
    }
  }
  return {sink.finish(), total, std::max(options.resolution, kDedupTolerance)};
}

PointCloud hutchinson_image(const PointCloud& cloud, const IndexedFamily& family, std::uint64_t n) {
  if (cloud.dimension() != family.dimension()) {
    throw Error(ErrorCode::kDimensionMismatch, "cloud and family dimensions differ");
  }
  const std::vector<AffineMap> maps = family.float_maps(n);
  const std::size_t block = cloud.coords().size();
  std::vector<double> out(block * maps.size());
  for (std::size_t g = 0; g < maps.size(); ++g) {
    kernels::affine_apply(maps[g].ratio(), maps[g].translation(), cloud.coords(),
                          std::span<double>(out.data() + g * block, block));
  }
  return PointCloud(cloud.dimension(), std::move(out));
}

PointCloud hutchinson_step(const PointCloud& cloud, const IndexedFamily& family, std::uint64_t n) {
  if (cloud.empty()) throw Error(ErrorCode::kInvalidArgument, "Hutchinson step of an empty cloud");
  PointCloud image = hutchinson_image(cloud, family, n);
  image.deduplicate();
  return image;
}

AttractorResult attractor_approx(const IndexedFamily& family, std::uint64_t n,
                                 const AttractorOptions& options) {
  if (!(options.tol > 0)) throw Error(ErrorCode::kInvalidArgument, "tol must be positive");
  const SupRatio sup = sup_ratio(family, n);
  if (sup.empirical >= 1.0 - 1e-9) {
    throw Error(ErrorCode::kRefused, "truncated sup ratio " + std::to_string(sup.empirical) +
                                         " is not < 1 - 1e-9; no convergence guarantee");
  }
  AttractorResult result{PointCloud(family.dimension()), false, 0.0, 0, 0.0};
  result.resolution = options.resolution > 0 ? options.resolution : options.tol / 16;
  result.cloud.add(fixed_point(family.float_map(1)));
  while (result.iterations < options.max_iters) {
    PointCloud next = hutchinson_image(result.cloud, family, n);
    next.thin(result.resolution);
    result.last_delta = hausdorff(result.cloud, next);
    result.cloud = std::move(next);
    ++result.iterations;
    if (result.last_delta < options.tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

InvarianceResiduals check_invariance(const PointCloud& cloud, const IndexedFamily& family,
                                     std::uint64_t n) {
  if (cloud.empty()) throw Error(ErrorCode::kInvalidArgument, "invariance check of an empty cloud");
  InvarianceResiduals r;
  PointCloud image = hutchinson_image(cloud, family, n);
  r.outer = directed_hausdorff(image, NearestIndex(cloud));
  r.inner = directed_hausdorff(cloud, NearestIndex(image));
  r.resolution = cloud.spacing();
  return r;
}

// ---------------------------------------------------------------------------

Enlargement::Enlargement(PointCloud cloud, double eps)
    : cloud_(std::move(cloud)), eps_(eps), index_(cloud_) {
  if (!(eps > 0)) throw Error(ErrorCode::kInvalidArgument, "enlargement radius must be positive");
}

bool Enlargement::contains(std::span<const double> y) const { return index_.distance(y) < eps_; }

std::vector<Interval> Enlargement::intervals() const {
  if (cloud_.dimension() != 1) {
    throw Error(ErrorCode::kInvalidArgument, "interval representation needs d = 1");
  }
  std::vector<double> xs(cloud_.coords().begin(), cloud_.coords().end());
  std::sort(xs.begin(), xs.end());
  std::vector<Interval> out;
  for (double x : xs) {
    if (!out.empty() && x - eps_ < out.back().hi) {
      out.back().hi = std::max(out.back().hi, x + eps_);
    } else {
      out.push_back({x - eps_, x + eps_});
    }
  }
  return out;
}

PointCloud Enlargement::boundary_samples() const {
  const std::size_t d = cloud_.dimension();
  PointCloud out(d);
  if (d == 1) {
    for (const auto& iv : intervals()) {
      out.add(std::span<const double>(&iv.lo, 1));
      out.add(std::span<const double>(&iv.hi, 1));
    }
    return out;
  }
  // directions in {-1, 0, 1}^d \ {0}, normalized
  std::vector<std::vector<double>> dirs;
  std::vector<int> digit(d, -1);
  for (;;) {
    double norm = 0;
    for (int v : digit) norm += v * v;
    if (norm > 0) {
      std::vector<double> u(d);
      for (std::size_t j = 0; j < d; ++j) u[j] = digit[j] / std::sqrt(norm);
      dirs.push_back(std::move(u));
    }
    std::size_t j = 0;
    while (j < d && digit[j] == 1) digit[j++] = -1;
    if (j == d) break;
    ++digit[j];
  }
  std::vector<double> y(d);
  for (std::size_t k = 0; k < cloud_.size(); ++k) {
    auto p = cloud_.point(k);
    for (const auto& u : dirs) {
      for (std::size_t j = 0; j < d; ++j) y[j] = p[j] + eps_ * u[j];
      if (index_.distance(y) >= eps_ * (1 - 1e-12)) out.add(y);
    }
  }
  out.deduplicate();
  return out;
}

PointCloud Enlargement::interior_samples(unsigned per_point) const {
  const std::size_t d = cloud_.dimension();
  PointCloud out(d);
  std::vector<double> y(d);
  for (std::size_t k = 0; k < cloud_.size(); ++k) {
    auto p = cloud_.point(k);
    out.add(p);
    for (unsigned s = 1; s <= per_point; ++s) {
      const double offset = eps_ * (1 - 1e-9) * s / (per_point + 1.0);
      for (std::size_t axis = 0; axis < d; ++axis) {
        for (double sign : {-1.0, 1.0}) {
          std::copy(p.begin(), p.end(), y.begin());
          y[axis] += sign * offset;
          out.add(y);
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::string describe(const IndexedFamily& family, const MapIndex& at) {
  return "branch " + std::to_string(at.branch + 1) + " (" + family.branch(at.branch).label +
         "), i = " + std::to_string(at.i);
}

void require_line(const IndexedFamily& family, const char* what) {
  if (family.dimension() != 1) {
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + " needs a family on the line");
  }
}

}  // namespace

NondecreasingReport verify_nondecreasing_interval(const IndexedFamily& family, std::uint64_t n) {
  require_line(family, "verify_nondecreasing_interval");
  const std::size_t count = family.map_count(n);
  for (std::size_t g = 1; g <= count; ++g) {
    if (family.map(g).ratio() < 0) {
      throw Error(ErrorCode::kRefused, "map " + describe(family, family.pair_of(g)) +
                                           " has negative ratio; not non-decreasing");
    }
  }
  NondecreasingReport report;
  auto fixed = exact_fixed_points(family, n);
  report.alpha = fixed.front()[0];
  report.beta = fixed.front()[0];
  for (const auto& x : fixed) {
    report.alpha = std::min(report.alpha, x[0]);
    report.beta = std::max(report.beta, x[0]);
  }
  report.all_pass = true;
  for (std::size_t g = 1; g <= count; ++g) {
    const MapDescriptor& f = family.map(g);
    IntervalCheck c;
    c.global = g;
    c.index = family.pair_of(g);
    c.image_lo = f.ratio() * report.alpha + f.translation()[0];
    c.image_hi = f.ratio() * report.beta + f.translation()[0];
    c.inside = report.alpha <= c.image_lo && c.image_hi <= report.beta;
    report.all_pass = report.all_pass && c.inside;
    report.checks.push_back(std::move(c));
  }
  return report;
}

bool interval_is_forward_invariant(const IndexedFamily& family, std::uint64_t n,
                                   const Rational& lo, const Rational& hi) {
  require_line(family, "interval_is_forward_invariant");
  const std::size_t count = family.map_count(n);
  for (std::size_t g = 1; g <= count; ++g) {
    const MapDescriptor& f = family.map(g);
    Rational a = f.ratio() * lo + f.translation()[0];
    Rational b = f.ratio() * hi + f.translation()[0];
    if (a > b) std::swap(a, b);
    if (a < lo || b > hi) return false;
  }
  return true;
}

namespace {

struct RationalInterval {
  Rational lo;
  Rational hi;
};

// sup over x in [lo, hi] of d(x, U), U the union of closed intervals.
Rational interval_coverage_gap(const Rational& lo, const Rational& hi,
                               std::vector<RationalInterval> pieces) {
  std::sort(pieces.begin(), pieces.end(),
            [](const RationalInterval& a, const RationalInterval& b) { return a.lo < b.lo; });
  std::vector<RationalInterval> merged;
  for (auto& p : pieces) {
    if (!merged.empty() && p.lo <= merged.back().hi) {
      merged.back().hi = std::max(merged.back().hi, p.hi);
    } else {
      merged.push_back(std::move(p));
    }
  }
  auto distance = [&](const Rational& x) {
    Rational best = -1;
    for (const auto& m : merged) {
      Rational d = x < m.lo ? Rational(m.lo - x) : (x > m.hi ? Rational(x - m.hi) : Rational(0));
      if (best < 0 || d < best) best = d;
    }
    return best;
  };
  std::vector<Rational> candidates = {lo, hi};
  for (std::size_t k = 1; k < merged.size(); ++k) {
    Rational mid = (merged[k - 1].hi + merged[k].lo) / 2;
    candidates.push_back(std::clamp(mid, lo, hi));
  }
  Rational worst = 0;
  for (const auto& x : candidates) worst = std::max(worst, distance(x));
  return worst;
}

}  // namespace

EnlargementReport verify_enlargement_invariance(const IndexedFamily& family, std::uint64_t n,
                                                const PointCloud& A,
                                                std::span<const Rational> eps_grid,
                                                unsigned samples_per_axis) {
  if (A.empty()) throw Error(ErrorCode::kInvalidArgument, "enlargement of an empty cloud");
  if (A.dimension() != family.dimension()) {
    throw Error(ErrorCode::kDimensionMismatch, "cloud and family dimensions differ");
  }
  if (samples_per_axis < 2) throw Error(ErrorCode::kInvalidArgument, "need >= 2 samples per axis");
  const std::size_t d = A.dimension();
  const std::size_t count = family.map_count(n);
  const std::vector<double> a_lo = A.lower();
  const std::vector<double> a_hi = A.upper();

  EnlargementReport report;
  for (const Rational& eps : eps_grid) {
    if (eps < 0) throw Error(ErrorCode::kInvalidArgument, "eps must be >= 0");
    EnlargementEntry e;
    e.eps = eps;
    for (std::size_t j = 0; j < d; ++j) {
      e.lo.push_back(Rational(a_lo[j]) - eps);
      e.hi.push_back(Rational(a_hi[j]) + eps);
    }
    if (eps == 0) {
      InvarianceResiduals r = check_invariance(A, family, n);
      e.outer = r.outer;
      e.inner = r.inner;
      e.resolution = r.resolution;
      report.entries.push_back(std::move(e));
      continue;
    }

    // image rectangles, exact
    std::vector<std::vector<RationalInterval>> images(count, std::vector<RationalInterval>(d));
    Rational outer_sq = 0;
    for (std::size_t g = 1; g <= count; ++g) {
      const MapDescriptor& f = family.map(g);
      Rational excess_sq = 0;
      for (std::size_t j = 0; j < d; ++j) {
        Rational u = f.ratio() * e.lo[j] + f.translation()[j];
        Rational v = f.ratio() * e.hi[j] + f.translation()[j];
        if (u > v) std::swap(u, v);
        Rational excess = std::max({Rational(0), Rational(e.lo[j] - u), Rational(v - e.hi[j])});
        excess_sq += excess * excess;
        images[g - 1][j] = {std::move(u), std::move(v)};
      }
      outer_sq = std::max(outer_sq, excess_sq);
    }
    e.outer = std::sqrt(to_double(outer_sq));
    e.outer_exact = true;

    if (d == 1) {
      std::vector<RationalInterval> pieces;
      pieces.reserve(count);
      for (auto& img : images) pieces.push_back(img[0]);
      e.inner = to_double(interval_coverage_gap(e.lo[0], e.hi[0], std::move(pieces)));
      e.inner_exact = true;
    } else {
      std::vector<double> lo(d), hi(d), step(d);
      std::vector<std::vector<double>> rect_lo(count, std::vector<double>(d)),
          rect_hi(count, std::vector<double>(d));
      for (std::size_t g = 0; g < count; ++g) {
        for (std::size_t j = 0; j < d; ++j) {
          rect_lo[g][j] = to_double(images[g][j].lo);
          rect_hi[g][j] = to_double(images[g][j].hi);
        }
      }
      for (std::size_t j = 0; j < d; ++j) {
        lo[j] = to_double(e.lo[j]);
        hi[j] = to_double(e.hi[j]);
        step[j] = (hi[j] - lo[j]) / (samples_per_axis - 1);
        e.resolution = std::max(e.resolution, step[j]);
      }
      std::vector<unsigned> at(d, 0);
      std::vector<double> y(d);
      double worst = 0;
      for (;;) {
        for (std::size_t j = 0; j < d; ++j) {
          y[j] = at[j] + 1 == samples_per_axis ? hi[j] : lo[j] + at[j] * step[j];
        }
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t g = 0; g < count && best > 0; ++g) {
          double sq = 0;
          for (std::size_t j = 0; j < d; ++j) {
            double out = std::max({0.0, rect_lo[g][j] - y[j], y[j] - rect_hi[g][j]});
            sq += out * out;
          }
          best = std::min(best, sq);
        }
        worst = std::max(worst, best);
        std::size_t j = 0;
        while (j < d && ++at[j] == samples_per_axis) at[j++] = 0;
        if (j == d) break;
      }
      e.inner = std::sqrt(worst);
    }
    report.entries.push_back(std::move(e));
  }
  return report;
}

Rational ex2_y_closed_form(std::uint64_t i) {
  const Rational q{Integer(i)};
  return -2 * q * (q + 1) / (2 * q + 1);
}

Rational ex2_z_closed_form(std::uint64_t i) {
  const Rational q{Integer(i)};
  return (-q * q + (q + 1) * (q + 1) * (2 * q + 1)) / (q * (2 * q + 1));
}

WitnessReport witness_unbounded_P(const IndexedFamily& family, std::uint64_t i_max) {
  require_line(family, "witness_unbounded_P");
  if (family.branch_count() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "witness_unbounded_P needs a two-branch family");
  }
  if (i_max == 0) throw Error(ErrorCode::kInvalidArgument, "i_max must be >= 1");
  const IndexedFamily& source = family;
  std::optional<IndexedFamily> extended;
  if (i_max > family.truncation()) extended.emplace(family.with_truncation(i_max));
  const IndexedFamily& fam = extended ? *extended : source;
  if (i_max > fam.truncation()) {
    throw Error(ErrorCode::kInvalidArgument, "family is finite; i_max exceeds its size");
  }

  WitnessReport report;
  report.y_monotone = true;
  report.z_monotone = true;
  const bool closed_forms = fam.name() == "EX2";
  bool match = true;
  for (std::uint64_t i = 1; i <= i_max; ++i) {
    const MapDescriptor& f = fam.materialize({0, i});
    const MapDescriptor& f_tilde = fam.materialize({1, i});
    WitnessEntry e{i, fixed_point(compose(f_tilde, f))[0], fixed_point(compose(f, f_tilde))[0]};
    if (!report.entries.empty()) {
      report.y_monotone = report.y_monotone && abs(e.y) > abs(report.entries.back().y);
      report.z_monotone = report.z_monotone && abs(e.z) > abs(report.entries.back().z);
    }
    report.max_abs_y = std::max(report.max_abs_y, abs(e.y));
    report.max_abs_z = std::max(report.max_abs_z, abs(e.z));
    if (closed_forms) match = match && e.y == ex2_y_closed_form(i) && e.z == ex2_z_closed_form(i);
    report.entries.push_back(std::move(e));
  }
  if (closed_forms) report.closed_form_match = match;
  return report;
}

}  // namespace cifs
