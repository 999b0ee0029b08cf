#include "cifs/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <unordered_map>

#include "cifs/error.hpp"
#include "cifs/kernels.hpp"

namespace cifs {

namespace {

// Geometric tables stop here even if the running sum still moves.
constexpr std::size_t kMaxGeometricTable = 1u << 22;

}  // namespace

ProbabilitySequence ProbabilitySequence::finite(std::vector<Rational> weights) {
  if (weights.empty()) throw Error(ErrorCode::kInvalidArgument, "probability list is empty");
  ProbabilitySequence seq;
  seq.kind_ = Kind::kFinite;
  double sum = 0;
  for (const auto& w : weights) {
    if (w <= 0 || w > 1 || (w == 1 && weights.size() > 1)) {
      throw Error(ErrorCode::kInvalidArgument, "probability " + to_string(w) + " outside (0, 1)");
    }
    sum += to_double(w);
    seq.cumulative_.push_back(sum);
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw Error(ErrorCode::kInvalidArgument, "probabilities sum to " + std::to_string(sum) + ", not 1");
  }
  seq.weights_ = std::move(weights);
  return seq;
}

ProbabilitySequence ProbabilitySequence::geometric(Rational q) {
  if (q <= 0 || q >= 1) throw Error(ErrorCode::kInvalidArgument, "geometric ratio must lie in (0, 1)");
  ProbabilitySequence seq;
  seq.kind_ = Kind::kGeometric;
  seq.q_ = std::move(q);
  seq.q_double_ = to_double(seq.q_);
  seq.log_q_ = std::log(seq.q_double_);
  double w = 1.0 - seq.q_double_;
  double sum = 0;
  while (seq.cumulative_.size() < kMaxGeometricTable) {
    double next = sum + w;
    if (next == sum) break;
    sum = next;
    seq.cumulative_.push_back(sum);
    w *= seq.q_double_;
  }
  return seq;
}

std::optional<std::uint64_t> ProbabilitySequence::size() const {
  if (kind_ == Kind::kFinite) return weights_.size();
  return std::nullopt;
}

Rational ProbabilitySequence::exact_weight(std::uint64_t i) const {
  if (i == 0) throw Error(ErrorCode::kInvalidArgument, "probability index starts at 1");
  if (kind_ == Kind::kFinite) return i <= weights_.size() ? weights_[i - 1] : Rational(0);
  Rational power;
  mpz_pow_ui(power.get_num_mpz_t(), q_.get_num_mpz_t(), static_cast<unsigned long>(i - 1));
  mpz_pow_ui(power.get_den_mpz_t(), q_.get_den_mpz_t(), static_cast<unsigned long>(i - 1));
  return (1 - q_) * power;
}

double ProbabilitySequence::weight(std::uint64_t i) const {
  if (i == 0) throw Error(ErrorCode::kInvalidArgument, "probability index starts at 1");
  if (kind_ == Kind::kFinite) return i <= weights_.size() ? to_double(weights_[i - 1]) : 0.0;
  return (1.0 - q_double_) * std::pow(q_double_, static_cast<double>(i - 1));
}

double ProbabilitySequence::cumulative(std::uint64_t n) const {
  if (n == 0) return 0.0;
  if (n <= cumulative_.size()) return cumulative_[n - 1];
  return cumulative_.back();
}

std::uint64_t ProbabilitySequence::sample_index(double u) const {
  const std::size_t table = cumulative_.size();
  if (kind_ == Kind::kFinite) {
    auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
    return it == cumulative_.end() ? table : static_cast<std::uint64_t>(it - cumulative_.begin()) + 1;
  }
  double guess = std::ceil(std::log1p(-u) / log_q_);
  if (!(guess >= 1)) guess = 1;
  if (guess > static_cast<double>(table) + 1) return static_cast<std::uint64_t>(guess);
  std::uint64_t i = static_cast<std::uint64_t>(guess);
  while (i > 1 && cumulative_[i - 2] >= u) --i;
  while (i <= table && cumulative_[i - 1] < u) ++i;
  return i;
}

std::uint64_t ProbabilitySequence::sample_index_by_prefix_search(double u) const {
  for (std::size_t i = 0; i < cumulative_.size(); ++i) {
    if (cumulative_[i] >= u) return i + 1;
  }
  return kind_ == Kind::kFinite ? cumulative_.size() : sample_index(u);
}

std::string ProbabilitySequence::describe() const {
  if (kind_ == Kind::kGeometric) return "geometric(" + to_string(q_) + ")";
  std::string out = "finite(";
  for (std::size_t k = 0; k < weights_.size(); ++k) out += (k ? "," : "") + to_string(weights_[k]);
  return out + ")";
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------

namespace {

std::vector<long long> lattice_key(const double* p, std::size_t d, double h) {
  std::vector<long long> key(d);
  for (std::size_t j = 0; j < d; ++j) key[j] = std::llround(p[j] / h);
  return key;
}

void require_contractive(const IndexedFamily& family, std::uint64_t n) {
  const SupRatio sup = sup_ratio(family, n);
  if (sup.empirical >= 1.0 - 1e-9) {
    throw Error(ErrorCode::kRefused, "truncated sup ratio " + std::to_string(sup.empirical) +
                                         " is not < 1 - 1e-9; no convergence guarantee");
  }
}

// One orbit; appends `count` points to out. Returns redraw count.
std::uint64_t run_chain(const std::vector<AffineMap>& maps, const ProbabilitySequence& seq,
                        std::vector<double> x, std::uint64_t burn_in, std::uint64_t count,
                        bool record_start, std::uint64_t seed, std::vector<double>& out) {
  UniformSource rng(seed);
  const std::size_t d = x.size();
  const std::size_t G = maps.size();
  std::uint64_t redraws = 0;
  std::vector<double> next(d);
  auto draw = [&]() {
    for (;;) {
      std::uint64_t g = seq.sample_index(rng.next());
      if (g >= 1 && g <= G) return g;
      ++redraws;
    }
  };
  std::uint64_t recorded = 0;
  if (record_start && count > 0) {
    out.insert(out.end(), x.begin(), x.end());
    ++recorded;
  }
  for (std::uint64_t t = 0; recorded < count; ++t) {
    const AffineMap& f = maps[draw() - 1];
    f.apply(x, next);
    std::swap(x, next);
    if (t + 1 > burn_in) {
      out.insert(out.end(), x.begin(), x.end());
      ++recorded;
    }
  }
  return redraws;
}

}  // namespace

void EmpiricalMeasure::build_histogram(double cell) {
  if (!(cell > 0)) throw Error(ErrorCode::kInvalidArgument, "histogram cell must be positive");
  Histogram h;
  h.cell = cell;
  for (std::size_t k = 0; k < size(); ++k) ++h.counts[lattice_key(samples.data() + k * dimension, dimension, cell)];
  histogram = std::move(h);
}

ChaosResult chaos_game(const IndexedFamily& family, std::uint64_t n, const ProbabilitySequence& seq,
                       const ChaosOptions& options) {
  require_contractive(family, n);
  const std::vector<AffineMap> maps = family.float_maps(n);
  ChaosResult result;
  result.measure.dimension = family.dimension();
  result.measure.samples.reserve(options.samples * family.dimension());
  result.truncation_resamples = run_chain(maps, seq, fixed_point(maps.front()), options.burn_in,
                                          options.samples, false, options.seed, result.measure.samples);
  return result;
}

ChaosResult chaos_game_multistart(const IndexedFamily& family, std::uint64_t n,
                                  const ProbabilitySequence& seq, const ChaosOptions& options) {
  require_contractive(family, n);
  const std::vector<AffineMap> maps = family.float_maps(n);
  const std::uint64_t chains = maps.size();
  ChaosResult result;
  result.chains = chains;
  result.measure.dimension = family.dimension();
  result.measure.samples.reserve(options.samples * family.dimension());
  for (std::uint64_t c = 0; c < chains; ++c) {
    std::uint64_t count = options.samples / chains + (c < options.samples % chains ? 1 : 0);
    result.truncation_resamples += run_chain(maps, seq, fixed_point(maps[c]), 0, count, true,
                                             derive_seed(options.seed, c), result.measure.samples);
  }
  return result;
}

namespace {

// W1 between the equal-weight law on `sorted` and sum_g w_g F_g# of it.
double wasserstein_markov_1d(const std::vector<double>& sorted, const std::vector<AffineMap>& maps,
                             const std::vector<double>& weights) {
  const std::size_t n = sorted.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  struct Head {
    double position;
    std::size_t run;  // 0 = mu, g + 1 = image under map g
    std::size_t k;
  };
  auto value = [&](std::size_t run, std::size_t k) {
    if (run == 0) return sorted[k];
    const AffineMap& f = maps[run - 1];
    std::size_t idx = f.ratio() < 0 ? n - 1 - k : k;
    return f.ratio() * sorted[idx] + f.translation()[0];
  };
  auto later = [](const Head& a, const Head& b) {
    return a.position > b.position || (a.position == b.position && a.run > b.run);
  };
  std::priority_queue<Head, std::vector<Head>, decltype(later)> heap(later);
  for (std::size_t run = 0; run <= maps.size(); ++run) heap.push({value(run, 0), run, 0});

  const auto& table = kernels::active();
  constexpr std::size_t kChunk = 4096;
  std::vector<double> gap(kChunk), width(kChunk);
  std::size_t filled = 0;
  double total = 0;
  double cum = 0;  // F_mu - F_nu just right of the previous position
  bool started = false;
  double previous = 0;
  while (!heap.empty()) {
    Head h = heap.top();
    heap.pop();
    if (started && h.position > previous) {
      gap[filled] = cum;
      width[filled] = h.position - previous;
      if (++filled == kChunk) {
        total += table.weighted_abs_sum(gap.data(), width.data(), filled);
        filled = 0;
      }
    }
    started = true;
    previous = h.position;
    cum += h.run == 0 ? inv_n : -weights[h.run - 1] * inv_n;
    if (h.k + 1 < n) heap.push({value(h.run, h.k + 1), h.run, h.k + 1});
  }
  total += table.weighted_abs_sum(gap.data(), width.data(), filled);
  return total;
}

}  // namespace

double markov_residual(const EmpiricalMeasure& measure, const IndexedFamily& family,
                       std::uint64_t n, const ProbabilitySequence& seq) {
  if (measure.size() == 0) throw Error(ErrorCode::kInvalidArgument, "empty measure");
  if (measure.dimension != family.dimension()) {
    throw Error(ErrorCode::kDimensionMismatch, "measure and family dimensions differ");
  }
  const std::vector<AffineMap> maps = family.float_maps(n);
  std::vector<double> weights(maps.size());
  for (std::size_t g = 0; g < maps.size(); ++g) weights[g] = seq.weight(g + 1);
  const double mass = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(mass > 0)) throw Error(ErrorCode::kInvalidArgument, "no probability mass on the truncation");
  for (double& w : weights) w /= mass;

  if (measure.dimension == 1) {
    std::vector<double> sorted = measure.samples;
    std::sort(sorted.begin(), sorted.end());
    return wasserstein_markov_1d(sorted, maps, weights);
  }
  if (!measure.histogram) {
    throw Error(ErrorCode::kInvalidArgument, "markov_residual in d >= 2 needs a histogram");
  }
  const std::size_t d = measure.dimension;
  const double h = measure.histogram->cell;
  const double inv_n = 1.0 / static_cast<double>(measure.size());
  std::map<std::vector<long long>, double> diff;
  for (const auto& [key, count] : measure.histogram->counts) diff[key] += count * inv_n;
  std::vector<double> image(d);
  for (std::size_t k = 0; k < measure.size(); ++k) {
    std::span<const double> x(measure.samples.data() + k * d, d);
    for (std::size_t g = 0; g < maps.size(); ++g) {
      maps[g].apply(x, image);
      diff[lattice_key(image.data(), d, h)] -= weights[g] * inv_n;
    }
  }
  double l1 = 0;
  for (const auto& [key, v] : diff) l1 += std::abs(v);
  return l1;
}

PointCloud support_estimate(const EmpiricalMeasure& measure, double h, std::uint64_t min_count) {
  if (!(h > 0)) throw Error(ErrorCode::kInvalidArgument, "cell size must be positive");
  const std::size_t d = measure.dimension;
  PointCloud cloud(d);
  std::vector<double> center(d);
  if (d == 1) {
    std::unordered_map<long long, std::uint64_t> counts;
    for (double x : measure.samples) ++counts[std::llround(x / h)];
    for (const auto& [key, count] : counts) {
      if (count < min_count) continue;
      center[0] = static_cast<double>(key) * h;
      cloud.add(center);
    }
  } else {
    std::map<std::vector<long long>, std::uint64_t> counts;
    for (std::size_t k = 0; k < measure.size(); ++k) ++counts[lattice_key(measure.samples.data() + k * d, d, h)];
    for (const auto& [key, count] : counts) {
      if (count < min_count) continue;
      for (std::size_t j = 0; j < d; ++j) center[j] = static_cast<double>(key[j]) * h;
      cloud.add(center);
    }
  }
  cloud.deduplicate(0.0);
  return cloud;
}

KravchenkoSum kravchenko_sum(const IndexedFamily& family, std::uint64_t n,
                             const ProbabilitySequence& seq) {
  KravchenkoSum out;
  const std::size_t G = family.map_count(n);
  const auto fixed = exact_fixed_points(family, n);
  const std::size_t d = family.dimension();
  if (d == 1) {
    Rational sum = 0, mass = 0;
    Rational lo = fixed[0][0], hi = fixed[0][0];
    for (std::size_t g = 1; g <= G; ++g) {
      Rational w = seq.exact_weight(g);
      sum += w * abs(fixed[g - 1][0] - fixed[0][0]);
      mass += w;
      lo = std::min(lo, fixed[g - 1][0]);
      hi = std::max(hi, fixed[g - 1][0]);
    }
    out.partial_sum_exact = sum;
    out.diameter_exact = hi - lo;
    out.diameter_bound_exact = mass * (hi - lo);
    out.partial_sum = to_double(sum);
    out.diameter = to_double(hi - lo);
    out.mass = to_double(mass);
    out.diameter_bound = to_double(*out.diameter_bound_exact);
  } else {
    std::vector<std::vector<double>> x(G, std::vector<double>(d));
    for (std::size_t g = 0; g < G; ++g) {
      for (std::size_t j = 0; j < d; ++j) x[g][j] = to_double(fixed[g][j]);
    }
    auto dist = [&](std::size_t a, std::size_t b) {
      double sq = 0;
      for (std::size_t j = 0; j < d; ++j) sq += (x[a][j] - x[b][j]) * (x[a][j] - x[b][j]);
      return std::sqrt(sq);
    };
    for (std::size_t g = 0; g < G; ++g) {
      out.partial_sum += seq.weight(g + 1) * dist(0, g);
      out.mass += seq.weight(g + 1);
      for (std::size_t h = g + 1; h < G; ++h) out.diameter = std::max(out.diameter, dist(g, h));
    }
    out.diameter_bound = out.mass * out.diameter;
  }
  if (seq.kind() == ProbabilitySequence::Kind::kGeometric) {
    out.tail_note = "tail mass q^" + std::to_string(G) + " beyond the truncation is not included";
  } else if (G < *seq.size()) {
    out.tail_note = std::to_string(*seq.size() - G) + " weights beyond the truncation are not included";
  } else {
    out.tail_note = "finite sequence; no tail";
  }
  return out;
}

}  // namespace cifs
