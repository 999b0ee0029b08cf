#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cifs/family.hpp"
#include "cifs/point_cloud.hpp"
#include "cifs/rational.hpp"

namespace cifs {

/// Probability weights rho_1, rho_2, ... over the global map index.
class ProbabilitySequence {
 public:
  enum class Kind { kFinite, kGeometric };

  // All weights in (0, 1), summing to 1 within 1e-12.
  static ProbabilitySequence finite(std::vector<Rational> weights);
  // rho_i = (1 - q) q^(i-1), 0 < q < 1.
  static ProbabilitySequence geometric(Rational q);

  Kind kind() const noexcept { return kind_; }
  const Rational& q() const noexcept { return q_; }
  // Number of nonzero weights, or nullopt for the infinite geometric law.
  std::optional<std::uint64_t> size() const;

  Rational exact_weight(std::uint64_t i) const;
  double weight(std::uint64_t i) const;
  // rho_1 + ... + rho_n in double, accumulated left to right.
  double cumulative(std::uint64_t n) const;

  // Smallest i with cumulative(i) >= u, u in (0, 1). The geometric kind
  // starts from ceil(log(1-u)/log q) and corrects against the same
  // cumulative table the prefix search walks, so both always agree.
  std::uint64_t sample_index(double u) const;
  // Linear walk over cumulative sums; the reference for sample_index.
  std::uint64_t sample_index_by_prefix_search(double u) const;

  std::string describe() const;

 private:
  ProbabilitySequence() = default;

  Kind kind_ = Kind::kFinite;
  Rational q_;
  double q_double_ = 0;
  double log_q_ = 0;
  std::vector<Rational> weights_;
  // Running left-to-right sums of weights in double; for the geometric law
  // the table stops once the sum stops changing.
  std::vector<double> cumulative_;
};

struct Histogram {
  double cell = 0;
  // Lattice cell (centred on cell * Z^d) -> count
  std::map<std::vector<long long>, std::uint64_t> counts;
};

/// Equal-weight samples, optionally binned.
struct EmpiricalMeasure {
  std::size_t dimension = 1;
  std::vector<double> samples;  // row-major
  std::optional<Histogram> histogram;

  std::size_t size() const noexcept { return samples.size() / dimension; }
  PointCloud as_cloud() const { return PointCloud(dimension, samples); }
  void build_histogram(double cell);
};

struct ChaosOptions {
  std::uint64_t samples = 1'000'000;
  std::uint64_t burn_in = 1'000;
  std::uint64_t seed = 42;
};

struct ChaosResult {
  EmpiricalMeasure measure;
  // Draws with global index beyond the truncated family, redrawn.
  std::uint64_t truncation_resamples = 0;
  std::uint64_t chains = 1;
};

/// Single chain x_{t+1} = F_{I_t}(x_t), I_t ~ rho, from x_0 = x_1 (fixed point
/// of the first map). Refuses (kRefused) when the truncated sup ratio is
/// >= 1 - 1e-9. Deterministic in the seed.
ChaosResult chaos_game(const IndexedFamily& family, std::uint64_t n,
                       const ProbabilitySequence& seq, const ChaosOptions& options = {});

/// One chain per map of the truncated family, chain g started at that map's
/// fixed point with no burn-in (every fixed point lies in the support, so
/// every orbit point does). Samples are split evenly and the chains merged.
/// Reaches low-mass parts of the support a single chain never visits.
ChaosResult chaos_game_multistart(const IndexedFamily& family, std::uint64_t n,
                                  const ProbabilitySequence& seq, const ChaosOptions& options = {});

/// Distance between mu and sum_{g <= n} rho~_g F_g# mu, rho~ renormalized
/// over the truncation. d = 1: exact Wasserstein-1 between the two weighted
/// empirical laws. d >= 2: L1 distance of binned masses (needs a histogram).
double markov_residual(const EmpiricalMeasure& measure, const IndexedFamily& family,
                       std::uint64_t n, const ProbabilitySequence& seq);

/// Centres of lattice cells (centred on h * Z^d) holding >= min_count samples.
PointCloud support_estimate(const EmpiricalMeasure& measure, double h, std::uint64_t min_count = 1);

struct KravchenkoSum {
  double partial_sum = 0;
  std::optional<Rational> partial_sum_exact;  // d = 1
  double diameter = 0;                        // diam of truncated D
  std::optional<Rational> diameter_exact;     // d = 1
  double mass = 0;                            // sum_{g <= n} rho_g
  double diameter_bound = 0;                  // mass * diameter
  std::optional<Rational> diameter_bound_exact;
  std::string tail_note;
};

/// sum_{g <= n} rho_g d(x_1, x_g) and the bound sum_g rho_g diam(D).
KravchenkoSum kravchenko_sum(const IndexedFamily& family, std::uint64_t n,
                             const ProbabilitySequence& seq);

// Seeded generator contract: 64-bit Mersenne Twister, uniform variates in
// the open interval (0, 1) from the top 53 bits.
class UniformSource {
 public:
  explicit UniformSource(std::uint64_t seed) : engine_(seed) {}
  double next() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1p-53; }

 private:
  std::mt19937_64 engine_;
};

// Per-chain seed from the user seed (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace cifs
