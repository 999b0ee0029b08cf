#include "cifs/verify.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>

#include <boost/multiprecision/cpp_int.hpp>

#include "cifs/dsl.hpp"
#include "cifs/error.hpp"
#include "cifs/family.hpp"
#include "cifs/hausdorff.hpp"
#include "cifs/measure.hpp"
#include "cifs/setops.hpp"

namespace cifs::verify {

using nlohmann::json;

std::string_view to_string(Status status) {
  switch (status) {
    case Status::kPass: return "pass";
    case Status::kFail: return "fail";
    case Status::kNotApplicable: return "not-applicable";
    case Status::kError: return "error";
  }
  return "error";
}

json ClaimResult::to_json() const {
  return {{"id", id},
          {"anchor", anchor},
          {"status", verify::to_string(status)},
          {"parameters", parameters},
          {"measured", measured},
          {"tolerance", tolerance},
          {"message", message},
          {"seconds", seconds}};
}

namespace {

json exact(const Rational& q) { return {{"exact", cifs::to_string(q)}, {"value", to_double(q)}}; }

Status verdict(bool ok) { return ok ? Status::kPass : Status::kFail; }

Rational reciprocal(std::uint64_t n) { return Rational(Integer(1), Integer(std::to_string(n), 10)); }

PointCloud grid_1d(double lo, double hi, std::size_t points) {
  PointCloud cloud(1);
  for (std::size_t k = 0; k < points; ++k) {
    const double x = k + 1 == points ? hi : lo + (hi - lo) * k / (points - 1);
    cloud.add(std::span<const double>(&x, 1));
  }
  return cloud;
}

// ---------------------------------------------------------------------------

void example1_fixed_points(ClaimResult& r, const Options&) {
  constexpr std::uint64_t kN = 10'000;
  const IndexedFamily fam = builtins::ex1(kN);
  std::uint64_t mismatches = 0;
  std::uint64_t first_bad = 0;
  const auto fixed = exact_fixed_points(fam, kN);
  for (std::uint64_t i = 1; i <= kN; ++i) {
    if (fixed[i - 1][0] != reciprocal(i + 1)) {
      if (mismatches++ == 0) first_bad = i;
    }
  }
  r.parameters = {{"family", "EX1"}, {"N", kN}};
  r.measured = {{"mismatches", mismatches}, {"first_mismatch", first_bad},
                {"x_1", exact(fixed[0][0])}, {"x_N", exact(fixed[kN - 1][0])}};
  r.tolerance = {{"kind", "exact"}};
  r.status = verdict(mismatches == 0);
}

void example1_invariant_interval(ClaimResult& r, const Options&) {
  constexpr std::uint64_t kN = 10'000;
  const IndexedFamily fam = builtins::ex1(kN);
  const Rational lo = 0;
  const Rational hi = Rational(1, 2);
  const bool invariant = interval_is_forward_invariant(fam, kN, lo, hi);
  bool contains_d = true;
  for (const auto& x : exact_fixed_points(fam, kN)) contains_d = contains_d && lo <= x[0] && x[0] <= hi;
  r.parameters = {{"family", "EX1"}, {"N", kN}, {"interval", {"0", "1/2"}}};
  r.measured = {{"forward_invariant", invariant}, {"contains_fixed_points", contains_d}};
  r.tolerance = {{"kind", "exact"}};
  r.status = verdict(invariant && contains_d);
}

void example2_unbounded(ClaimResult& r, const Options& o) {
  const std::string name = o.family.value_or("EX2");
  const IndexedFamily fam = builtins::by_name(name, o.imax);
  const WitnessReport w = witness_unbounded_P(fam, o.imax);
  std::optional<std::uint64_t> first_over_100;
  for (const auto& e : w.entries) {
    if (!first_over_100 && abs(e.y) > 100) first_over_100 = e.i;
  }
  r.parameters = {{"family", fam.name()}, {"imax", o.imax}};
  r.measured = {{"y_1", exact(w.entries.front().y)},
                {"z_1", exact(w.entries.front().z)},
                {"max_abs_y", exact(w.max_abs_y)},
                {"max_abs_z", exact(w.max_abs_z)},
                {"y_monotone", w.y_monotone},
                {"z_monotone", w.z_monotone},
                {"first_i_with_abs_y_over_100", first_over_100 ? json(*first_over_100) : json(nullptr)}};
  if (w.closed_form_match) r.measured["closed_form_match"] = *w.closed_form_match;
  if (o.imax >= 100) r.measured["abs_y_100"] = exact(abs(w.entries[99].y));
  r.tolerance = {{"kind", "exact"}, {"growth_threshold", 100}, {"growth_by_i", 100}};
  bool ok = w.closed_form_match.value_or(true) && w.y_monotone && w.z_monotone;
  if (o.imax >= 100) ok = ok && first_over_100 && *first_over_100 <= 100;
  r.status = verdict(ok);
}

void minimality(ClaimResult& r, const Options&) {
  const IndexedFamily fam = builtins::dyadic();
  AttractorOptions ao;
  ao.tol = 1e-4;
  const AttractorResult att = attractor_approx(fam, 2, ao);
  json trend = json::array();
  double previous = std::numeric_limits<double>::infinity();
  bool nonincreasing = true;
  double last = 0;
  for (unsigned k : {4u, 8u, 12u}) {
    const Enumeration en = enumerate_fixed_points(fam, 2, k);
    last = hausdorff(en.points, att.cloud);
    nonincreasing = nonincreasing && last <= previous;
    previous = last;
    trend.push_back({{"k", k}, {"points", en.points.size()}, {"hausdorff", last}});
  }
  const double bound = std::ldexp(1.0, -10);
  r.parameters = {{"family", "DYADIC"}, {"N", 2}, {"k", 12}, {"attractor_tol", ao.tol}};
  r.measured = {{"hausdorff", last}, {"attractor_converged", att.converged},
                {"attractor_points", att.cloud.size()}, {"trend", trend}};
  r.tolerance = {{"max_hausdorff", bound}};
  r.status = verdict(att.converged && nonincreasing && last <= bound);
}

void attractor_bounded(ClaimResult& r, const Options&) {
  const IndexedFamily dy = builtins::dyadic();
  AttractorOptions ao;
  const AttractorResult att = attractor_approx(dy, 2, ao);
  const InvarianceResiduals res = check_invariance(att.cloud, dy, 2);
  const double to_grid = hausdorff(att.cloud, grid_1d(0, 1, 10'001));
  const bool in_unit = att.cloud.lower()[0] >= 0 && att.cloud.upper()[0] <= 1;

  const IndexedFamily ex1 = builtins::ex1(2);
  const AttractorResult att1 = attractor_approx(ex1, 2, ao);
  const bool in_half = att1.cloud.lower()[0] >= 0 && att1.cloud.upper()[0] <= 0.5;

  const AttractorResult single = attractor_approx(builtins::single_half(), 1, ao);

  r.parameters = {{"families", {"DYADIC", "EX1 (N=2)", "SINGLE"}}, {"tol", ao.tol}};
  r.measured = {{"dyadic", {{"converged", att.converged},
                            {"iterations", att.iterations},
                            {"last_delta", att.last_delta},
                            {"outer_residual", res.outer},
                            {"inner_residual", res.inner},
                            {"hausdorff_to_unit_grid", to_grid},
                            {"within_unit_interval", in_unit}}},
                {"ex1_n2", {{"converged", att1.converged},
                            {"lower", att1.cloud.lower()[0]},
                            {"upper", att1.cloud.upper()[0]},
                            {"within_0_half", in_half}}},
                {"single_points", single.cloud.size()}};
  r.tolerance = {{"max_residual", 2 * ao.tol}, {"max_hausdorff_to_grid", ao.tol}};
  r.status = verdict(att.converged && res.outer <= 2 * ao.tol && res.inner <= 2 * ao.tol &&
                     to_grid <= ao.tol && in_unit && att1.converged && in_half &&
                     single.cloud.size() == 1);
}

void closed_invariant_contains_p(ClaimResult& r, const Options&) {
  constexpr double kTol = 1e-9;
  struct Case {
    IndexedFamily family;
    std::uint64_t n;
    unsigned k;
    Rational lo, hi;
  };
  std::vector<Case> cases;
  cases.push_back({builtins::ex1(20), 20, 4, Rational(0), Rational(1, 2)});
  cases.push_back({builtins::dyadic(), 2, 12, Rational(0), Rational(1)});
  json out = json::array();
  bool ok = true;
  for (const Case& c : cases) {
    const bool invariant = interval_is_forward_invariant(c.family, c.n, c.lo, c.hi);
    const Enumeration en = enumerate_fixed_points(c.family, c.n, c.k);
    const double lo = to_double(c.lo), hi = to_double(c.hi);
    double worst = 0;
    for (double x : en.points.coords()) worst = std::max({worst, lo - x, x - hi});
    ok = ok && invariant && worst <= kTol;
    out.push_back({{"family", c.family.name()}, {"N", c.n}, {"k", c.k},
                   {"interval", {cifs::to_string(c.lo), cifs::to_string(c.hi)}},
                   {"interval_invariant", invariant}, {"points", en.points.size()},
                   {"max_distance_outside", worst}});
  }
  r.measured = {{"cases", out}};
  r.tolerance = {{"max_distance_outside", kTol}};
  r.status = verdict(ok);
}

void nondecreasing(ClaimResult& r, const Options& o) {
  constexpr std::uint64_t kN = 1000;
  std::vector<IndexedFamily> families;
  if (o.family) {
    families.push_back(builtins::by_name(*o.family, kN));
  } else {
    families.push_back(builtins::ex1(kN));
    families.push_back(builtins::dyadic());
  }
  json out = json::array();
  bool ok = true;
  for (const auto& fam : families) {
    r.parameters["families"].push_back(fam.name());
    try {
      const NondecreasingReport rep = verify_nondecreasing_interval(fam, kN);
      std::size_t failing = 0;
      for (const auto& c : rep.checks) failing += c.inside ? 0 : 1;
      out.push_back({{"family", fam.name()}, {"alpha", exact(rep.alpha)}, {"beta", exact(rep.beta)},
                     {"maps_checked", rep.checks.size()}, {"maps_failing", failing}});
      ok = ok && rep.all_pass;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kRefused) throw;
      r.measured = {{"refusal", e.what()}};
      r.message = e.what();
      r.status = Status::kNotApplicable;
      return;
    }
  }
  r.parameters["N"] = kN;
  r.measured = {{"families", out}};
  r.tolerance = {{"kind", "exact"}};
  r.status = verdict(ok);
}

double uniform_cdf_deviation(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double worst = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double f = std::clamp(xs[k], 0.0, 1.0);
    worst = std::max({worst, std::abs((k + 1) / n - f), std::abs(k / n - f)});
  }
  return worst;
}

void invariant_measure(ClaimResult& r, const Options& o) {
  const IndexedFamily fam = builtins::dyadic();
  const auto half = ProbabilitySequence::finite({Rational(1, 2), Rational(1, 2)});
  ChaosOptions co;
  co.samples = o.samples;
  co.seed = o.seed;
  const ChaosResult run = chaos_game(fam, 2, half, co);
  const double cdf = uniform_cdf_deviation(run.measure.samples);
  const double w1 = markov_residual(run.measure, fam, 2, half);

  const auto skew = ProbabilitySequence::finite({Rational(1, 3), Rational(2, 3)});
  const ChaosResult run2 = chaos_game(fam, 2, skew, co);
  double mean = 0;
  for (double x : run2.measure.samples) mean += x;
  mean /= static_cast<double>(run2.measure.size());

  // Wrong measure: uniform on [0, 2].
  EmpiricalMeasure wrong;
  wrong.samples.resize(o.samples);
  for (std::uint64_t k = 0; k < o.samples; ++k) wrong.samples[k] = 2.0 * (k + 0.5) / o.samples;
  const double w1_wrong = markov_residual(wrong, fam, 2, half);

  r.parameters = {{"family", "DYADIC"}, {"rho", {"1/2", "1/2"}}, {"samples", co.samples},
                  {"burn_in", co.burn_in}, {"seed", co.seed}};
  r.measured = {{"cdf_max_deviation", cdf},
                {"markov_residual_w1", w1},
                {"mean_under_1_3_2_3", mean},
                {"markov_residual_uniform_0_2", w1_wrong}};
  r.tolerance = {{"cdf_max_deviation", 1e-2}, {"markov_residual_w1", 5e-3},
                 {"mean_error", 3e-3}, {"wrong_measure_min_residual", 0.2}};
  r.status = verdict(cdf <= 1e-2 && w1 <= 5e-3 && std::abs(mean - 2.0 / 3.0) <= 3e-3 &&
                     w1_wrong >= 0.2);
}

void support_equals_p(ClaimResult& r, const Options& o) {
  constexpr std::uint64_t kN = 20;
  constexpr unsigned kK = 6;
  const double h = 1.0 / 128;
  const IndexedFamily fam = builtins::ex1(kN);
  const auto geo = ProbabilitySequence::geometric(Rational(1, 2));
  ChaosOptions co;
  co.samples = o.samples;
  co.burn_in = 0;
  co.seed = o.seed;
  const ChaosResult run = chaos_game_multistart(fam, kN, geo, co);
  const PointCloud support = support_estimate(run.measure, h);
  EnumerationOptions eo;
  eo.budget = 100'000'000;
  eo.resolution = h / 16;
  const Enumeration en = enumerate_fixed_points(fam, kN, kK, eo);
  const double hd = hausdorff(support, en.points);
  const double d_to_support = directed_hausdorff(fixed_point_set(fam, kN), support);
  const double bound = 2 * h + en.resolution;

  r.parameters = {{"family", "EX1"}, {"N", kN}, {"k", kK}, {"rho", geo.describe()},
                  {"samples", co.samples}, {"seed", co.seed}, {"h", h},
                  {"sampler", "one chain per fixed point, merged"}};
  r.measured = {{"hausdorff_support_P", hd},
                {"support_cells", support.size()},
                {"P_points", en.points.size()},
                {"P_words", en.words},
                {"P_resolution", en.resolution},
                {"fixed_points_to_support", d_to_support},
                {"truncation_resamples", run.truncation_resamples}};
  r.tolerance = {{"max_hausdorff", bound}, {"max_fixed_point_distance", 2 * h}};
  r.status = verdict(hd <= bound && d_to_support <= 2 * h);
}

void enlargement_lemma(ClaimResult& r, const Options&) {
  const IndexedFamily dy = builtins::dyadic();
  const AttractorResult att = attractor_approx(dy, 2);
  json sampled = json::array();
  bool ok = true;
  for (double eps : {0.05, 0.1}) {
    const Enlargement en(att.cloud, eps);
    const PointCloud ys = en.interior_samples(4);
    std::uint64_t outside = 0;
    std::vector<double> img(1);
    for (std::size_t g = 1; g <= dy.map_count(); ++g) {
      const AffineMap& f = dy.float_map(g);
      for (std::size_t k = 0; k < ys.size(); ++k) {
        f.apply(ys.point(k), img);
        outside += en.contains(img) ? 0 : 1;
      }
    }
    ok = ok && outside == 0;
    sampled.push_back({{"eps", eps}, {"samples", ys.size()}, {"images_outside", outside}});
  }
  constexpr std::uint64_t kN = 1000;
  const IndexedFamily ex1 = builtins::ex1(kN);
  json intervals = json::array();
  for (const Rational& eps : {Rational(1, 10), Rational(1, 100)}) {
    const bool inv = interval_is_forward_invariant(ex1, kN, -eps, Rational(1, 2) + eps);
    ok = ok && inv;
    intervals.push_back({{"eps", cifs::to_string(eps)}, {"hull_invariant", inv}});
  }
  r.parameters = {{"sampled", "DYADIC attractor cloud"}, {"exact", "EX1 hull of [0,1/2], N=1000"}};
  r.measured = {{"sampled", sampled}, {"exact", intervals}};
  r.tolerance = {{"images_outside", 0}};
  r.status = verdict(ok);
}

void enlargement_invariance(ClaimResult& r, const Options&) {
  constexpr std::uint64_t kN = 1000;
  const double spacing = 1e-3;
  const PointCloud A = grid_1d(0, 0.5, 501);
  const std::vector<Rational> eps{Rational(1, 10)};
  const IndexedFamily fam = builtins::ex1(2 * kN);
  const EnlargementEntry at_n = verify_enlargement_invariance(fam, kN, A, eps).entries[0];
  const EnlargementEntry at_2n = verify_enlargement_invariance(fam, 2 * kN, A, eps).entries[0];
  const double bound = 1.0 / (2 * (kN + 1)) + spacing;

  const IndexedFamily dy = builtins::dyadic();
  const EnlargementEntry contrast =
      verify_enlargement_invariance(dy, 2, grid_1d(0, 1, 1001), eps).entries[0];

  r.parameters = {{"family", "EX1"}, {"N", kN}, {"eps", "1/10"}, {"grid_spacing", spacing}};
  r.measured = {{"outer_residual", at_n.outer},
                {"outer_exact", at_n.outer_exact},
                {"inner_residual", at_n.inner},
                {"inner_residual_2N", at_2n.inner},
                {"outer_residual_2N", at_2n.outer},
                {"hull", {cifs::to_string(at_n.lo[0]), cifs::to_string(at_n.hi[0])}},
                {"dyadic_inner_residual", contrast.inner}};
  r.tolerance = {{"outer", 0}, {"max_inner", bound}, {"dyadic_min_inner", 0.05}};
  r.status = verdict(at_n.outer == 0 && at_2n.outer == 0 && at_n.inner <= bound &&
                     at_2n.inner < at_n.inner && contrast.inner >= 0.05);
}

void rectangle_invariance(ClaimResult& r, const Options&) {
  constexpr std::uint64_t kN = 200;
  constexpr unsigned kSamples = 101;
  const IndexedFamily fam = builtins::ex1_planar(kN);
  PointCloud A(2);
  for (int a = 0; a <= 50; ++a) {
    for (int b = 0; b <= 50; ++b) {
      const double p[2] = {a / 100.0, -b / 100.0};
      A.add(p);
    }
  }
  const std::vector<Rational> eps{Rational(1, 10)};
  const EnlargementEntry e = verify_enlargement_invariance(fam, kN, A, eps, kSamples).entries[0];
  const double bound = 1.0 / (2 * (kN + 1)) + e.resolution;
  json hull = json::array();
  for (std::size_t j = 0; j < 2; ++j) hull.push_back({cifs::to_string(e.lo[j]), cifs::to_string(e.hi[j])});
  r.parameters = {{"family", "EX1_2D"}, {"N", kN}, {"eps", "1/10"},
                  {"rectangle", {{"0", "1/2"}, {"-1/2", "0"}}}, {"samples_per_axis", kSamples}};
  r.measured = {{"outer_residual", e.outer}, {"outer_exact", e.outer_exact},
                {"inner_residual", e.inner}, {"sampling_resolution", e.resolution}, {"hull", hull}};
  r.tolerance = {{"outer", 0}, {"max_inner", bound}};
  r.status = verdict(e.outer == 0 && e.inner <= bound);
}

void kravchenko(ClaimResult& r, const Options&) {
  constexpr std::uint64_t kN = 1000;
  const IndexedFamily ex1 = builtins::ex1(kN);
  const auto geo = ProbabilitySequence::geometric(Rational(1, 2));
  const KravchenkoSum s = kravchenko_sum(ex1, kN, geo);
  const KravchenkoSum dy = kravchenko_sum(builtins::dyadic(), 2,
                                          ProbabilitySequence::finite({Rational(1, 2), Rational(1, 2)}));
  const bool ok = s.partial_sum_exact && s.diameter_bound_exact &&
                  *s.partial_sum_exact <= Rational(1, 4) &&
                  *s.partial_sum_exact <= *s.diameter_bound_exact && dy.partial_sum_exact &&
                  *dy.partial_sum_exact == Rational(1, 2);
  r.parameters = {{"family", "EX1"}, {"N", kN}, {"rho", geo.describe()}};
  r.measured = {{"partial_sum", s.partial_sum_exact ? exact(*s.partial_sum_exact) : json(s.partial_sum)},
                {"diameter", s.diameter_exact ? exact(*s.diameter_exact) : json(s.diameter)},
                {"diameter_bound",
                 s.diameter_bound_exact ? exact(*s.diameter_bound_exact) : json(s.diameter_bound)},
                {"tail_note", s.tail_note},
                {"dyadic_partial_sum",
                 dy.partial_sum_exact ? exact(*dy.partial_sum_exact) : json(dy.partial_sum)}};
  r.tolerance = {{"max_partial_sum", "1/4"}, {"kind", "exact"}};
  r.status = verdict(ok);
}

void oracle_equivalence(ClaimResult& r, const Options& o) {
  std::mt19937_64 rng(o.seed);
  std::uniform_int_distribution<int> dim_dist(1, 3);
  std::uniform_int_distribution<int> size_dist(1, 400);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  std::size_t hausdorff_mismatches = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t d = dim_dist(rng);
    PointCloud a(d), b(d);
    std::vector<double> p(d);
    const double scale = std::ldexp(1.0, static_cast<int>(rng() % 12) - 6);
    for (int s = size_dist(rng); s > 0; --s) {
      for (double& v : p) v = scale * coord(rng);
      a.add(p);
    }
    for (int s = size_dist(rng); s > 0; --s) {
      for (double& v : p) v = scale * coord(rng) + 0.5 * scale;
      b.add(p);
    }
    hausdorff_mismatches += hausdorff(a, b) == hausdorff_brute_force(a, b) ? 0 : 1;
  }

  constexpr std::uint64_t kGrid = 1'000'000;
  json sampling = json::array();
  std::size_t sampling_mismatches = 0;
  const std::vector<std::pair<std::string, ProbabilitySequence>> seqs = {
      {"geometric(1/2)", ProbabilitySequence::geometric(Rational(1, 2))},
      {"geometric(9/10)", ProbabilitySequence::geometric(Rational(9, 10))},
      {"finite(1/3,2/3)", ProbabilitySequence::finite({Rational(1, 3), Rational(2, 3)})}};
  for (const auto& [label, seq] : seqs) {
    std::size_t bad = 0;
    for (std::uint64_t k = 0; k < kGrid; ++k) {
      const double u = (k + 0.5) / kGrid;
      bad += seq.sample_index(u) == seq.sample_index_by_prefix_search(u) ? 0 : 1;
    }
    sampling_mismatches += bad;
    sampling.push_back({{"sequence", label}, {"mismatches", bad}});
  }
  r.parameters = {{"cloud_pairs", 200}, {"u_grid", kGrid}, {"seed", o.seed}};
  r.measured = {{"hausdorff_mismatches", hausdorff_mismatches}, {"sample_index", sampling}};
  r.tolerance = {{"kind", "exact"}};
  r.status = verdict(hausdorff_mismatches == 0 && sampling_mismatches == 0);
}

// Random expressions carrying their value computed by an independent
// rational type, at i = 1, 2, 3.
using Big = boost::multiprecision::cpp_rational;

struct Sample {
  std::string text;
  std::array<Big, 3> value;
};

class ExprGenerator {
 public:
  explicit ExprGenerator(std::uint64_t seed) : rng_(seed) {}

  Sample next(int depth) {
    const int choice = depth <= 0 ? static_cast<int>(rng_() % 2) : static_cast<int>(rng_() % 8);
    switch (choice) {
      case 0: {
        const long v = static_cast<long>(rng_() % 20);
        return {std::to_string(v), {Big(v), Big(v), Big(v)}};
      }
      case 1: return {"i", {Big(1), Big(2), Big(3)}};
      case 2: {
        Sample s = next(depth - 1);
        return {"-(" + s.text + ")", {-s.value[0], -s.value[1], -s.value[2]}};
      }
      case 3: {
        Sample s = next(depth - 1);
        const unsigned e = static_cast<unsigned>(rng_() % 4);
        Sample out{"(" + s.text + ")^" + std::to_string(e), {}};
        for (int k = 0; k < 3; ++k) {
          Big p = 1;
          for (unsigned t = 0; t < e; ++t) p *= s.value[k];
          out.value[k] = p;
        }
        return out;
      }
      default: {
        Sample a = next(depth - 1);
        Sample b = next(depth - 1);
        static constexpr const char* kOps[] = {"+", "-", "*", "/"};
        const int op = static_cast<int>(rng_() % 4);
        if (op == 3 && (b.value[0] == 0 || b.value[1] == 0 || b.value[2] == 0)) {
          return {"(" + a.text + ")+(" + b.text + ")",
                  {a.value[0] + b.value[0], a.value[1] + b.value[1], a.value[2] + b.value[2]}};
        }
        Sample out{"(" + a.text + ")" + kOps[op] + "(" + b.text + ")", {}};
        for (int k = 0; k < 3; ++k) {
          switch (op) {
            case 0: out.value[k] = a.value[k] + b.value[k]; break;
            case 1: out.value[k] = a.value[k] - b.value[k]; break;
            case 2: out.value[k] = a.value[k] * b.value[k]; break;
            default: out.value[k] = a.value[k] / b.value[k]; break;
          }
        }
        return out;
      }
    }
  }

 private:
  std::mt19937_64 rng_;
};

void dsl_claim(ClaimResult& r, const Options& o) {
  ExprGenerator gen(o.seed);
  std::size_t idempotence_failures = 0;
  std::size_t value_mismatches = 0;
  for (int t = 0; t < 100; ++t) {
    const Sample s = gen.next(4);
    const dsl::Expr e = dsl::parse(s.text);
    const dsl::Expr again = dsl::parse(dsl::print(e));
    idempotence_failures += again == e && dsl::print(again) == dsl::print(e) ? 0 : 1;
    for (std::uint64_t i = 1; i <= 3; ++i) {
      value_mismatches += cifs::to_string(dsl::evaluate(e, i)) == s.value[i - 1].str() ? 0 : 1;
    }
  }
  // Coefficients of the builtin families against hand-derived closed forms.
  const std::vector<std::pair<std::string, std::function<Big(long)>>> coefficients = {
      {"i/(i+1)", [](long i) { return Big(i) / Big(i + 1); }},
      {"1/(i+1)^2", [](long i) { return Big(1) / Big((i + 1) * (i + 1)); }},
      {"(2*i+1)/i", [](long i) { return Big(2 * i + 1) / Big(i); }},
      {"-i/(i+1)", [](long i) { return Big(-i) / Big(i + 1); }},
      {"1/(i+1)", [](long i) { return Big(1) / Big(i + 1); }}};
  json coeff = json::array();
  std::size_t coefficient_mismatches = 0;
  for (const auto& [text, oracle] : coefficients) {
    const dsl::Expr e = dsl::parse(text);
    json values = json::array();
    for (long i = 1; i <= 3; ++i) {
      const Rational v = dsl::evaluate(e, static_cast<std::uint64_t>(i));
      coefficient_mismatches += cifs::to_string(v) == oracle(i).str() ? 0 : 1;
      values.push_back(cifs::to_string(v));
    }
    coeff.push_back({{"expression", text}, {"values_i_1_2_3", values}});
  }
  r.parameters = {{"random_expressions", 100}, {"seed", o.seed}, {"i", {1, 2, 3}}};
  r.measured = {{"idempotence_failures", idempotence_failures},
                {"value_mismatches", value_mismatches},
                {"coefficient_mismatches", coefficient_mismatches},
                {"coefficients", coeff}};
  r.tolerance = {{"kind", "exact"}};
  r.status = verdict(idempotence_failures == 0 && value_mismatches == 0 && coefficient_mismatches == 0);
}

struct Entry {
  ClaimInfo info;
  std::function<void(ClaimResult&, const Options&)> run;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      {{"example1-fixed-points",
        "EX1: F_i(x) = i/(i+1) x + 1/(i+1)^2 has fixed point 1/(i+1), so D = {1/(i+1)}"},
       example1_fixed_points},
      {{"example1-invariant-interval",
        "EX1: every F_i maps [0, 1/2] into itself although sup r_i = 1, so a bounded invariant set "
        "exists"},
       example1_invariant_interval},
      {{"example2-unbounded",
        "EX2: fixed points of F~_i o F_i and F_i o F~_i are y_i = -2i(i+1)/(2i+1) and "
        "z_i = (-i^2 + (i+1)^2 (2i+1)) / (i(2i+1)); |y_i| grows without bound, so no bounded "
        "invariant set exists"},
       example2_unbounded},
      {{"minimality",
        "the closure of the fixed points of finite compositions is the smallest closed invariant "
        "set; for r < 1 it is the attractor"},
       minimality},
      {{"attractor-bounded",
        "r < 1 with D bounded: the Hutchinson iteration converges to the unique bounded invariant set"},
       attractor_bounded},
      {{"closed-invariant-contains-P",
        "a nonempty closed set A with F_i(A) in A for all i contains every fixed point of a finite "
        "composition"},
       closed_invariant_contains_p},
      {{"nondecreasing",
        "maps of the line that are all non-decreasing leave [inf D, sup D] invariant"},
       nondecreasing},
      {{"invariant-measure",
        "mu = sum_i rho_i F_i# mu: the chaos game samples the invariant measure (uniform law for "
        "DYADIC with equal weights)"},
       invariant_measure},
      {{"support-equals-P",
        "the support of the invariant measure equals the closure of the fixed points of finite "
        "compositions"},
       support_equals_p},
      {{"enlargement-lemma",
        "for a closed invariant A of contracting similarities, F_i(A_eps) is contained in A_eps"},
       enlargement_lemma},
      {{"enlargement-invariance",
        "contracting similarities of the line with sup r_i = 1: the closed enlargement of an "
        "invariant interval is invariant up to truncation error in i"},
       enlargement_invariance},
      {{"rectangle-invariance",
        "similarities r_i x + b_i of R^n: a product of invariant intervals is an invariant rectangle"},
       rectangle_invariance},
      {{"kravchenko",
        "sum_i rho_i d(x_1, x_i) < infinity, bounded by sum_i rho_i diam(D) = diam(D) when D is "
        "bounded"},
       kravchenko},
      {{"oracle-equivalence",
        "grid-indexed Hausdorff distance equals brute force; closed-form index sampling equals "
        "prefix-sum search"},
       oracle_equivalence},
      {{"dsl",
        "coefficient expressions: print/parse round trip is the identity and evaluation is exact"},
       dsl_claim},
  };
  return table;
}

}  // namespace

const std::vector<ClaimInfo>& catalog() {
  static const std::vector<ClaimInfo> infos = [] {
    std::vector<ClaimInfo> out;
    for (const auto& e : entries()) out.push_back(e.info);
    return out;
  }();
  return infos;
}

ClaimResult run_claim(std::string_view id, const Options& options) {
  for (const auto& e : entries()) {
    if (e.info.id != id) continue;
    ClaimResult r;
    r.id = e.info.id;
    r.anchor = e.info.anchor;
    const auto start = std::chrono::steady_clock::now();
    try {
      e.run(r, options);
    } catch (const Error& err) {
      r.status = Status::kError;
      r.message = std::string(cifs::to_string(err.code())) + ": " + err.what();
    } catch (const std::exception& err) {
      r.status = Status::kError;
      r.message = err.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown claim '" + std::string(id) + "'");
}

std::vector<ClaimResult> run_all(const Options& options) {
  std::vector<ClaimResult> out;
  for (const auto& info : catalog()) out.push_back(run_claim(info.id, options));
  return out;
}

bool no_failures(const std::vector<ClaimResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const ClaimResult& r) {
    return r.status == Status::kPass || r.status == Status::kNotApplicable;
  });
}

}  // namespace cifs::verify
