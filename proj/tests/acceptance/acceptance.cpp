// Acceptance checks: one PASS/FAIL line per criterion, exit 0 iff all pass.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include "cifs/dsl.hpp"
#include "cifs/error.hpp"
#include "cifs/measure.hpp"
#include "cifs/setops.hpp"
#include "cifs/verify.hpp"

using namespace cifs;
using nlohmann::json;
using BRational = boost::multiprecision::cpp_rational;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Rational frac(std::uint64_t p, std::uint64_t q) {
  return Rational(Integer(static_cast<unsigned long>(p)), Integer(static_cast<unsigned long>(q)));
}

PointCloud segment_grid(double lo, double hi, std::size_t n) {
  PointCloud c(1);
  for (std::size_t k = 0; k < n; ++k) {
    const double x = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    c.add(std::span<const double>(&x, 1));
  }
  return c;
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(4);
  s << x;
  return s.str();
}

Outcome exact_checks() {
  const std::uint64_t n = 10'000;
  const IndexedFamily ex1 = builtins::ex1(n);
  const auto fixed = exact_fixed_points(ex1, n);
  for (std::uint64_t i = 1; i <= n; ++i) {
    if (fixed[i - 1][0] != frac(1, i + 1)) return {false, "x_" + std::to_string(i) + " != 1/(i+1)"};
  }
  for (std::uint64_t i = 1; i <= n; ++i) {
    const MapDescriptor& f = ex1.map(i);
    const std::vector<Rational> lo = {Rational(0)}, hi = {Rational(1, 2)};
    const Rational a = f.apply(lo)[0];
    const Rational b = f.apply(hi)[0];
    if (std::min(a, b) < 0 || std::max(a, b) > Rational(1, 2)) {
      return {false, "F_" + std::to_string(i) + " leaves [0,1/2]"};
    }
  }
  const std::uint64_t m = 1000;
  const IndexedFamily ex2 = builtins::ex2(m);
  std::uint64_t first_over = 0;
  Rational prev = 0;
  for (std::uint64_t i = 1; i <= m; ++i) {
    const MapDescriptor& f = ex2.materialize({0, i});
    const MapDescriptor& g = ex2.materialize({1, i});
    const Rational y = fixed_point(compose(g, f))[0];
    const Rational z = fixed_point(compose(f, g))[0];
    const Rational I = frac(i, 1);
    const Rational y_ref = -2 * I * (I + 1) / (2 * I + 1);
    const Rational z_ref = (-I * I + (I + 1) * (I + 1) * (2 * I + 1)) / (I * (2 * I + 1));
    if (y != y_ref || z != z_ref) return {false, "Example 2 closed form fails at i = " + std::to_string(i)};
    if (abs(y) <= prev) return {false, "|y_i| not increasing at i = " + std::to_string(i)};
    prev = abs(y);
    if (!first_over && abs(y) > 100) first_over = i;
  }
  if (!first_over || first_over > 100) return {false, "|y_i| <= 100 through i = 100"};
  return {true, "|y_i| > 100 first at i = " + std::to_string(first_over)};
}

Outcome minimality() {
  const IndexedFamily dy = builtins::dyadic();
  AttractorOptions o;
  o.tol = 1e-4;
  const AttractorResult att = attractor_approx(dy, 2, o);
  const double h = hausdorff(enumerate_fixed_points(dy, 2, 12).points, att.cloud);
  return {att.converged && h <= std::ldexp(1.0, -10), "hausdorff " + fmt(h) + " vs 2^-10"};
}

Outcome invariant_measure() {
  const ProbabilitySequence seq = ProbabilitySequence::finite({Rational(1, 2), Rational(1, 2)});
  ChaosOptions o;
  o.samples = 1'000'000;
  o.seed = 42;
  const ChaosResult r = chaos_game(builtins::dyadic(), 2, seq, o);
  std::vector<double> xs = r.measure.samples;
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double dev = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    dev = std::max({dev, std::abs((k + 1) / n - xs[k]), std::abs(k / n - xs[k])});
  }
  const double w1 = markov_residual(r.measure, builtins::dyadic(), 2, seq);
  return {dev <= 1e-2 && w1 <= 5e-3, "cdf deviation " + fmt(dev) + ", W1 residual " + fmt(w1)};
}

Outcome support_equals_P() {
  const std::uint64_t n = 20;
  const IndexedFamily ex1 = builtins::ex1(n);
  const double h = 1.0 / 128;
  ChaosOptions o;
  o.samples = 1'000'000;
  o.burn_in = 0;
  const ChaosResult r = chaos_game_multistart(ex1, n, ProbabilitySequence::geometric(Rational(1, 2)), o);
  const PointCloud support = support_estimate(r.measure, h);
  EnumerationOptions eo;
  eo.budget = 100'000'000;
  eo.resolution = h / 16;
  const Enumeration P = enumerate_fixed_points(ex1, n, 6, eo);
  const double d = hausdorff(support, P.points);
  const double bound = 2 * h + P.resolution;
  return {d <= bound, "hausdorff " + fmt(d) + " <= " + fmt(bound) + " (resolution " + fmt(P.resolution) + ")"};
}

Outcome enlargement_invariance() {
  const std::uint64_t n = 1000;
  const IndexedFamily ex1 = builtins::ex1(2 * n);
  const PointCloud A = segment_grid(0, 0.5, 501);
  const std::vector<Rational> eps = {Rational(1, 10)};
  const EnlargementEntry a = verify_enlargement_invariance(ex1, n, A, eps).entries[0];
  const EnlargementEntry b = verify_enlargement_invariance(ex1, 2 * n, A, eps).entries[0];
  const double bound = 1.0 / (2.0 * (n + 1)) + A.spacing();
  const bool ok = a.outer_exact && a.outer == 0 && a.inner <= bound && b.inner < a.inner;
  return {ok, "outer " + fmt(a.outer) + ", inner " + fmt(a.inner) + " -> " + fmt(b.inner) + " at 2N"};
}

Outcome kravchenko() {
  const std::uint64_t n = 1000;
  const KravchenkoSum k = kravchenko_sum(builtins::ex1(n), n, ProbabilitySequence::geometric(Rational(1, 2)));
  if (!k.partial_sum_exact || !k.diameter_bound_exact) return {false, "no exact evaluation"};
  // independent rational evaluation of sum 2^-i (1/2 - 1/(i+1))
  Rational oracle = 0, w = Rational(1, 2);
  for (std::uint64_t i = 1; i <= n; ++i, w /= 2) oracle += w * (Rational(1, 2) - frac(1, i + 1));
  const bool ok = *k.partial_sum_exact == oracle && oracle <= Rational(1, 4) && oracle <= *k.diameter_bound_exact;
  return {ok, "partial sum " + fmt(k.partial_sum) + ", diameter bound " + fmt(k.diameter_bound)};
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(1, 3), size(1, 400);
  for (int t = 0; t < 200; ++t) {
    const std::size_t d = dim(rng);
    const double scale = std::ldexp(1.0, static_cast<int>(rng() % 12) - 6);
    std::uniform_real_distribution<double> u(-scale, scale);
    PointCloud a(d), b(d);
    std::vector<double> p(d);
    for (int k = size(rng); k > 0; --k) {
      for (double& x : p) x = u(rng);
      a.add(p);
    }
    for (int k = size(rng); k > 0; --k) {
      for (double& x : p) x = u(rng) + (t % 2 ? scale : 0);
      b.add(p);
    }
    if (hausdorff(a, b) != hausdorff_brute_force(a, b)) return {false, "hausdorff mismatch on pair " + std::to_string(t)};
  }
  for (const auto& seq : {ProbabilitySequence::geometric(Rational(1, 2)), ProbabilitySequence::geometric(Rational(9, 10)),
                          ProbabilitySequence::finite({Rational(1, 3), Rational(2, 3)})}) {
    const int grid = 1'000'000;
    for (int k = 0; k < grid; ++k) {
      const double u = (k + 0.5) / grid;
      if (seq.sample_index(u) != seq.sample_index_by_prefix_search(u)) return {false, seq.describe() + " at u = " + fmt(u)};
    }
  }
  return {true, "200 cloud pairs, 3 sequences x 1e6 variates"};
}

// Random expressions built alongside their exact values at i = 1..3.
struct Generated {
  std::string text;
  std::array<BRational, 3> value;
};

Generated generate(std::mt19937_64& rng, int depth) {
  const auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
  if (depth == 0 || pick(3) == 0) {
    if (pick(2)) return {"i", {BRational(1), BRational(2), BRational(3)}};
    const int c = pick(9) + 1;
    return {std::to_string(c), {BRational(c), BRational(c), BRational(c)}};
  }
  const Generated a = generate(rng, depth - 1);
  switch (pick(5)) {
    case 0: {
      const Generated b = generate(rng, depth - 1);
      return {"(" + a.text + " + " + b.text + ")", {a.value[0] + b.value[0], a.value[1] + b.value[1], a.value[2] + b.value[2]}};
    }
    case 1: {
      const Generated b = generate(rng, depth - 1);
      return {"(" + a.text + " - " + b.text + ")", {a.value[0] - b.value[0], a.value[1] - b.value[1], a.value[2] - b.value[2]}};
    }
    case 2: {
      const Generated b = generate(rng, depth - 1);
      return {"(" + a.text + " * " + b.text + ")", {a.value[0] * b.value[0], a.value[1] * b.value[1], a.value[2] * b.value[2]}};
    }
    case 3: {
      // denominator kept positive: (i + c)
      const int c = pick(5);
      std::array<BRational, 3> v;
      for (int i = 0; i < 3; ++i) v[i] = a.value[i] / BRational(i + 1 + c);
      return {"(" + a.text + ") / (i + " + std::to_string(c) + ")", v};
    }
    default: {
      const int e = pick(3) + 1;
      std::array<BRational, 3> v;
      for (int i = 0; i < 3; ++i) {
        v[i] = 1;
        for (int k = 0; k < e; ++k) v[i] *= a.value[i];
      }
      return {"(" + a.text + ")^" + std::to_string(e), v};
    }
  }
}

bool same(const Rational& q, const BRational& b) {
  std::ostringstream s;
  s << numerator(b) << "/" << denominator(b);
  Rational r(s.str());
  r.canonicalize();
  return q == r;
}

Outcome dsl_checks() {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 100; ++t) {
    const Generated g = generate(rng, 4);
    const dsl::Expr e = dsl::parse(g.text);
    const std::string printed = dsl::print(e);
    if (!(dsl::parse(printed) == e) || dsl::print(dsl::parse(printed)) != printed) {
      return {false, "not idempotent: " + g.text};
    }
    for (std::uint64_t i = 1; i <= 3; ++i) {
      if (!same(dsl::evaluate(e, i), g.value[i - 1])) return {false, "value mismatch: " + g.text};
    }
  }
  const std::vector<std::pair<std::string, std::function<Rational(const Rational&)>>> coefficients = {
      {"i/(i+1)", [](const Rational& i) -> Rational { return i / (i + 1); }},
      {"1/(i+1)^2", [](const Rational& i) -> Rational { return 1 / ((i + 1) * (i + 1)); }},
      {"(2*i+1)/i", [](const Rational& i) -> Rational { return (2 * i + 1) / i; }},
      {"-i/(i+1)", [](const Rational& i) -> Rational { return -i / (i + 1); }},
      {"1/(i+1)", [](const Rational& i) -> Rational { return 1 / (i + 1); }}};
  for (const auto& [text, f] : coefficients) {
    const dsl::Expr e = dsl::parse(text);
    for (std::uint64_t i = 1; i <= 3; ++i) {
      const Rational want = f(frac(i, 1));
      if (dsl::evaluate(e, i) != want) return {false, text + " at i = " + std::to_string(i)};
    }
  }
  return {true, "100 random expressions, 5 coefficient expressions"};
}

Outcome verify_all() {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "cifs_acceptance_verify";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const std::string cmd = std::string(CIFS_BINARY) + " verify --all --no-timestamp --out " + dir.string() + " >/dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  const int status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(dir / "verify.json");
  if (!in) return {false, "no verify.json, exit " + std::to_string(status)};
  const json report = json::parse(in);
  std::filesystem::remove_all(dir);
  std::size_t listed = 0;
  for (const verify::ClaimInfo& info : verify::catalog()) {
    bool found = false;
    for (const json& c : report["claims"]) {
      if (c["id"] == info.id && !c["anchor"].get<std::string>().empty()) found = true;
    }
    if (!found) return {false, "claim " + info.id + " missing or without anchor"};
    ++listed;
  }
  return {status == 0, "exit " + std::to_string(status) + ", " + std::to_string(listed) + " claims listed"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 exact-arithmetic checks", exact_checks},
      {"2 minimality convergence", minimality},
      {"3 invariant measure fixed point", invariant_measure},
      {"4 support equals closure of P", support_equals_P},
      {"5 enlargement invariance at ratio one", enlargement_invariance},
      {"6 Kravchenko condition", kravchenko},
      {"7 oracle equivalence", oracle_equivalence},
      {"8 DSL round trip and evaluation", dsl_checks},
      {"9 verify --all", verify_all}};
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s  criterion %s  (%.2fs)  %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), secs, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
