#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <unistd.h>

#include "cifs/error.hpp"
#include "cifs/family.hpp"
#include "cifs/hausdorff.hpp"
#include "cifs/measure.hpp"
#include "cifs/setops.hpp"
#include "cifs/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Defaults {
  static constexpr std::uint64_t kN = 100;
  static constexpr unsigned kK = 6;
  static constexpr double kTol = 1e-3;
  static constexpr std::uint64_t kSamples = 1'000'000;
  static constexpr std::uint64_t kBurnIn = 1'000;
  static constexpr double kCell = 1.0 / 128;
  static constexpr std::uint64_t kSeed = 42;
  static constexpr std::uint64_t kBudget = 1'000'000;
  static constexpr unsigned kMaxIters = 200;
};

json defaults_json() {
  return {{"N", Defaults::kN},           {"k", Defaults::kK},
          {"tol", Defaults::kTol},       {"samples", Defaults::kSamples},
          {"burn_in", Defaults::kBurnIn}, {"cell", "1/128"},
          {"seed", Defaults::kSeed},     {"budget", Defaults::kBudget},
          {"max_iters", Defaults::kMaxIters}, {"rho", "uniform"},
          {"out", "."}};
}

struct RunConfig {
  std::string family;
  std::string config;
  std::uint64_t n = Defaults::kN;
  unsigned k = Defaults::kK;
  double tol = Defaults::kTol;
  std::uint64_t samples = Defaults::kSamples;
  std::uint64_t burn_in = Defaults::kBurnIn;
  std::uint64_t seed = Defaults::kSeed;
  double cell = Defaults::kCell;
  std::uint64_t budget = Defaults::kBudget;
  double resolution = 0;  // 0: exact dedup (fixed-points) or cell/16 (--compare-P)
  unsigned max_iters = Defaults::kMaxIters;
  std::string rho = "uniform";
  std::string out = ".";
  bool force_truncate = false;
  bool no_timestamp = false;
  bool multistart = false;
  std::optional<unsigned> compare_p;
  // verify
  std::vector<std::string> claims;
  bool all = false;
  std::uint64_t imax = 1000;
};

// Flag options, kept to tell "given on the command line" from defaults.
struct Flags {
  CLI::Option* n = nullptr;
  CLI::Option* k = nullptr;
  CLI::Option* tol = nullptr;
  CLI::Option* samples = nullptr;
  CLI::Option* burn_in = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* cell = nullptr;
  CLI::Option* rho = nullptr;
};

void add_common(CLI::App* sub, RunConfig& c, Flags& f) {
  sub->add_option("--family", c.family, "Builtin family: EX1, EX2, DYADIC, SINGLE, EX1_2D, GEO(q)");
  sub->add_option("--config", c.config, "Family config file (JSON)");
  f.n = sub->add_option("--N", c.n, "Per-branch truncation")->check(CLI::PositiveNumber);
  f.k = sub->add_option("--k", c.k, "Maximum word length")->check(CLI::PositiveNumber);
  f.tol = sub->add_option("--tol", c.tol, "Attractor tolerance")->check(CLI::PositiveNumber);
  f.samples = sub->add_option("--samples", c.samples, "Chaos game samples")->check(CLI::PositiveNumber);
  f.burn_in = sub->add_option("--burn-in", c.burn_in, "Chaos game burn-in");
  f.seed = sub->add_option("--seed", c.seed, "RNG seed");
  f.cell = sub->add_option("--cell", c.cell, "Support / histogram cell size h")->check(CLI::PositiveNumber);
  sub->add_option("--out", c.out, "Output directory");
  sub->add_flag("--force-truncate", c.force_truncate,
                "Proceed on the truncated family when the declared sup ratio is 1");
  sub->add_flag("--no-timestamp", c.no_timestamp, "Omit timestamps and timings from JSON");
}

std::string timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

void write_atomic(const fs::path& path, const std::string& content) {
  std::error_code ec;
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path(), ec);
  const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw cifs::Error(cifs::ErrorCode::kIo, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw cifs::Error(cifs::ErrorCode::kIo, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw cifs::Error(cifs::ErrorCode::kIo, "cannot rename onto " + path.string() + ": " + ec.message());
  }
}

std::string csv(const cifs::PointCloud& cloud) {
  std::ostringstream s;
  cifs::write_csv(s, cloud);
  return s.str();
}

void emit(const RunConfig& c, json report, const std::string& name) {
  if (!c.no_timestamp) report["timestamp"] = timestamp();
  const std::string text = report.dump(2) + "\n";
  write_atomic(fs::path(c.out) / name, text);
  std::cout << text;
}

// Config-file "run" knobs apply unless the flag was given.
void apply_run_section(const json& run, RunConfig& c, const Flags& f) {
  auto take = [&](const char* key, CLI::Option* flag, auto& field) {
    if (auto it = run.find(key); it != run.end() && (!flag || flag->count() == 0)) {
      it->get_to(field);
    }
  };
  take("N", f.n, c.n);
  take("k", f.k, c.k);
  take("tol", f.tol, c.tol);
  take("samples", f.samples, c.samples);
  take("burn_in", f.burn_in, c.burn_in);
  take("seed", f.seed, c.seed);
  take("cell", f.cell, c.cell);
  take("rho", f.rho, c.rho);
  if (c.n == 0 || c.k == 0 || !(c.tol > 0) || !(c.cell > 0) || c.samples == 0) {
    throw cifs::Error(cifs::ErrorCode::kConfig, "run knobs must be positive");
  }
}

cifs::IndexedFamily load(RunConfig& c, const Flags& f) {
  if (!c.config.empty()) {
    std::ifstream in(c.config);
    if (!in) throw cifs::Error(cifs::ErrorCode::kIo, "cannot open " + c.config);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw cifs::Error(cifs::ErrorCode::kConfig, c.config + ": " + e.what());
    }
    if (auto it = j.find("run"); it != j.end()) {
      try {
        apply_run_section(*it, c, f);
      } catch (const json::exception& e) {
        throw cifs::Error(cifs::ErrorCode::kConfig, std::string("run section: ") + e.what());
      }
    }
    cifs::IndexedFamily fam = cifs::family_from_json(j);
    const bool run_n = j.contains("run") && j["run"].contains("N");
    if (f.n->count() || run_n) return fam.with_truncation(c.n);
    c.n = fam.truncation();
    return fam;
  }
  if (c.family.empty()) throw cifs::Error(cifs::ErrorCode::kInvalidArgument, "give --family or --config");
  return cifs::builtins::by_name(c.family, c.n);
}

json bbox(const cifs::PointCloud& cloud) {
  return {{"lower", cloud.lower()}, {"upper", cloud.upper()}};
}

json family_json(const cifs::IndexedFamily& fam, std::uint64_t n) {
  const cifs::SupRatio sup = cifs::sup_ratio(fam, n);
  json j = {{"name", fam.name()},
            {"dimension", fam.dimension()},
            {"truncation", fam.truncation()},
            {"maps", fam.map_count(n)},
            {"sup_ratio_empirical", cifs::to_string(sup.empirical_exact)},
            {"truncation_warning", sup.truncation_warning}};
  j["declared_sup_ratio"] = fam.declared_sup_ratio() ? json(cifs::to_string(*fam.declared_sup_ratio()))
                                                     : json(nullptr);
  return j;
}

int cmd_fixed_points(RunConfig& c, const Flags& f) {
  const cifs::IndexedFamily fam = load(c, f);
  const std::uint64_t n = fam.truncation();
  const cifs::PointCloud d = cifs::fixed_point_set(fam, n);
  cifs::EnumerationOptions eo;
  eo.budget = c.budget;
  if (c.resolution > 0) eo.resolution = c.resolution;
  const cifs::Enumeration p = cifs::enumerate_fixed_points(fam, n, c.k, eo);
  write_atomic(fs::path(c.out) / "D.csv", csv(d));
  write_atomic(fs::path(c.out) / "P.csv", csv(p.points));
  emit(c,
       {{"command", "fixed-points"},
        {"family", family_json(fam, n)},
        {"N", n},
        {"k", c.k},
        {"D", {{"points", d.size()}, {"maps", fam.map_count(n)}, {"bounding_box", bbox(d)}}},
        {"P", {{"points", p.points.size()},
               {"words", p.words},
               {"duplicates_removed", p.words - p.points.size()},
               {"resolution", p.resolution},
               {"bounding_box", bbox(p.points)}}},
        {"files", {"D.csv", "P.csv"}}},
       "fixed-points.json");
  return 0;
}

int cmd_attractor(RunConfig& c, const Flags& f) {
  const cifs::IndexedFamily fam = load(c, f);
  const std::uint64_t n = fam.truncation();
  const auto& declared = fam.declared_sup_ratio();
  if (declared && cifs::to_double(*declared) >= 1 - 1e-9 && !c.force_truncate) {
    throw cifs::Error(cifs::ErrorCode::kRefused,
                      "declared sup ratio " + cifs::to_string(*declared) +
                          " is not < 1; the iteration has no convergence guarantee "
                          "(--force-truncate runs on the truncated family)");
  }
  cifs::AttractorOptions ao;
  ao.tol = c.tol;
  ao.max_iters = c.max_iters;
  if (c.resolution > 0) ao.resolution = c.resolution;
  const cifs::AttractorResult r = cifs::attractor_approx(fam, n, ao);
  const cifs::InvarianceResiduals res = cifs::check_invariance(r.cloud, fam, n);
  write_atomic(fs::path(c.out) / "attractor.csv", csv(r.cloud));
  emit(c,
       {{"command", "attractor"},
        {"family", family_json(fam, n)},
        {"N", n},
        {"tol", c.tol},
        {"forced_truncation", c.force_truncate && declared && cifs::to_double(*declared) >= 1 - 1e-9},
        {"converged", r.converged},
        {"iterations", r.iterations},
        {"last_delta", r.last_delta},
        {"resolution", r.resolution},
        {"points", r.cloud.size()},
        {"bounding_box", bbox(r.cloud)},
        {"outer_residual", res.outer},
        {"inner_residual", res.inner},
        {"files", {"attractor.csv"}}},
       "attractor.json");
  return 0;
}

cifs::ProbabilitySequence parse_rho(const std::string& spec, const cifs::IndexedFamily& fam,
                                    std::uint64_t n) {
  if (spec == "uniform") {
    const std::size_t m = fam.map_count(n);
    return cifs::ProbabilitySequence::finite(
        std::vector<cifs::Rational>(m, cifs::Rational(cifs::Integer(1), cifs::Integer(static_cast<unsigned long>(m)))));
  }
  if (spec.rfind("geometric:", 0) == 0) {
    return cifs::ProbabilitySequence::geometric(cifs::parse_rational(spec.substr(10)));
  }
  std::vector<cifs::Rational> weights;
  std::stringstream s(spec);
  for (std::string item; std::getline(s, item, ',');) weights.push_back(cifs::parse_rational(item));
  return cifs::ProbabilitySequence::finite(std::move(weights));
}

int cmd_chaos(RunConfig& c, const Flags& f) {
  const cifs::IndexedFamily fam = load(c, f);
  const std::uint64_t n = fam.truncation();
  const cifs::ProbabilitySequence seq = parse_rho(c.rho, fam, n);
  cifs::ChaosOptions co;
  co.samples = c.samples;
  co.burn_in = c.burn_in;
  co.seed = c.seed;
  cifs::ChaosResult run = c.multistart ? cifs::chaos_game_multistart(fam, n, seq, co)
                                       : cifs::chaos_game(fam, n, seq, co);
  if (fam.dimension() > 1) run.measure.build_histogram(c.cell);
  const double residual = cifs::markov_residual(run.measure, fam, n, seq);
  const cifs::PointCloud support = cifs::support_estimate(run.measure, c.cell);
  json report = {{"command", "chaos"},
                 {"family", family_json(fam, n)},
                 {"N", n},
                 {"rho", seq.describe()},
                 {"sampler", c.multistart ? "multistart" : "single chain"},
                 {"chains", run.chains},
                 {"n", run.measure.size()},
                 {"burn_in", c.multistart ? 0 : c.burn_in},
                 {"seed", c.seed},
                 {"residual", residual},
                 {"residual_kind", fam.dimension() == 1 ? "wasserstein-1" : "histogram-l1"},
                 {"truncation_resamples", run.truncation_resamples},
                 {"h", c.cell},
                 {"support_cells", support.size()},
                 {"support_bounding_box", bbox(support)},
                 {"files", {"samples.csv", "support.csv"}}};
  if (c.compare_p) {
    cifs::EnumerationOptions eo;
    eo.budget = std::max<std::uint64_t>(c.budget, 100'000'000);
    eo.resolution = c.resolution > 0 ? c.resolution : c.cell / 16;
    const cifs::Enumeration p = cifs::enumerate_fixed_points(fam, n, *c.compare_p, eo);
    const double hd = cifs::hausdorff(support, p.points);
    report["compare_P"] = {{"k", *c.compare_p},
                           {"P_points", p.points.size()},
                           {"P_resolution", p.resolution},
                           {"hausdorff_support_P", hd},
                           {"bound", 2 * c.cell + p.resolution},
                           {"within_bound", hd <= 2 * c.cell + p.resolution}};
  }
  write_atomic(fs::path(c.out) / "samples.csv", csv(run.measure.as_cloud()));
  write_atomic(fs::path(c.out) / "support.csv", csv(support));
  emit(c, std::move(report), "chaos.json");
  return 0;
}

int cmd_verify(RunConfig& c) {
  cifs::verify::Options vo;
  if (!c.family.empty()) vo.family = c.family;
  vo.imax = c.imax;
  vo.seed = c.seed;
  vo.samples = c.samples;
  std::vector<cifs::verify::ClaimResult> results;
  if (c.all || c.claims.empty()) {
    for (const auto& info : cifs::verify::catalog()) {
      results.push_back(cifs::verify::run_claim(info.id, vo));
      const auto& r = results.back();
      std::cerr << cifs::verify::to_string(r.status) << "  " << r.id << "  (" << r.seconds << " s)\n";
    }
  } else {
    for (const auto& id : c.claims) {
      results.push_back(cifs::verify::run_claim(id, vo));
      const auto& r = results.back();
      std::cerr << cifs::verify::to_string(r.status) << "  " << r.id << "  (" << r.seconds << " s)\n";
    }
  }
  json claims = json::array();
  for (const auto& r : results) {
    json j = r.to_json();
    if (c.no_timestamp) j.erase("seconds");
    claims.push_back(std::move(j));
  }
  const bool ok = cifs::verify::no_failures(results);
  emit(c, {{"command", "verify"}, {"ok", ok}, {"claims", claims}}, "verify.json");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Countable iterated function systems: fixed points, attractors, chaos game, checks"};
  app.require_subcommand(0, 1);
  bool show_defaults = false;
  app.add_flag("--show-defaults", show_defaults, "Print default knobs as JSON and exit");

  RunConfig c;
  Flags f;

  CLI::App* fixed = app.add_subcommand("fixed-points", "Write D and P_{N,k} as CSV plus a JSON summary");
  add_common(fixed, c, f);
  fixed->add_option("--budget", c.budget, "Maximum number of words")->check(CLI::PositiveNumber);
  fixed->add_option("--resolution", c.resolution, "Lattice dedup resolution for P")
      ->check(CLI::PositiveNumber);

  Flags fa;
  CLI::App* attractor = app.add_subcommand("attractor", "Iterate the Hutchinson operator to a cloud");
  add_common(attractor, c, fa);
  attractor->add_option("--max-iters", c.max_iters, "Iteration cap")->check(CLI::PositiveNumber);
  attractor->add_option("--resolution", c.resolution, "Thinning lattice (default tol/16)")
      ->check(CLI::PositiveNumber);

  Flags fc;
  CLI::App* chaos = app.add_subcommand("chaos", "Chaos game samples, Markov residual and support");
  add_common(chaos, c, fc);
  fc.rho = chaos->add_option("--rho", c.rho, "uniform | geometric:q | comma-separated weights");
  chaos->add_option("--compare-P", c.compare_p, "Also report hausdorff(support, P_{N,k}) for this k")
      ->check(CLI::PositiveNumber);
  chaos->add_flag("--multistart", c.multistart, "One chain per fixed point, merged");
  chaos->add_option("--budget", c.budget, "Word budget for --compare-P")->check(CLI::PositiveNumber);
  chaos->add_option("--resolution", c.resolution, "P resolution for --compare-P (default h/16)")
      ->check(CLI::PositiveNumber);

  Flags fv;
  CLI::App* verify = app.add_subcommand("verify", "Run the claims suite");
  add_common(verify, c, fv);
  verify->add_option("--claim", c.claims, "Claim id (repeatable)");
  verify->add_flag("--all", c.all, "Run every claim");
  verify->add_option("--imax", c.imax, "Horizon for example2-unbounded")->check(CLI::PositiveNumber);
  verify->add_flag("--list", [](std::int64_t) {
    for (const auto& info : cifs::verify::catalog()) std::cout << info.id << "  " << info.anchor << "\n";
    throw CLI::Success();
  }, "List claim ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: E_USAGE: " << e.what() << "\n";
    return 2;
  }

  if (show_defaults) {
    std::cout << defaults_json().dump(2) << "\n";
    return 0;
  }
  try {
    if (*fixed) return cmd_fixed_points(c, f);
    if (*attractor) return cmd_attractor(c, fa);
    if (*chaos) return cmd_chaos(c, fc);
    if (*verify) return cmd_verify(c);
    std::cerr << "error: E_USAGE: a subcommand is required (fixed-points, attractor, chaos, verify)\n";
    return 2;
  } catch (const cifs::Error& e) {
    std::cerr << "error: " << cifs::to_string(e.code()) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: E_INTERNAL: " << e.what() << "\n";
    return 3;
  }
}
