#include "cifs/family.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "cifs/error.hpp"

namespace cifs {

Coefficient::Coefficient(dsl::Expr expr) : expr_(std::move(expr)) {
  description_ = dsl::print(*expr_);
}

Coefficient Coefficient::parse(std::string_view source) { return Coefficient(dsl::parse(source)); }

Coefficient Coefficient::native(std::string description, Generator generator) {
  Coefficient c;
  c.description_ = std::move(description);
  c.generator_ = std::move(generator);
  return c;
}

Rational Coefficient::evaluate(std::uint64_t i) const {
  if (expr_) return dsl::evaluate(*expr_, i);
  return generator_(i);
}

std::string Coefficient::describe() const { return description_; }

IndexedFamily::IndexedFamily(std::string name, std::size_t dimension,
                             std::vector<BranchSpec> branches, Options options)
    : name_(std::move(name)),
      dimension_(dimension),
      branches_(std::move(branches)),
      truncation_(options.truncation),
      declared_(std::move(options.declared_sup_ratio)),
      max_index_(options.max_index) {
  if (dimension_ == 0) throw Error(ErrorCode::kConfig, "family dimension must be positive");
  if (branches_.empty()) throw Error(ErrorCode::kConfig, "family needs at least one branch");
  if (truncation_ == 0) throw Error(ErrorCode::kConfig, "truncation must be >= 1");
  if (max_index_) {
    if (*max_index_ == 0) throw Error(ErrorCode::kConfig, "max_index must be >= 1");
    truncation_ = std::min(truncation_, *max_index_);
  }
  if (declared_ && (*declared_ <= 0 || *declared_ > 1)) {
    throw Error(ErrorCode::kConfig, "declared_sup_ratio must lie in (0, 1]");
  }
  for (std::size_t b = 0; b < branches_.size(); ++b) {
    if (branches_[b].translation.size() != dimension_) {
      throw Error(ErrorCode::kConfig, "branch " + std::to_string(b + 1) + " has " +
                                          std::to_string(branches_[b].translation.size()) +
                                          " translation entries, expected " +
                                          std::to_string(dimension_));
    }
  }

  const std::size_t count = map_count(truncation_);
  exact_.reserve(count);
  float_.reserve(count);
  Rational largest = 0;
  for (std::size_t g = 1; g <= count; ++g) {
    MapIndex at = pair_of(g);
    const BranchSpec& spec = branches_[at.branch];
    auto where = [&] {
      return "branch " + std::to_string(at.branch + 1) + " (" + spec.label + "), i = " +
             std::to_string(at.i);
    };
    try {
      std::vector<Rational> b(dimension_);
      for (std::size_t j = 0; j < dimension_; ++j) b[j] = spec.translation[j].evaluate(at.i);
      exact_.emplace_back(spec.ratio.evaluate(at.i), std::move(b));
    } catch (const Error& e) {
      throw Error(e.code(), where() + ": " + e.what());
    }
    largest = std::max(largest, abs(exact_.back().ratio()));
    float_.push_back(exact_.back().to_float());
  }
  if (declared_ && largest > *declared_ + parse_rational("1e-12")) {
    throw Error(ErrorCode::kConfig, "materialized |r_i| = " + to_string(largest) +
                                        " exceeds declared_sup_ratio " + to_string(*declared_));
  }
}

std::uint64_t IndexedFamily::clamp(std::uint64_t n) const { return std::min(n, truncation_); }

std::size_t IndexedFamily::map_count(std::uint64_t n) const {
  return static_cast<std::size_t>(clamp(n)) * branches_.size();
}

MapIndex IndexedFamily::pair_of(std::size_t global) const {
  if (global == 0) throw Error(ErrorCode::kInvalidArgument, "global index starts at 1");
  return {(global - 1) % branches_.size(), (global - 1) / branches_.size() + 1};
}

std::size_t IndexedFamily::global_of(MapIndex index) const {
  return static_cast<std::size_t>(index.i - 1) * branches_.size() + index.branch + 1;
}

const MapDescriptor& IndexedFamily::materialize(MapIndex index) const {
  if (index.branch >= branches_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "no branch " + std::to_string(index.branch + 1));
  }
  if (index.i == 0 || index.i > truncation_) {
    throw Error(ErrorCode::kInvalidArgument, "index i = " + std::to_string(index.i) +
                                                 " outside 1.." + std::to_string(truncation_));
  }
  return exact_[global_of(index) - 1];
}

const MapDescriptor& IndexedFamily::map(std::size_t global) const {
  return materialize(pair_of(global));
}

const AffineMap& IndexedFamily::float_map(std::size_t global) const {
  materialize(pair_of(global));
  return float_[global - 1];
}

std::vector<AffineMap> IndexedFamily::float_maps(std::uint64_t n) const {
  return {float_.begin(), float_.begin() + static_cast<std::ptrdiff_t>(map_count(n))};
}

std::vector<MapDescriptor> IndexedFamily::maps(std::uint64_t n) const {
  return {exact_.begin(), exact_.begin() + static_cast<std::ptrdiff_t>(map_count(n))};
}

IndexedFamily IndexedFamily::with_truncation(std::uint64_t n) const {
  return IndexedFamily(name_, dimension_, branches_, Options{n, declared_, max_index_});
}

nlohmann::json IndexedFamily::to_json() const {
  nlohmann::json branches = nlohmann::json::array();
  for (const auto& b : branches_) {
    nlohmann::json translation = nlohmann::json::array();
    for (const auto& t : b.translation) translation.push_back(t.describe());
    branches.push_back({{"label", b.label}, {"ratio", b.ratio.describe()}, {"translation", translation}});
  }
  nlohmann::json j = {{"name", name_},
                      {"dimension", dimension_},
                      {"truncation", truncation_},
                      {"branches", branches}};
  j["declared_sup_ratio"] = declared_ ? nlohmann::json(to_double(*declared_)) : nlohmann::json(nullptr);
  if (max_index_) j["max_index"] = *max_index_;
  return j;
}

std::vector<std::vector<Rational>> exact_fixed_points(const IndexedFamily& family,
                                                      std::uint64_t n) {
  std::vector<std::vector<Rational>> out;
  const std::size_t count = family.map_count(n);
  out.reserve(count);
  for (std::size_t g = 1; g <= count; ++g) out.push_back(fixed_point(family.map(g)));
  return out;
}

PointCloud fixed_point_set(const IndexedFamily& family, std::uint64_t n) {
  if (n > family.truncation()) {
    throw Error(ErrorCode::kInvalidArgument, "N = " + std::to_string(n) + " exceeds truncation " +
                                                 std::to_string(family.truncation()));
  }
  PointCloud cloud(family.dimension());
  const std::size_t count = family.map_count(n);
  cloud.reserve(count);
  for (std::size_t g = 1; g <= count; ++g) {
    std::vector<Rational> x = fixed_point(family.map(g));
    std::vector<double> p(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) p[j] = to_double(x[j]);
    cloud.add(p);
  }
  cloud.deduplicate();
  return cloud;
}

SupRatio sup_ratio(const IndexedFamily& family, std::uint64_t n) {
  SupRatio s;
  const std::size_t count = family.map_count(n);
  for (std::size_t g = 1; g <= count; ++g) {
    s.empirical_exact = std::max(s.empirical_exact, abs(family.map(g).ratio()));
  }
  s.empirical = to_double(s.empirical_exact);
  if (family.declared_sup_ratio()) {
    s.declared = to_double(*family.declared_sup_ratio());
    s.truncation_warning = *family.declared_sup_ratio() - s.empirical_exact > Rational(1, 100);
  }
  return s;
}

SupRatio sup_ratio(const IndexedFamily& family) { return sup_ratio(family, family.truncation()); }

namespace builtins {

namespace {

BranchSpec branch(std::string label, std::string_view ratio,
                  std::initializer_list<std::string_view> translation) {
  BranchSpec spec{std::move(label), Coefficient::parse(ratio), {}};
  for (auto t : translation) spec.translation.push_back(Coefficient::parse(t));
  return spec;
}

}  // namespace

IndexedFamily ex1(std::uint64_t truncation) {
  return IndexedFamily("EX1", 1, {branch("F", "i/(i+1)", {"1/(i+1)^2"})},
                       {truncation, Rational(1), std::nullopt});
}

IndexedFamily ex2(std::uint64_t truncation) {
  return IndexedFamily("EX2", 1,
                       {branch("F", "-i/(i+1)", {"(2*i+1)/i"}),
                        branch("F~", "-i/(i+1)", {"1/(i+1)"})},
                       {truncation, Rational(1), std::nullopt});
}

IndexedFamily dyadic() {
  return IndexedFamily("DYADIC", 1, {branch("F", "1/2", {"(i-1)/2"})}, {2, std::nullopt, 2});
}

IndexedFamily single_half() {
  return IndexedFamily("SINGLE", 1, {branch("F", "1/2", {"0"})}, {1, std::nullopt, 1});
}

IndexedFamily geo(const Rational& q, std::uint64_t truncation) {
  if (q <= 0 || q >= 1) throw Error(ErrorCode::kConfig, "GEO(q) needs 0 < q < 1");
  BranchSpec spec{"F",
                  Coefficient::native(to_string(q), [q](std::uint64_t) { return q; }),
                  {Coefficient::native("1/2^i", [](std::uint64_t i) {
                    Rational r;
                    r.get_num() = 1;
                    mpz_ui_pow_ui(r.get_den_mpz_t(), 2, static_cast<unsigned long>(i));
                    return r;
                  })}};
  return IndexedFamily("GEO(" + to_string(q) + ")", 1, {std::move(spec)},
                       {truncation, std::nullopt, std::nullopt});
}

IndexedFamily ex1_planar(std::uint64_t truncation) {
  return IndexedFamily("EX1_2D", 2, {branch("F", "i/(i+1)", {"1/(i+1)^2", "-1/(i+1)^2"})},
                       {truncation, Rational(1), std::nullopt});
}

IndexedFamily by_name(std::string_view name, std::uint64_t truncation) {
  std::string upper(name);
  for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (upper == "EX1") return ex1(truncation);
  if (upper == "EX2") return ex2(truncation);
  if (upper == "DYADIC") return dyadic();
  if (upper == "SINGLE") return single_half();
  if (upper == "EX1_2D") return ex1_planar(truncation);
  if (upper.rfind("GEO", 0) == 0) {
    std::string arg = upper.substr(3);
    if (arg.size() >= 2 && arg.front() == '(' && arg.back() == ')') {
      arg = arg.substr(1, arg.size() - 2);
    } else if (!arg.empty() && arg.front() == ':') {
      arg = arg.substr(1);
    } else {
      throw Error(ErrorCode::kConfig, "GEO needs a ratio, e.g. GEO(1/3)");
    }
    return geo(parse_rational(arg), truncation);
  }
  throw Error(ErrorCode::kConfig, "unknown builtin family '" + std::string(name) + "'");
}

std::vector<std::string> names() { return {"EX1", "EX2", "DYADIC", "SINGLE", "EX1_2D", "GEO(q)"}; }

}  // namespace builtins

IndexedFamily family_from_json(const nlohmann::json& config) {
  try {
    if (!config.is_object()) throw Error(ErrorCode::kConfig, "family config must be a JSON object");
    const std::size_t dimension = config.at("dimension").get<std::size_t>();
    const std::uint64_t truncation = config.at("truncation").get<std::uint64_t>();
    std::optional<Rational> declared;
    if (auto it = config.find("declared_sup_ratio"); it != config.end() && !it->is_null()) {
      declared = it->is_string() ? parse_rational(it->get<std::string>())
                                 : Rational(it->get<double>());
    }
    std::optional<std::uint64_t> max_index;
    if (auto it = config.find("max_index"); it != config.end() && !it->is_null()) {
      max_index = it->get<std::uint64_t>();
    }
    auto expression = [](const nlohmann::json& v) {
      if (v.is_string()) return Coefficient::parse(v.get<std::string>());
      if (v.is_number_integer()) return Coefficient::parse(std::to_string(v.get<long long>()));
      throw Error(ErrorCode::kConfig, "expressions must be strings");
    };
    std::vector<BranchSpec> branches;
    for (const auto& b : config.at("branches")) {
      BranchSpec spec{b.value("label", "branch " + std::to_string(branches.size() + 1)),
                      expression(b.at("ratio")),
                      {}};
      for (const auto& t : b.at("translation")) spec.translation.push_back(expression(t));
      branches.push_back(std::move(spec));
    }
    return IndexedFamily(config.value("name", std::string("config")), dimension,
                         std::move(branches), {truncation, std::move(declared), max_index});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("family config: ") + e.what());
  }
}

IndexedFamily load_family(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  nlohmann::json config;
  try {
    config = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, path.string() + ": " + e.what());
  }
  return family_from_json(config);
}

}  // namespace cifs
