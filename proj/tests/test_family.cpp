#include <gtest/gtest.h>

#include <fstream>

#include "cifs/error.hpp"
#include "cifs/family.hpp"

using namespace cifs;

namespace {

std::vector<double> sorted(const PointCloud& c) {
  std::vector<double> v(c.coords().begin(), c.coords().end());
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST(Materialize, Builtins) {
  const IndexedFamily ex1 = builtins::ex1(10);
  EXPECT_EQ(ex1.materialize({0, 1}).ratio(), Rational(1, 2));
  EXPECT_EQ(ex1.materialize({0, 1}).translation()[0], Rational(1, 4));

  const IndexedFamily ex2 = builtins::ex2(10);
  EXPECT_EQ(ex2.materialize({0, 1}).ratio(), Rational(-1, 2));
  EXPECT_EQ(ex2.materialize({0, 1}).translation()[0], Rational(3));
  EXPECT_EQ(ex2.materialize({1, 2}).translation()[0], Rational(1, 3));

  const IndexedFamily dy = builtins::dyadic();
  EXPECT_EQ(dy.materialize({0, 2}).ratio(), Rational(1, 2));
  EXPECT_EQ(dy.materialize({0, 2}).translation()[0], Rational(1, 2));
  EXPECT_EQ(dy.truncation(), 2u);
}

TEST(Materialize, OutOfRange) {
  const IndexedFamily ex1 = builtins::ex1(5);
  EXPECT_THROW(ex1.materialize({0, 6}), Error);
  EXPECT_THROW(ex1.materialize({1, 1}), Error);
  EXPECT_THROW(ex1.materialize({0, 0}), Error);
}

TEST(GlobalIndex, InterleavesBranches) {
  const IndexedFamily ex2 = builtins::ex2(3);
  EXPECT_EQ(ex2.map_count(), 6u);
  EXPECT_EQ(ex2.pair_of(1), (MapIndex{0, 1}));
  EXPECT_EQ(ex2.pair_of(2), (MapIndex{1, 1}));
  EXPECT_EQ(ex2.pair_of(5), (MapIndex{0, 3}));
  for (std::size_t g = 1; g <= 6; ++g) EXPECT_EQ(ex2.global_of(ex2.pair_of(g)), g);
  EXPECT_EQ(ex2.map_count(2), 4u);
}

TEST(Validation, RejectsNonContractionNamingBranchAndIndex) {
  std::vector<BranchSpec> b = {{"bad", Coefficient::parse("i/2"), {Coefficient::parse("0")}}};
  try {
    IndexedFamily("bad", 1, std::move(b), {5, std::nullopt, std::nullopt});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotContraction);
    EXPECT_NE(std::string(e.what()).find("i = 2"), std::string::npos) << e.what();
  }
}

TEST(Validation, DeclaredRatioBound) {
  auto make = [](Rational declared) {
    std::vector<BranchSpec> b = {{"", Coefficient::parse("1/2"), {Coefficient::parse("i")}}};
    return IndexedFamily("x", 1, std::move(b), {3, declared, std::nullopt});
  };
  EXPECT_NO_THROW(make(Rational(1, 2)));
  EXPECT_THROW(make(Rational(1, 3)), Error);
}

TEST(Validation, DivisionByZeroPropagates) {
  std::vector<BranchSpec> b = {{"", Coefficient::parse("1/(i-2)/10"), {Coefficient::parse("0")}}};
  try {
    IndexedFamily("x", 1, std::move(b), {3, std::nullopt, std::nullopt});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDivisionByZero);
  }
}

TEST(FixedPointSet, Examples) {
  EXPECT_EQ(sorted(fixed_point_set(builtins::ex1(3), 3)), (std::vector<double>{0.25, 1.0 / 3, 0.5}));
  EXPECT_EQ(sorted(fixed_point_set(builtins::dyadic(), 2)), (std::vector<double>{0.0, 1.0}));
  // closed-form oracle b / (1 - r) for F_1, F_2, F~_1, F~_2
  auto fp = [](Rational r, Rational b) { return to_double(b / (1 - r)); };
  std::vector<double> expect = {fp(Rational(-1, 2), 3), fp(Rational(-2, 3), Rational(5, 2)),
                                fp(Rational(-1, 2), Rational(1, 2)), fp(Rational(-2, 3), Rational(1, 3))};
  std::sort(expect.begin(), expect.end());
  EXPECT_EQ(expect, (std::vector<double>{0.2, 1.0 / 3, 1.5, 2.0}));
  EXPECT_EQ(sorted(fixed_point_set(builtins::ex2(2), 2)), expect);
  EXPECT_THROW(fixed_point_set(builtins::ex1(3), 4), Error);
}

TEST(FixedPointSet, Ex1InsideInvariantInterval) {
  for (std::uint64_t n : {1u, 10u, 100u, 1000u}) {
    const PointCloud d = fixed_point_set(builtins::ex1(n), n);
    EXPECT_GE(d.lower()[0], 0.0);
    EXPECT_LE(d.upper()[0], 0.5);
  }
}

TEST(Ex1, IntervalInvariantExactly) {
  const IndexedFamily ex1 = builtins::ex1(10'000);
  for (std::size_t g = 1; g <= ex1.map_count(); ++g) {
    const MapDescriptor& f = ex1.map(g);
    const Rational lo = f.translation()[0];
    const Rational hi = f.ratio() / 2 + f.translation()[0];
    ASSERT_TRUE(lo >= 0 && hi <= Rational(1, 2)) << g;
  }
}

TEST(SupRatio, Examples) {
  const SupRatio a = sup_ratio(builtins::ex1(99));
  EXPECT_EQ(a.empirical_exact, Rational(99, 100));
  ASSERT_TRUE(a.declared);
  EXPECT_EQ(*a.declared, 1.0);
  EXPECT_FALSE(a.truncation_warning);
  EXPECT_TRUE(sup_ratio(builtins::ex1(10)).truncation_warning);
  EXPECT_EQ(sup_ratio(builtins::dyadic()).empirical_exact, Rational(1, 2));
  EXPECT_EQ(sup_ratio(builtins::geo(Rational(1, 3), 10)).empirical_exact, Rational(1, 3));
  EXPECT_FALSE(sup_ratio(builtins::dyadic()).declared);
}

TEST(SupRatio, Ex1StrictlyIncreasing) {
  const IndexedFamily ex1 = builtins::ex1(500);
  Rational prev = 0;
  for (std::uint64_t n = 1; n <= 500; ++n) {
    const Rational r = sup_ratio(ex1, n).empirical_exact;
    EXPECT_GT(r, prev);
    EXPECT_LT(r, 1);
    prev = r;
  }
}

TEST(Builtins, ByName) {
  EXPECT_EQ(builtins::by_name("ex1", 4).name(), "EX1");
  EXPECT_EQ(builtins::by_name("GEO(1/3)", 4).map(2).translation()[0], Rational(1, 4));
  EXPECT_EQ(builtins::by_name("geo:1/2", 4).map(1).ratio(), Rational(1, 2));
  EXPECT_THROW(builtins::by_name("NOPE", 4), Error);
  EXPECT_EQ(builtins::single_half().map_count(), 1u);
}

TEST(Config, RoundTripFromJson) {
  const nlohmann::json j = nlohmann::json::parse(R"json({
    "dimension": 1, "truncation": 4, "declared_sup_ratio": 1,
    "branches": [ { "ratio": "i/(i+1)", "translation": ["1/(i+1)^2"] } ] })json");
  const IndexedFamily f = family_from_json(j);
  const IndexedFamily ex1 = builtins::ex1(4);
  for (std::size_t g = 1; g <= 4; ++g) EXPECT_EQ(f.map(g), ex1.map(g));
  EXPECT_EQ(*f.declared_sup_ratio(), Rational(1));
}

TEST(Config, TabulatedLiterals) {
  const IndexedFamily f = family_from_json(nlohmann::json::parse(R"json({
    "dimension": 2, "truncation": 1, "declared_sup_ratio": null,
    "branches": [ { "ratio": "1/2", "translation": ["0", "0"] },
                  { "ratio": "1/2", "translation": ["1/2", "0"] },
                  { "ratio": "1/2", "translation": ["1/4", "1/2"] } ] })json"));
  EXPECT_EQ(f.map_count(), 3u);
  EXPECT_EQ(f.dimension(), 2u);
}

TEST(Config, Errors) {
  auto code = [](const char* text) {
    try {
      family_from_json(nlohmann::json::parse(text));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIo;
  };
  EXPECT_EQ(code(R"({"dimension": 1, "truncation": 2})"), ErrorCode::kConfig);
  EXPECT_EQ(code(R"({"dimension": 1, "truncation": 2, "branches": [{"ratio": "2i", "translation": ["0"]}]})"),
            ErrorCode::kSyntax);
  EXPECT_EQ(code(R"({"dimension": 2, "truncation": 2, "branches": [{"ratio": "1/2", "translation": ["0"]}]})"),
            ErrorCode::kConfig);
  EXPECT_THROW(load_family("/nonexistent/family.json"), Error);
}

TEST(Truncation, WithTruncationRematerializes) {
  const IndexedFamily a = builtins::ex1(3);
  const IndexedFamily b = a.with_truncation(7);
  EXPECT_EQ(b.map_count(), 7u);
  EXPECT_EQ(b.map(7).ratio(), Rational(7, 8));
  EXPECT_EQ(builtins::dyadic().with_truncation(50).map_count(), 2u);
}
