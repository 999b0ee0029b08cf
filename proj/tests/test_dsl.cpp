#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>

#include <random>

#include "cifs/dsl.hpp"
#include "cifs/error.hpp"

using namespace cifs;
using namespace cifs::dsl;
using Big = boost::multiprecision::cpp_rational;

namespace {

Rational eval(std::string_view s, std::uint64_t i) { return evaluate(parse(s), i); }

ErrorCode code_of(std::string_view s) {
  try {
    parse(s);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIo;  // sentinel: did not throw
}

// Random expression text with its value at i = 1..4, computed with Boost
// rationals while the text is built.
struct Gen {
  std::mt19937_64 rng;
  std::string text;
  std::array<Big, 4> value;

  std::string ws() { return rng() % 3 == 0 ? " " : ""; }

  std::pair<std::string, std::array<Big, 4>> make(int depth) {
    const unsigned pick = depth <= 0 ? rng() % 2 : rng() % 9;
    if (pick == 0) {
      const long v = static_cast<long>(rng() % 30);
      return {std::to_string(v), {Big(v), Big(v), Big(v), Big(v)}};
    }
    if (pick == 1) return {"i", {Big(1), Big(2), Big(3), Big(4)}};
    if (pick == 2) {
      auto [t, v] = make(depth - 1);
      for (auto& x : v) x = -x;
      return {"-" + ws() + "(" + t + ")", v};
    }
    if (pick == 3) {
      auto [t, v] = make(depth - 1);
      const unsigned e = rng() % 5;
      for (auto& x : v) {
        Big p = 1;
        for (unsigned k = 0; k < e; ++k) p *= x;
        x = p;
      }
      return {"(" + t + ")" + ws() + "^" + ws() + std::to_string(e), v};
    }
    auto [a, va] = make(depth - 1);
    auto [b, vb] = make(depth - 1);
    unsigned op = rng() % 4;
    if (op == 3) {
      for (const auto& x : vb) {
        if (x == 0) op = 2;
      }
    }
    static const char* kOps = "+-*/";
    std::array<Big, 4> v;
    for (int k = 0; k < 4; ++k) {
      switch (op) {
        case 0: v[k] = va[k] + vb[k]; break;
        case 1: v[k] = va[k] - vb[k]; break;
        case 2: v[k] = va[k] * vb[k]; break;
        default: v[k] = va[k] / vb[k]; break;
      }
    }
    return {"(" + a + ")" + ws() + kOps[op] + ws() + "(" + b + ")", v};
  }
};

}  // namespace

TEST(Parse, TreeShape) {
  const Expr e = parse("i/(i+1)");
  EXPECT_EQ(e, Expr::binary(BinaryOp::kDiv, Expr::index(),
                            Expr::binary(BinaryOp::kAdd, Expr::index(), Expr::integer(1))));
}

TEST(Parse, Precedence) {
  EXPECT_EQ(parse("2+3*i"), parse("2+(3*i)"));
  EXPECT_EQ(parse("-i^2"), parse("-(i^2)"));
  EXPECT_EQ(parse("1-2-3"), parse("(1-2)-3"));
  EXPECT_EQ(parse("8/4/2"), parse("(8/4)/2"));
  EXPECT_EQ(eval("-i^2", 3), Rational(-9));
  EXPECT_EQ(eval("(-i)^2", 3), Rational(9));
  EXPECT_EQ(eval("1-2-3", 1), Rational(-4));
  EXPECT_EQ(eval("  2 ^ 3 ", 1), Rational(8));
}

TEST(Parse, Errors) {
  EXPECT_EQ(code_of("2i"), ErrorCode::kSyntax);
  EXPECT_EQ(code_of("x+1"), ErrorCode::kUnknownIdentifier);
  EXPECT_EQ(code_of("ii"), ErrorCode::kUnknownIdentifier);
  EXPECT_EQ(code_of(""), ErrorCode::kSyntax);
  EXPECT_EQ(code_of("(i+1"), ErrorCode::kSyntax);
  EXPECT_EQ(code_of("i^-1"), ErrorCode::kSyntax);
  EXPECT_EQ(code_of("i^i"), ErrorCode::kSyntax);
  EXPECT_EQ(code_of("1 +"), ErrorCode::kSyntax);
  try {
    parse("1 + * 2");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 4u);
  }
}

TEST(Evaluate, Examples) {
  EXPECT_EQ(eval("i/(i+1)", 3), Rational(3, 4));
  EXPECT_EQ(eval("-i/(i+1)", 1), Rational(-1, 2));
  EXPECT_EQ(eval("2^3", 1), Rational(8));
  EXPECT_EQ(eval("(2*i+1)/i", 1), Rational(3));
  EXPECT_EQ(eval("1/(i+1)^2", 1), Rational(1, 4));
  EXPECT_EQ(eval("0^0", 1), Rational(1));
}

TEST(Evaluate, DivisionByZeroNamesIndex) {
  try {
    eval("1/(i-2)", 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDivisionByZero);
    EXPECT_NE(std::string(e.what()).find("i = 2"), std::string::npos) << e.what();
  }
  EXPECT_EQ(eval("1/(i-2)", 3), Rational(1));
  EXPECT_THROW(eval("i", 0), Error);
}

TEST(Evaluate, PaperCoefficients) {
  const std::vector<std::pair<std::string, std::function<Big(long)>>> cases = {
      {"i/(i+1)", [](long i) { return Big(i) / (i + 1); }},
      {"1/(i+1)^2", [](long i) { return Big(1) / ((i + 1) * (i + 1)); }},
      {"(2*i+1)/i", [](long i) { return Big(2 * i + 1) / i; }},
      {"-i/(i+1)", [](long i) { return Big(-i) / (i + 1); }},
      {"1/(i+1)", [](long i) { return Big(1) / (i + 1); }}};
  for (const auto& [text, oracle] : cases) {
    for (long i = 1; i <= 3; ++i) EXPECT_EQ(eval(text, i).get_str(), oracle(i).str()) << text << " i=" << i;
  }
}

TEST(Property, RandomExpressionsAgreeWithIndependentEvaluator) {
  Gen g{std::mt19937_64(2024), {}, {}};
  for (int t = 0; t < 100; ++t) {
    const auto [text, values] = g.make(5);
    const Expr e = parse(text);
    for (std::uint64_t i = 1; i <= 4; ++i) {
      EXPECT_EQ(evaluate(e, i).get_str(), values[i - 1].str()) << text << " at i=" << i;
    }
  }
}

TEST(Property, PrintParseIdempotence) {
  Gen g{std::mt19937_64(99), {}, {}};
  for (int t = 0; t < 100; ++t) {
    const Expr e = parse(g.make(5).first);
    const std::string printed = print(e);
    const Expr again = parse(printed);
    EXPECT_EQ(again, e) << printed;
    EXPECT_EQ(print(again), printed);
  }
  for (const char* s : {"-i^2", "(-i)^2", "1-(2-3)", "i/(i*(i+1))", "--i", "-(1+i)*3"}) {
    EXPECT_EQ(parse(print(parse(s))), parse(s)) << s;
  }
}
