#pragma once

// Closed-form coefficient expressions in the index variable `i`.
//
// Grammar:
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := '-' factor | base ('^' integer)?
//   base   := integer | 'i' | '(' expr ')'
//
// Whitespace is ignored. Implicit multiplication ("2i") is rejected.

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>

#include "cifs/rational.hpp"

namespace cifs::dsl {

struct Node;

enum class BinaryOp { kAdd, kSub, kMul, kDiv };

class Expr {
 public:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  const Node& node() const noexcept { return *node_; }

  static Expr integer(Integer value);
  static Expr index();
  static Expr negate(Expr operand);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);
  static Expr power(Expr base, unsigned exponent);

 private:
  std::shared_ptr<const Node> node_;
};

struct IntegerLiteral {
  Integer value;
};
struct IndexVariable {};
struct Negate {
  Expr operand;
};
struct Binary {
  BinaryOp op;
  Expr lhs;
  Expr rhs;
};
struct Power {
  Expr base;
  unsigned exponent;
};

struct Node {
  std::variant<IntegerLiteral, IndexVariable, Negate, Binary, Power> value;
};

// Largest accepted exponent literal.
inline constexpr unsigned kMaxExponent = 4096;

Expr parse(std::string_view source);

// Canonical text that reparses to a structurally equal tree.
std::string print(const Expr& expr);

// Throws kDivisionByZero naming i when a denominator vanishes.
Rational evaluate(const Expr& expr, std::uint64_t i);

bool operator==(const Expr& a, const Expr& b);

}  // namespace cifs::dsl
