#include "cifs/dsl.hpp"

#include <cctype>

#include "cifs/error.hpp"

namespace cifs::dsl {

Expr Expr::integer(Integer value) {
  return Expr(std::make_shared<const Node>(Node{IntegerLiteral{std::move(value)}}));
}
Expr Expr::index() { return Expr(std::make_shared<const Node>(Node{IndexVariable{}})); }
Expr Expr::negate(Expr operand) {
  return Expr(std::make_shared<const Node>(Node{Negate{std::move(operand)}}));
}
Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
  return Expr(std::make_shared<const Node>(Node{Binary{op, std::move(lhs), std::move(rhs)}}));
}
Expr Expr::power(Expr base, unsigned exponent) {
  return Expr(std::make_shared<const Node>(Node{Power{std::move(base), exponent}}));
}

namespace {

enum class TokenKind { kInteger, kIndex, kPlus, kMinus, kStar, kSlash, kCaret, kLParen, kRParen, kEnd };

struct Token {
  TokenKind kind;
  std::size_t position;
  std::string text;
};

class Lexer {
 public:
  explicit Lexer(std::string_view source) : source_(source) {}

  Token next() {
    while (pos_ < source_.size() && std::isspace(static_cast<unsigned char>(source_[pos_]))) ++pos_;
    std::size_t start = pos_;
    if (pos_ == source_.size()) return {TokenKind::kEnd, start, ""};
    char c = source_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (pos_ < source_.size() && std::isdigit(static_cast<unsigned char>(source_[pos_]))) ++pos_;
      return {TokenKind::kInteger, start, std::string(source_.substr(start, pos_ - start))};
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < source_.size() &&
             (std::isalnum(static_cast<unsigned char>(source_[pos_])) || source_[pos_] == '_')) {
        ++pos_;
      }
      std::string word(source_.substr(start, pos_ - start));
      if (word != "i") {
        throw ParseError(ErrorCode::kUnknownIdentifier, start,
                         "unknown identifier '" + word + "' (only 'i' is allowed)");
      }
      return {TokenKind::kIndex, start, word};
    }
    ++pos_;
    switch (c) {
      case '+': return {TokenKind::kPlus, start, "+"};
      case '-': return {TokenKind::kMinus, start, "-"};
      case '*': return {TokenKind::kStar, start, "*"};
      case '/': return {TokenKind::kSlash, start, "/"};
      case '^': return {TokenKind::kCaret, start, "^"};
      case '(': return {TokenKind::kLParen, start, "("};
      case ')': return {TokenKind::kRParen, start, ")"};
      default: break;
    }
    throw ParseError(ErrorCode::kSyntax, start, std::string("unexpected character '") + c + "'");
  }

 private:
  std::string_view source_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view source) : lexer_(source) { advance(); }

  Expr parse_all() {
    if (current_.kind == TokenKind::kEnd) {
      throw ParseError(ErrorCode::kSyntax, current_.position, "empty expression");
    }
    Expr e = expr();
    if (current_.kind != TokenKind::kEnd) {
      std::string what = current_.kind == TokenKind::kIndex || current_.kind == TokenKind::kInteger ||
                                 current_.kind == TokenKind::kLParen
                             ? " (implicit multiplication is not supported)"
                             : "";
      throw ParseError(ErrorCode::kSyntax, current_.position,
                       "unexpected '" + current_.text + "'" + what);
    }
    return e;
  }

 private:
  void advance() { current_ = lexer_.next(); }

  Expr expr() {
    Expr lhs = term();
    while (current_.kind == TokenKind::kPlus || current_.kind == TokenKind::kMinus) {
      BinaryOp op = current_.kind == TokenKind::kPlus ? BinaryOp::kAdd : BinaryOp::kSub;
      advance();
      lhs = Expr::binary(op, std::move(lhs), term());
    }
    return lhs;
  }

  Expr term() {
    Expr lhs = factor();
    while (current_.kind == TokenKind::kStar || current_.kind == TokenKind::kSlash) {
      BinaryOp op = current_.kind == TokenKind::kStar ? BinaryOp::kMul : BinaryOp::kDiv;
      advance();
      lhs = Expr::binary(op, std::move(lhs), factor());
    }
    return lhs;
  }

  Expr factor() {
    if (current_.kind == TokenKind::kMinus) {
      advance();
      return Expr::negate(factor());
    }
    Expr b = base();
    if (current_.kind == TokenKind::kCaret) {
      advance();
      if (current_.kind != TokenKind::kInteger) {
        throw ParseError(ErrorCode::kSyntax, current_.position,
                         "exponent must be a nonnegative integer literal");
      }
      Integer e(current_.text, 10);
      if (e > kMaxExponent) {
        throw ParseError(ErrorCode::kSyntax, current_.position,
                         "exponent exceeds " + std::to_string(kMaxExponent));
      }
      advance();
      return Expr::power(std::move(b), static_cast<unsigned>(e.get_ui()));
    }
    return b;
  }

  Expr base() {
    switch (current_.kind) {
      case TokenKind::kInteger: {
        Expr e = Expr::integer(Integer(current_.text, 10));
        advance();
        return e;
      }
      case TokenKind::kIndex:
        advance();
        return Expr::index();
      case TokenKind::kLParen: {
        advance();
        Expr e = expr();
        if (current_.kind != TokenKind::kRParen) {
          throw ParseError(ErrorCode::kSyntax, current_.position, "expected ')'");
        }
        advance();
        return e;
      }
      case TokenKind::kEnd:
        throw ParseError(ErrorCode::kSyntax, current_.position, "unexpected end of expression");
      default:
        throw ParseError(ErrorCode::kSyntax, current_.position,
                         "unexpected '" + current_.text + "'");
    }
  }

  Lexer lexer_;
  Token current_{TokenKind::kEnd, 0, ""};
};

// Binding strength used by the printer; higher binds tighter.
int precedence(const Expr& e) {
  return std::visit(
      [](const auto& n) -> int {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Binary>) {
          return n.op == BinaryOp::kAdd || n.op == BinaryOp::kSub ? 1 : 2;
        } else if constexpr (std::is_same_v<T, Negate>) {
          return 3;
        } else if constexpr (std::is_same_v<T, Power>) {
          return 4;
        } else {
          return 5;
        }
      },
      e.node().value);
}

void print_to(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, bool parens, std::string& out) {
  if (parens) out += '(';
  print_to(e, out);
  if (parens) out += ')';
}

void print_to(const Expr& e, std::string& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IntegerLiteral>) {
          out += n.value.get_str();
        } else if constexpr (std::is_same_v<T, IndexVariable>) {
          out += 'i';
        } else if constexpr (std::is_same_v<T, Negate>) {
          out += '-';
          print_wrapped(n.operand, precedence(n.operand) < 3, out);
        } else if constexpr (std::is_same_v<T, Power>) {
          print_wrapped(n.base, precedence(n.base) < 5, out);
          out += '^';
          out += std::to_string(n.exponent);
        } else {
          int p = precedence(e);
          static constexpr const char* kSymbols[] = {" + ", " - ", " * ", " / "};
          print_wrapped(n.lhs, precedence(n.lhs) < p, out);
          out += kSymbols[static_cast<int>(n.op)];
          print_wrapped(n.rhs, precedence(n.rhs) <= p, out);
        }
      },
      e.node().value);
}

Rational eval(const Expr& e, const Rational& i, std::uint64_t index) {
  return std::visit(
      [&](const auto& n) -> Rational {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IntegerLiteral>) {
          return Rational(n.value);
        } else if constexpr (std::is_same_v<T, IndexVariable>) {
          return i;
        } else if constexpr (std::is_same_v<T, Negate>) {
          return -eval(n.operand, i, index);
        } else if constexpr (std::is_same_v<T, Power>) {
          Rational b = eval(n.base, i, index);
          Rational result;
          mpz_pow_ui(result.get_num_mpz_t(), b.get_num_mpz_t(), n.exponent);
          mpz_pow_ui(result.get_den_mpz_t(), b.get_den_mpz_t(), n.exponent);
          return result;
        } else {
          Rational lhs = eval(n.lhs, i, index);
          Rational rhs = eval(n.rhs, i, index);
          switch (n.op) {
            case BinaryOp::kAdd: return lhs + rhs;
            case BinaryOp::kSub: return lhs - rhs;
            case BinaryOp::kMul: return lhs * rhs;
            case BinaryOp::kDiv:
              if (rhs == 0) {
                throw Error(ErrorCode::kDivisionByZero,
                            "division by zero evaluating at i = " + std::to_string(index));
              }
              return lhs / rhs;
          }
          return lhs;
        }
      },
      e.node().value);
}

}  // namespace

Expr parse(std::string_view source) { return Parser(source).parse_all(); }

std::string print(const Expr& expr) {
  std::string out;
  print_to(expr, out);
  return out;
}

Rational evaluate(const Expr& expr, std::uint64_t i) {
  if (i == 0) throw Error(ErrorCode::kInvalidArgument, "index i must be >= 1");
  return eval(expr, Rational(Integer(std::to_string(i), 10)), i);
}

bool operator==(const Expr& a, const Expr& b) {
  if (&a.node() == &b.node()) return true;
  const auto& va = a.node().value;
  const auto& vb = b.node().value;
  if (va.index() != vb.index()) return false;
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        const auto& m = std::get<T>(vb);
        if constexpr (std::is_same_v<T, IntegerLiteral>) {
          return n.value == m.value;
        } else if constexpr (std::is_same_v<T, IndexVariable>) {
          return true;
        } else if constexpr (std::is_same_v<T, Negate>) {
          return n.operand == m.operand;
        } else if constexpr (std::is_same_v<T, Power>) {
          return n.exponent == m.exponent && n.base == m.base;
        } else {
          return n.op == m.op && n.lhs == m.lhs && n.rhs == m.rhs;
        }
      },
      va);
}

}  // namespace cifs::dsl
