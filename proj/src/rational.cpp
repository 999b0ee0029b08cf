#include "cifs/rational.hpp"

#include <cctype>
#include <cmath>
#include <cstring>
#include <cstdint>
#include <limits>
#include <string>

#include "cifs/error.hpp"

namespace cifs {

double to_double(const Rational& q) {
  const double t = q.get_d();
  if (!std::isfinite(t) || Rational(t) == q) return t;
  const double away = std::nextafter(t, q > 0 ? std::numeric_limits<double>::infinity()
                                               : -std::numeric_limits<double>::infinity());
  if (!std::isfinite(away)) return t;
  const Rational dt = abs(Rational(q - Rational(t)));
  const Rational da = abs(Rational(Rational(away) - q));
  if (dt != da) return dt < da ? t : away;
  std::uint64_t bits;
  std::memcpy(&bits, &t, sizeof bits);
  return (bits & 1) == 0 ? t : away;
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto fail = [&]() -> Rational {
    throw Error(ErrorCode::kInvalidArgument, "not a rational number: '" + s + "'");
  };
  if (s.empty()) return fail();
  if (s.find('/') != std::string::npos) {
    Rational q;
    if (q.set_str(s, 10) != 0 || q.get_den() == 0) return fail();
    q.canonicalize();
    return q;
  }
  // Decimal with optional exponent: [sign] digits [. digits] [e [sign] digits]
  std::size_t pos = 0;
  bool negative = false;
  if (s[pos] == '+' || s[pos] == '-') negative = s[pos++] == '-';
  std::string digits;
  long scale = 0;
  bool any_digit = false;
  while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
    digits += s[pos++];
    any_digit = true;
  }
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      digits += s[pos++];
      --scale;
      any_digit = true;
    }
  }
  if (!any_digit) return fail();
  if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
    ++pos;
    std::size_t used = 0;
    long exponent = 0;
    try {
      exponent = std::stol(s.substr(pos), &used);
    } catch (const std::exception&) {
      return fail();
    }
    if (used == 0 || exponent > 4000 || exponent < -4000) return fail();
    pos += used;
    scale += exponent;
  }
  if (pos != s.size()) return fail();
  Integer mantissa(digits, 10);
  Integer ten_power;
  mpz_ui_pow_ui(ten_power.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
  Rational q = scale < 0 ? Rational(mantissa, ten_power) : Rational(mantissa * ten_power);
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

}  // namespace cifs
