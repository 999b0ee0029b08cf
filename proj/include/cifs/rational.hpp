#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace cifs {

using Rational = mpq_class;
using Integer = mpz_class;

// Nearest double, ties to even (mpq_get_d alone truncates).
double to_double(const Rational& q);

// "p/q" in lowest terms, or "p" for integers.
inline std::string to_string(const Rational& q) { return q.get_str(); }

// Accepts "p", "p/q" or a decimal literal such as "0.125" or "-1e-3",
// converted exactly (0.1 becomes 1/10, not the nearest double).
Rational parse_rational(std::string_view text);

inline Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

}  // namespace cifs
