#pragma once

#include <gmpxx.h>
#include <string>

namespace confgc {

// Exact arithmetic. mpq_class keeps values in lowest terms with positive
// denominator, which is exactly the Rational invariant we need.
using Integer = mpz_class;
using Rational = mpq_class;

// Parses "p/q" or "p". Throws ParseError on malformed input.
Rational parse_rational(const std::string& s, int line = 0);

// Always prints an explicit denominator, "p/q".
std::string rational_to_string(const Rational& r);

inline int sign_pow(int sign, long exponent) { return (exponent % 2 == 0) ? 1 : sign; }

// (-1)^e
inline int neg_one_pow(long e) { return (e % 2 == 0) ? 1 : -1; }

} // namespace confgc
