#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace voxcalc {

/// Exact rational number; GMP keeps it in lowest terms with a positive denominator.
using Rational = mpq_class;
using Integer = mpz_class;

/// n/d in lowest terms. The two-argument mpq_class constructor does not
/// canonicalize, so all fractions are built through this.
Rational ratio(long n, long d);
Rational ratio(const Integer& n, const Integer& d);

/// Generalized binomial coefficient C(n, k) for any integer n and k >= 0.
/// Returns 0 for k < 0.
Rational binomial(const Integer& n, long k);
Rational binomial(long n, long k);

/// Canonical "num/den" rendering (the denominator is always printed).
std::string to_string(const Rational& r);

/// Short rendering: "num" when the denominator is 1.
std::string to_short_string(const Rational& r);

/// Parses "a", "-a", "a/b". Throws std::invalid_argument on malformed input.
Rational parse_rational(std::string_view text);

}  // namespace voxcalc
