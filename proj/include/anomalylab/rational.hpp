#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace anomalylab {

/// Exact rational scalar used for every symbolic coefficient.
using Rational = mpq_class;

/// Lowest-terms rendering: "3", "-1/2".
std::string to_string(const Rational& q);

/// Parses "p", "-p", "p/q". Throws std::invalid_argument on malformed input
/// or a zero denominator.
Rational parse_rational(std::string_view text);

Rational binomial(int n, int k);

/// q^e for integer e (q must be nonzero when e < 0).
Rational power(const Rational& q, int e);

double to_double(const Rational& q);

}  // namespace anomalylab
