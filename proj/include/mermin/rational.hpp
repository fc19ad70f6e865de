#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace mermin {

/// Arbitrary-precision rational used by every exact computation.
using Rational = boost::multiprecision::cpp_rational;

/// Parses "num/den", an integer, or a decimal literal ("0.125", "1e-3",
/// "-2.5E2") into the exact rational it denotes. Throws std::invalid_argument
/// on malformed input or a zero denominator.
Rational parse_rational(std::string_view text);

/// Exact rational value of the shortest decimal string that round-trips to
/// `value`; 0.1 becomes 1/10, not the binary expansion of the double.
Rational rational_from_double(double value);

/// Canonical "num/den" rendering; integers render as "n/1".
std::string to_fraction_string(const Rational& r);

double to_double(const Rational& r);

}  // namespace mermin
