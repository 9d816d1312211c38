#pragma once

// Exact rational scalars used for every symbolic coefficient and exponent.

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace threshold {

/// Arbitrary-size fraction, always stored in lowest terms with a positive denominator.
using Exact = boost::multiprecision::cpp_rational;

inline constexpr long kDefaultMaxDenominator = 1'000'000;

double to_double(const Exact& x);
long double to_long_double(const Exact& x);

int sign(const Exact& x);

/// Best rational approximation of x with denominator <= max_den (continued fractions).
Exact from_double(double x, long max_den = kDefaultMaxDenominator);

/// Parses "p", "p/q", "-p/q" exactly; decimals such as "0.1" go through from_double.
Exact parse_exact(std::string_view text);

/// "p" for integers, "p/q" otherwise.
std::string to_string(const Exact& x);

/// Exact square root when x is the square of a rational.
std::optional<Exact> exact_sqrt(const Exact& x);

}  // namespace threshold
