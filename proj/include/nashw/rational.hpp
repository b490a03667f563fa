#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace nashw {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Accepts "p/q", integers and decimal/scientific literals ("0.25", "1e-3").
// Throws std::invalid_argument on malformed text or a zero denominator.
Rational parse_rational(std::string_view text);

// Exact conversion of the shortest round-trip decimal of `x`, so 0.1 maps to 1/10.
Rational rational_from_double(double x);

// "p" for integers, "p/q" otherwise.
std::string to_string(const Rational& r);

double to_double(const Rational& r);

// Natural log of a positive rational; safe for magnitudes outside double range.
double log_of(const Rational& r);

bool is_integer(const Rational& r);

BigInt lcm(const BigInt& a, const BigInt& b);

}  // namespace nashw
