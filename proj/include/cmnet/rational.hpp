#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace cmnet {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// "p/q" or "p" in lowest terms.
std::string to_string(const Rational& r);

/// Accepts "p/q", "p", or a decimal literal such as "0.25" (converted exactly).
Rational parse_rational(std::string_view text);

/// The exact binary value of a finite double.
Rational exact_rational(double x);

double to_double(const Rational& r);

}  // namespace cmnet
