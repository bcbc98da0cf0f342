#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace awalk {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
/// 256-bit mantissa binary float used when exact rationals get too large.
using HpFloat = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<256, boost::multiprecision::digit_base_2>,
    boost::multiprecision::et_off>;

/// 2^n as a big integer.
BigInt pow2(std::uint64_t n);

/// Shortest decimal string that parses back to exactly `x`.
std::string format_double(double x);

/// Decimal string with enough digits to round-trip a 256-bit float.
std::string format_hp(const HpFloat& x);

/// "num/den" in lowest terms; integers print without a denominator.
std::string format_rational(const Rational& q);

double to_double(const Rational& q);

/// Strict decimal parsing without locale; the whole string must be consumed.
double parse_double(const std::string& text);
std::int64_t parse_int(const std::string& text);

}  // namespace awalk
