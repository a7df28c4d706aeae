#pragma once

#include <cstdint>
#include <string>

#include <boost/rational.hpp>

namespace effgap {

// Exact rational over 64-bit integers. Vote totals stay well below 2^40, so
// the products formed by the efficiency-gap formulas never overflow.
using Rational = boost::rational<std::int64_t>;

// "n/d", or "n" when the denominator is 1.
std::string to_string(const Rational& r);

// Fixed-point rendering of 100*r rounded half away from zero to `decimals`
// places, e.g. 0.147634 -> "14.76". No floating point is involved.
std::string format_percent(const Rational& r, int decimals = 2);

// Same rounding without the percent scaling.
std::string format_decimal(const Rational& r, int decimals);

// Parses "n", "n/d" or a plain decimal such as "0.05". Throws
// std::invalid_argument on malformed input.
Rational parse_rational(const std::string& text);

}  // namespace effgap
