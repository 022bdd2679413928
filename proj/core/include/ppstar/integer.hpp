#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ppstar {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

using IntVector = std::vector<Integer>;

// Floor division and the matching non-negative remainder (b != 0).
Integer floor_div(const Integer& a, const Integer& b);
Integer floor_mod(const Integer& a, const Integer& b);

Integer gcd(const Integer& a, const Integer& b);
Integer lcm(const Integer& a, const Integer& b);

// Extended gcd: returns g >= 0 with g = x*a + y*b.
Integer ext_gcd(const Integer& a, const Integer& b, Integer& x, Integer& y);

// Fractional part in [0, 1).
Rational frac(const Rational& q);
Integer floor(const Rational& q);

// "p/q" with q > 0 and gcd(p, q) = 1; integers render as "p/1".
std::string to_string(const Rational& q);
std::string to_string(const Integer& z);

// Accepts "p", "p/q", "-p/q"; throws std::invalid_argument on malformed text.
Rational parse_rational(std::string_view text);

std::int64_t to_int64(const Integer& z);

}  // namespace ppstar
