#include "ppstar/integer.hpp"

#include <charconv>
#include <stdexcept>

namespace ppstar {

Integer floor_div(const Integer& a, const Integer& b) {
  Integer q = a / b;
  Integer r = a - q * b;
  if (r != 0 && ((r < 0) != (b < 0))) --q;
  return q;
}

Integer floor_mod(const Integer& a, const Integer& b) {
  Integer r = a % b;
  if (r < 0) r += (b < 0 ? -b : b);
  return r;
}

Integer gcd(const Integer& a, const Integer& b) {
  Integer x = a < 0 ? Integer(-a) : a;
  Integer y = b < 0 ? Integer(-b) : b;
  while (y != 0) {
    Integer t = x % y;
    x = std::move(y);
    y = std::move(t);
  }
  return x;
}

Integer lcm(const Integer& a, const Integer& b) {
  if (a == 0 || b == 0) return 0;
  Integer r = (a / gcd(a, b)) * b;
  return r < 0 ? Integer(-r) : r;
}

Integer ext_gcd(const Integer& a, const Integer& b, Integer& x, Integer& y) {
  Integer old_r = a, r = b;
  Integer old_s = 1, s = 0;
  Integer old_t = 0, t = 1;
  while (r != 0) {
    Integer q = old_r / r;
    Integer tmp = old_r - q * r;
    old_r = std::move(r);
    r = std::move(tmp);
    tmp = old_s - q * s;
    old_s = std::move(s);
    s = std::move(tmp);
    tmp = old_t - q * t;
    old_t = std::move(t);
    t = std::move(tmp);
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_s = -old_s;
    old_t = -old_t;
  }
  x = old_s;
  y = old_t;
  return old_r;
}

Integer floor(const Rational& q) {
  return floor_div(numerator(q), denominator(q));
}

Rational frac(const Rational& q) {
  Integer num = numerator(q);
  Integer den = denominator(q);
  return Rational(floor_mod(num, den), den);
}

std::string to_string(const Rational& q) {
  return numerator(q).str() + "/" + denominator(q).str();
}

std::string to_string(const Integer& z) { return z.str(); }

namespace {

Integer parse_integer(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty integer literal");
  std::size_t i = 0;
  bool negative = false;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    i = 1;
  }
  if (i == text.size()) throw std::invalid_argument("sign without digits");
  Integer value = 0;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (c < '0' || c > '9') throw std::invalid_argument("non-digit in integer literal");
    value = value * 10 + (c - '0');
  }
  return negative ? Integer(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_integer(text));
  Integer num = parse_integer(text.substr(0, slash));
  std::string_view den_text = text.substr(slash + 1);
  if (!den_text.empty() && (den_text[0] == '-' || den_text[0] == '+'))
    throw std::invalid_argument("signed denominator");
  Integer den = parse_integer(den_text);
  if (den == 0) throw std::invalid_argument("zero denominator");
  return Rational(num, den);
}

std::int64_t to_int64(const Integer& z) { return z.convert_to<std::int64_t>(); }

}  // namespace ppstar
