#include "nashw/rational.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace nashw {

namespace {

BigInt parse_integer(std::string_view digits) {
  if (digits.empty()) throw std::invalid_argument("empty integer");
  BigInt out = 0;
  for (char c : digits) {
    if (c < '0' || c > '9') throw std::invalid_argument("bad digit in '" + std::string(digits) + "'");
    out = out * 10 + (c - '0');
  }
  return out;
}

BigInt pow10(unsigned k) { return boost::multiprecision::pow(BigInt(10), k); }

Rational parse_decimal(std::string_view text) {
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_text = text.substr(e + 1);
    bool exp_negative = false;
    if (!exp_text.empty() && (exp_text.front() == '-' || exp_text.front() == '+')) {
      exp_negative = exp_text.front() == '-';
      exp_text.remove_prefix(1);
    }
    auto [ptr, ec] = std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
    if (ec != std::errc() || ptr != exp_text.data() + exp_text.size() || exp_text.empty()) {
      throw std::invalid_argument("bad exponent in '" + std::string(text) + "'");
    }
    if (exp_negative) exponent = -exponent;
    text = text.substr(0, e);
  }
  std::string digits;
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view frac = text.substr(dot + 1);
    digits = std::string(text.substr(0, dot)) + std::string(frac);
    exponent -= static_cast<long>(frac.size());
  } else {
    digits = std::string(text);
  }
  Rational value(parse_integer(digits));
  if (exponent > 0) {
    value *= Rational(pow10(static_cast<unsigned>(exponent)));
  } else if (exponent < 0) {
    value /= Rational(pow10(static_cast<unsigned>(-exponent)));
  }
  return negative ? Rational(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) throw std::invalid_argument("empty rational");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational num = parse_decimal(text.substr(0, slash));
    Rational den = parse_decimal(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    return num / den;
  }
  return parse_decimal(text);
}

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite value");
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw std::invalid_argument("cannot format double");
  return parse_decimal(std::string_view(buf, static_cast<std::size_t>(ptr - buf)));
}

std::string to_string(const Rational& r) {
  if (is_integer(r)) return boost::multiprecision::numerator(r).str();
  return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

double log_of(const Rational& r) {
  if (r <= 0) throw std::domain_error("log of non-positive rational");
  double direct = r.convert_to<double>();
  if (direct > 0 && std::isfinite(direct) && direct > 1e-300 && direct < 1e300) return std::log(direct);
  // Shift both parts down to 64 significant bits before taking logs.
  auto log_big = [](const BigInt& v) {
    std::size_t bits = boost::multiprecision::msb(v) + 1;
    std::size_t shift = bits > 64 ? bits - 64 : 0;
    BigInt top = v >> shift;
    return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
  };
  return log_big(boost::multiprecision::numerator(r)) - log_big(boost::multiprecision::denominator(r));
}

bool is_integer(const Rational& r) { return boost::multiprecision::denominator(r) == 1; }

BigInt lcm(const BigInt& a, const BigInt& b) {
  if (a == 0 || b == 0) return 0;
  return a / boost::multiprecision::gcd(a, b) * b;
}

}  // namespace nashw
