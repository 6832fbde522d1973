#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "expr/hash.hpp"
#include "uiobs/expr.hpp"

namespace uiobs {
namespace {

__extension__ using Wide = __int128;

constexpr Wide kMax = std::numeric_limits<std::int64_t>::max();
constexpr Wide kMin = -kMax;  // keep negation closed

bool fits(Wide v) { return v <= kMax && v >= kMin; }

Wide gcd_wide(Wide a, Wide b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    Wide t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Normalized rational from wide parts, or a real when it does not fit.
Number from_wide(Wide num, Wide den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  Wide g = gcd_wide(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (fits(num) && fits(den)) {
    return Number::rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
  }
  return Number::real(static_cast<double>(num) / static_cast<double>(den));
}

}  // namespace

Number Number::rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  Number n;
  if (den < 0) {
    num = -num;
    den = -den;
  }
  std::int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  n.num_ = num;
  n.den_ = den;
  return n;
}

Number Number::real(double value) {
  Number n;
  n.exact_ = false;
  n.num_ = 0;
  n.den_ = 1;
  n.real_ = value == 0.0 ? 0.0 : value;  // fold -0.0
  return n;
}

double Number::value() const noexcept {
  if (!exact_) return real_;
  return static_cast<double>(num_) / static_cast<double>(den_);
}

bool Number::is_zero() const noexcept { return exact_ ? num_ == 0 : real_ == 0.0; }
bool Number::is_one() const noexcept { return exact_ ? (num_ == 1 && den_ == 1) : real_ == 1.0; }
bool Number::is_negative() const noexcept { return exact_ ? num_ < 0 : real_ < 0.0; }

Number Number::operator-() const {
  if (!exact_) return real(-real_);
  return rational(-num_, den_);
}

Number Number::abs() const { return is_negative() ? -*this : *this; }

Number Number::inverse() const {
  if (is_zero()) throw std::domain_error("inverse of zero");
  if (!exact_) return real(1.0 / real_);
  return rational(den_, num_);
}

Number Number::pow(int exponent) const {
  if (exponent == 0) return Number(1);
  if (exponent < 0) return inverse().pow(-exponent);
  if (!exact_) return real(std::pow(real_, exponent));
  Number result(1);
  Number base = *this;
  unsigned e = static_cast<unsigned>(exponent);
  while (e != 0) {
    if (e & 1U) result = result * base;
    e >>= 1U;
    if (e != 0) base = base * base;
  }
  return result;
}

Number operator+(const Number& a, const Number& b) {
  if (!a.exact_ || !b.exact_) return Number::real(a.value() + b.value());
  Wide num = Wide(a.num_) * b.den_ + Wide(b.num_) * a.den_;
  Wide den = Wide(a.den_) * b.den_;
  return from_wide(num, den);
}

Number operator*(const Number& a, const Number& b) {
  if (!a.exact_ || !b.exact_) return Number::real(a.value() * b.value());
  return from_wide(Wide(a.num_) * b.num_, Wide(a.den_) * b.den_);
}

bool operator==(const Number& a, const Number& b) noexcept {
  if (a.exact_ != b.exact_) return false;
  if (a.exact_) return a.num_ == b.num_ && a.den_ == b.den_;
  return std::bit_cast<std::uint64_t>(a.real_) == std::bit_cast<std::uint64_t>(b.real_);
}

std::uint64_t Number::hash() const noexcept {
  if (exact_) {
    return detail::combine(detail::combine(1, static_cast<std::uint64_t>(num_)),
                           static_cast<std::uint64_t>(den_));
  }
  return detail::combine(2, std::bit_cast<std::uint64_t>(real_));
}

std::string Number::to_string() const {
  if (exact_) {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }
  // Shortest representation that round-trips.
  char buf[40];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, real_);
    if (std::strtod(buf, nullptr) == real_) break;
  }
  std::string s(buf);
  // Keep inexact numbers visibly real so printing is unambiguous.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

}  // namespace uiobs
