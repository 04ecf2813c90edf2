#pragma once

#include "rtf/rational.hpp"

#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>

namespace rtf {

// a + b sqrt(q) at one finite place
struct LocalValue {
  std::uint64_t q = 0;
  Rational a = 0;
  Rational b = 0;

  LocalValue() = default;
  LocalValue(std::uint64_t q_, Rational a_, Rational b_ = 0) : q(q_), a(std::move(a_)), b(std::move(b_)) {}

  static LocalValue rational(std::uint64_t q, const Rational& r) { return {q, r, 0}; }

  // q^{k/2}
  static LocalValue half_power(std::uint64_t q, int k) {
    Rational qq = q;
    if (k % 2 == 0) return {q, rpow(qq, k / 2), 0};
    int e = (k - 1) / 2;  // q^{k/2} = q^{(k-1)/2} sqrt(q), valid for negative odd k too
    if (k < 0) e = -((-k + 1) / 2);
    return {q, 0, rpow(qq, e)};
  }

  double to_double() const {
    return rtf::to_double(a) + rtf::to_double(b) * std::sqrt(static_cast<double>(q));
  }
  bool is_zero() const { return a == 0 && b == 0; }

  friend std::uint64_t merge_q(const LocalValue& x, const LocalValue& y) {
    if (x.b == 0) return y.q ? y.q : x.q;
    if (y.b == 0) return x.q ? x.q : y.q;
    if (x.q != y.q) throw std::invalid_argument("LocalValue: mixing places");
    return x.q;
  }
  friend LocalValue operator+(const LocalValue& x, const LocalValue& y) {
    return {merge_q(x, y), x.a + y.a, x.b + y.b};
  }
  friend LocalValue operator-(const LocalValue& x, const LocalValue& y) {
    return {merge_q(x, y), x.a - y.a, x.b - y.b};
  }
  friend LocalValue operator-(const LocalValue& x) { return {x.q, -x.a, -x.b}; }
  friend LocalValue operator*(const LocalValue& x, const LocalValue& y) {
    std::uint64_t q = merge_q(x, y);
    Rational qq = q;
    return {q, x.a * y.a + x.b * y.b * qq, x.a * y.b + x.b * y.a};
  }
  friend LocalValue operator*(const Rational& r, const LocalValue& x) { return {x.q, r * x.a, r * x.b}; }
  LocalValue& operator+=(const LocalValue& y) { return *this = *this + y; }
  LocalValue& operator*=(const LocalValue& y) { return *this = *this * y; }
  friend bool operator==(const LocalValue& x, const LocalValue& y) { return x.a == y.a && x.b == y.b; }
  friend std::ostream& operator<<(std::ostream& os, const LocalValue& x) {
    return os << x.a << " + " << x.b << "*sqrt(" << x.q << ")";
  }
};

}  // namespace rtf
