#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rtf {

using BigInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                             boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<
    boost::multiprecision::rational_adaptor<boost::multiprecision::cpp_int_backend<>>,
    boost::multiprecision::et_off>;

inline constexpr int kOrdInfinity = 1 << 28;

// p-adic valuation of a nonzero integer
inline int ord_p(BigInt n, std::uint64_t p) {
  if (n == 0) return kOrdInfinity;
  int k = 0;
  while (n % p == 0) {
    n /= p;
    ++k;
  }
  return k;
}

inline int ord_p(const Rational& x, std::uint64_t p) {
  if (x == 0) return kOrdInfinity;
  return ord_p(boost::multiprecision::numerator(x), p) -
         ord_p(boost::multiprecision::denominator(x), p);
}

// p-free part of a nonzero rational, reduced to a residue mod m (m a power of p)
inline std::uint64_t unit_residue(const Rational& x, std::uint64_t p, std::uint64_t m) {
  BigInt n = boost::multiprecision::numerator(x);
  BigInt d = boost::multiprecision::denominator(x);
  if (n == 0) throw std::domain_error("unit_residue of zero");
  while (n % p == 0) n /= p;
  while (d % p == 0) d /= p;
  BigInt mm = m;
  BigInt nr = ((n % mm) + mm) % mm;
  BigInt dr = ((d % mm) + mm) % mm;
  // inverse of dr mod m by extended Euclid
  BigInt a = dr, b = mm, x0 = 1, x1 = 0;
  while (b != 0) {
    BigInt qt = a / b;
    BigInt t = a - qt * b;
    a = b;
    b = t;
    t = x0 - qt * x1;
    x0 = x1;
    x1 = t;
  }
  if (a != 1) throw std::domain_error("unit_residue: not invertible");
  BigInt inv = ((x0 % mm) + mm) % mm;
  return static_cast<std::uint64_t>((nr * inv) % mm);
}

inline double to_double(const Rational& x) { return x.convert_to<double>(); }

inline Rational rpow(const Rational& base, int e) {
  Rational r = 1;
  Rational b = e >= 0 ? base : Rational(1) / base;
  for (int i = 0; i < (e >= 0 ? e : -e); ++i) r *= b;
  return r;
}

inline std::uint64_t ipow(std::uint64_t b, int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// trial division, fine for the sizes used here
inline std::vector<std::pair<BigInt, int>> factor(BigInt n) {
  std::vector<std::pair<BigInt, int>> out;
  if (n < 0) n = -n;
  if (n <= 1) return out;
  for (BigInt p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p == 0) {
      int k = 0;
      while (n % p == 0) {
        n /= p;
        ++k;
      }
      out.emplace_back(p, k);
    }
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

inline std::vector<std::uint64_t> prime_divisors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      out.push_back(p);
      while (n % p == 0) n /= p;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline std::vector<std::uint64_t> primes_below(std::uint64_t bound) {
  std::vector<bool> sieve(bound, true);
  std::vector<std::uint64_t> out;
  for (std::uint64_t i = 2; i < bound; ++i) {
    if (!sieve[i]) continue;
    out.push_back(i);
    for (std::uint64_t j = i * i; j < bound; j += i) sieve[j] = false;
  }
  return out;
}

inline std::string to_string(const Rational& x) { return x.str(); }

}  // namespace rtf
