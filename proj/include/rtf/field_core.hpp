#pragma once

#include "rtf/rational.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/digamma.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace rtf {

struct Place {
  enum class Kind { archimedean, finite };
  Kind kind = Kind::archimedean;
  std::uint64_t prime = 0;

  static Place infinite() { return {}; }
  static Place finite(std::uint64_t p) {
    if (!is_prime(p)) throw std::invalid_argument("Place: not a prime");
    return {Kind::finite, p};
  }
  std::uint64_t residue_size() const { return prime; }
  bool is_archimedean() const { return kind == Kind::archimedean; }
};

// constants of Q carried explicitly
inline constexpr double kDiscF = 1.0;   // D_F
inline constexpr int kDegreeF = 1;      // d_F = [F:Q]
inline constexpr int kLocalDifferent = 0;

struct IdealQ {
  std::uint64_t n = 1;
  std::vector<std::pair<std::uint64_t, int>> fac;

  IdealQ() = default;
  explicit IdealQ(std::uint64_t value) : n(value) {
    if (value == 0) throw std::invalid_argument("IdealQ: zero ideal");
    std::uint64_t m = value;
    for (std::uint64_t p = 2; p * p <= m; ++p) {
      int k = 0;
      while (m % p == 0) {
        m /= p;
        ++k;
      }
      if (k) fac.emplace_back(p, k);
    }
    if (m > 1) fac.emplace_back(m, 1);
  }
  int ord(std::uint64_t p) const {
    for (auto& [q, k] : fac)
      if (q == p) return k;
    return 0;
  }
  std::vector<std::uint64_t> support() const {
    std::vector<std::uint64_t> s;
    for (auto& pk : fac) s.push_back(pk.first);
    return s;
  }
  bool is_unit() const { return n == 1; }
};

// Kronecker symbol (a|n) for n >= 1
inline int kronecker(long long a, long long n) {
  if (n <= 0) throw std::invalid_argument("kronecker: n must be positive");
  int result = 1;
  while (n % 2 == 0) {
    n /= 2;
    if (a % 2 == 0) return 0;
    long long r = ((a % 8) + 8) % 8;
    if (r == 3 || r == 5) result = -result;
  }
  // Jacobi symbol (a|n), n odd
  long long aa = ((a % n) + n) % n;
  long long nn = n;
  while (aa != 0) {
    while (aa % 2 == 0) {
      aa /= 2;
      long long r = nn % 8;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(aa, nn);
    if (aa % 4 == 3 && nn % 4 == 3) result = -result;
    aa %= nn;
  }
  return nn == 1 ? result : 0;
}

inline bool is_fundamental_discriminant(long long D) {
  if (D == 1) return true;
  if (D == 0) return false;
  auto squarefree = [](long long m) {
    if (m < 0) m = -m;
    for (long long d = 2; d * d <= m; ++d)
      if (m % (d * d) == 0) return false;
    return true;
  };
  long long r = ((D % 4) + 4) % 4;
  if (r == 1) return squarefree(D);
  if (r == 0) {
    long long m = D / 4;
    long long mr = ((m % 4) + 4) % 4;
    return (mr == 2 || mr == 3) && squarefree(m);
  }
  return false;
}

struct QuadraticCharacter {
  long long D = 1;

  QuadraticCharacter() = default;
  explicit QuadraticCharacter(long long disc) : D(disc) {
    if (!is_fundamental_discriminant(disc))
      throw std::invalid_argument("QuadraticCharacter: not a fundamental discriminant");
  }
  bool trivial() const { return D == 1; }
  std::uint64_t conductor() const { return static_cast<std::uint64_t>(D < 0 ? -D : D); }
  int sign_at_infinity() const { return D < 0 ? 1 : 0; }  // eps(eta)

  // exponent of p in the conductor
  int conductor_exponent(std::uint64_t p) const {
    std::uint64_t f = conductor();
    int k = 0;
    while (f % p == 0) {
      f /= p;
      ++k;
    }
    return k;
  }

  // p-primary discriminant D_p with D = prod D_p
  long long primary_discriminant(std::uint64_t p) const {
    int e = conductor_exponent(p);
    if (e == 0) return 1;
    if (p != 2) return (p % 4 == 1) ? static_cast<long long>(p) : -static_cast<long long>(p);
    long long odd = D;
    while (odd % 2 == 0) odd /= 2;
    // the odd part is a product of p* = +-p, so it is 1 mod 4
    long long sign_odd = 1;
    long long m = odd < 0 ? -odd : odd;
    for (auto q : prime_divisors(static_cast<std::uint64_t>(m)))
      sign_odd *= (q % 4 == 1) ? 1 : -1;
    long long odd_disc = sign_odd * m;
    long long d2 = D / odd_disc;
    return d2;
  }
};

// eta_p(varpi_p): Kronecker symbol (D|p); zero when p divides the conductor
inline int eta_local(const QuadraticCharacter& eta, std::uint64_t p) {
  if (eta.trivial()) return 1;
  return kronecker(eta.D, static_cast<long long>(p));
}

inline int eta_tilde(const QuadraticCharacter& eta, const IdealQ& n) {
  int s = 1;
  for (auto& [p, k] : n.fac) {
    int e = eta_local(eta, p);
    if (e == 0) throw std::invalid_argument("eta_tilde: ideal not prime to the conductor");
    if (k % 2) s *= e;
  }
  return s;
}

// Value of the p-component of the idele class character on the uniformizer p,
// for p dividing the conductor: the product of the other primary characters at p.
inline int eta_ramified_uniformizer(const QuadraticCharacter& eta, std::uint64_t p) {
  int s = 1;
  for (auto q : prime_divisors(eta.conductor())) {
    if (q == p) continue;
    s *= kronecker(eta.primary_discriminant(q), static_cast<long long>(p));
  }
  return s;
}

// eta_p on a unit u (given mod |D_p|) for p dividing the conductor
inline int eta_ramified_unit(const QuadraticCharacter& eta, std::uint64_t p, std::uint64_t u) {
  long long Dp = eta.primary_discriminant(p);
  long long m = Dp < 0 ? -Dp : Dp;
  long long r = static_cast<long long>(u % static_cast<std::uint64_t>(m));
  return kronecker(Dp, r);
}

inline std::complex<double> local_gauss_sum(const QuadraticCharacter& eta, std::uint64_t p) {
  const double pi = boost::math::constants::pi<double>();
  int f = eta.conductor_exponent(p);
  if (f == 0) return 1.0;
  std::uint64_t pf = ipow(p, f);
  int eta_p = eta_ramified_uniformizer(eta, p);
  int sign = (f % 2 == 1) ? eta_p : 1;  // eta_p(varpi^{-f})
  std::complex<double> s = 0.0;
  for (std::uint64_t u = 1; u < pf; ++u) {
    if (u % p == 0) continue;
    double ang = -2.0 * pi * static_cast<double>(u) / static_cast<double>(pf);
    s += static_cast<double>(eta_ramified_unit(eta, p, u)) * std::polar(1.0, ang);
  }
  double qd = static_cast<double>(p);
  return s * static_cast<double>(sign) / (static_cast<double>(pf) * (1.0 - 1.0 / qd));
}

inline std::complex<double> gauss_sum(const QuadraticCharacter& eta) {
  std::complex<double> g = 1.0;
  if (eta.trivial()) return g;
  for (auto p : prime_divisors(eta.conductor())) g *= local_gauss_sum(eta, p);
  return g;
}

inline double gauss_sum_modulus_formula(const QuadraticCharacter& eta) {
  double f = static_cast<double>(eta.conductor());
  double v = 1.0 / std::sqrt(f);
  for (auto p : prime_divisors(eta.conductor())) v /= (1.0 - 1.0 / static_cast<double>(p));
  return v;
}

// Dirichlet character value eta~(n) on integers (0 when not coprime)
inline int eta_integer(const QuadraticCharacter& eta, long long n) {
  if (eta.trivial()) return 1;
  if (n == 0) return 0;
  int s = 1;
  if (n < 0) {
    n = -n;
    s = eta.D < 0 ? -1 : 1;
  }
  return s * kronecker(eta.D, n);
}

// L_fin(1, eta) by the finite closed forms
inline double dirichlet_L1(const QuadraticCharacter& eta) {
  if (eta.trivial()) throw std::domain_error("dirichlet_L1: pole for trivial character");
  const double pi = boost::math::constants::pi<double>();
  long long f = static_cast<long long>(eta.conductor());
  double fd = static_cast<double>(f);
  if (eta.D > 0) {
    double s = 0.0;
    for (long long a = 1; a < f; ++a) {
      int c = eta_integer(eta, a);
      if (c) s += c * std::log(std::sin(pi * static_cast<double>(a) / fd));
    }
    return -s / std::sqrt(fd);
  }
  double s = 0.0;
  for (long long a = 1; a < f; ++a) s += static_cast<double>(a * eta_integer(eta, a));
  return -pi * s / (fd * std::sqrt(fd));
}

// second path: L(1,chi) = -(1/f) sum chi(a) psi(a/f)
inline double dirichlet_L1_digamma(const QuadraticCharacter& eta) {
  if (eta.trivial()) throw std::domain_error("dirichlet_L1_digamma: pole for trivial character");
  long long f = static_cast<long long>(eta.conductor());
  double s = 0.0;
  for (long long a = 1; a < f; ++a) {
    int c = eta_integer(eta, a);
    if (c) s += c * boost::math::digamma(static_cast<double>(a) / static_cast<double>(f));
  }
  return -s / static_cast<double>(f);
}

struct LaurentConstants {
  double R;
  double C0;
};

// completed zeta pi^{-s/2} Gamma(s/2) zeta(s) = R/(s-1) + C0 + O(s-1)
inline LaurentConstants laurent_zeta_constants() {
  const double gamma = boost::math::constants::euler<double>();
  const double pi = boost::math::constants::pi<double>();
  double c0 = gamma + 0.5 * (boost::math::digamma(0.5) - std::log(pi));
  return {1.0, c0};
}

inline BigInt index_K0(const IdealQ& n) {
  BigInt r = n.n;
  for (auto& [p, k] : n.fac) r = r / p * (p + 1);
  return r;
}

inline Rational nu_factor(const IdealQ& n) {
  Rational r = 1;
  for (auto& [p, k] : n.fac) {
    Rational q = p;
    if (k >= 3) r *= (1 - 1 / (q * q));
    else if (k == 2) r *= (1 - 1 / (q * q - q));
  }
  return r;
}

struct LocalOrders {
  std::uint64_t p;
  int ord_b;
  int ord_b1;
};

struct BCandidate {
  Rational b;
  std::vector<LocalOrders> orders;  // primes where b or b+1 is not a unit, plus mandated places

  const LocalOrders* at(std::uint64_t p) const {
    for (auto& o : orders)
      if (o.p == p) return &o;
    return nullptr;
  }
};

struct SPlace {
  std::uint64_t p;
  int m;  // maximal Hecke degree at p
};

inline std::vector<std::uint64_t> numerator_primes(const Rational& x) {
  std::vector<std::uint64_t> out;
  for (auto& [p, k] : factor(boost::multiprecision::numerator(x)))
    out.push_back(static_cast<std::uint64_t>(p));
  return out;
}

inline BCandidate make_candidate(const Rational& b, const std::vector<std::uint64_t>& mandated) {
  BCandidate c{b, {}};
  std::vector<std::uint64_t> ps = mandated;
  for (auto p : numerator_primes(b)) ps.push_back(p);
  for (auto p : numerator_primes(b + 1)) ps.push_back(p);
  for (auto p : prime_divisors(static_cast<std::uint64_t>(boost::multiprecision::denominator(b))))
    ps.push_back(p);
  std::sort(ps.begin(), ps.end());
  ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
  for (auto p : ps) c.orders.push_back({p, ord_p(b, p), ord_p(Rational(b + 1), p)});
  return c;
}

// Common denominator allowed by the local supports
inline std::uint64_t b_denominator(const QuadraticCharacter& eta, const std::vector<SPlace>& S) {
  std::uint64_t d = 1;
  if (!eta.trivial())
    for (auto p : prime_divisors(eta.conductor())) d *= ipow(p, eta.conductor_exponent(p));
  for (auto& v : S) d *= ipow(v.p, v.m);
  return d;
}

inline void check_configuration(const IdealQ& n, const QuadraticCharacter& eta, const std::vector<SPlace>& S) {
  std::uint64_t f = eta.conductor();
  for (auto& [p, k] : n.fac)
    if (f % p == 0) throw std::invalid_argument("level not prime to the conductor");
  for (auto& v : S) {
    if (!is_prime(v.p)) throw std::invalid_argument("S contains a non-prime");
    if (n.n % v.p == 0 || f % v.p == 0) throw std::invalid_argument("S meets S(nf)");
    if (v.m < 0) throw std::invalid_argument("negative Hecke degree");
  }
  for (std::size_t i = 0; i < S.size(); ++i)
    for (std::size_t j = i + 1; j < S.size(); ++j)
      if (S[i].p == S[j].p) throw std::invalid_argument("repeated place in S");
}

inline std::vector<std::uint64_t> mandated_primes(const IdealQ& n, const QuadraticCharacter& eta,
                                                  const std::vector<SPlace>& S) {
  std::vector<std::uint64_t> ps = n.support();
  if (!eta.trivial())
    for (auto p : prime_divisors(eta.conductor())) ps.push_back(p);
  for (auto& v : S) ps.push_back(v.p);
  std::sort(ps.begin(), ps.end());
  return ps;
}

// All b != 0,-1 with |b| <= B passing every local support condition.
// Sorted by |b|, negative before positive.
inline std::vector<BCandidate> enumerate_b(const IdealQ& n, const QuadraticCharacter& eta,
                                           const std::vector<SPlace>& S, const Rational& B) {
  if (B <= 0) throw std::invalid_argument("enumerate_b: bound must be positive");
  check_configuration(n, eta, S);
  std::uint64_t d = b_denominator(eta, S);
  auto mandated = mandated_primes(n, eta, S);
  // b = a/d with n | a
  BigInt amax = BigInt(boost::multiprecision::numerator(B * d) / boost::multiprecision::denominator(B * d));
  std::vector<BCandidate> out;
  for (BigInt a = n.n; a <= amax; a += n.n) {
    for (int sgn : {-1, 1}) {
      Rational b = Rational(BigInt(sgn) * a, BigInt(d));
      if (b == -1) continue;
      out.push_back(make_candidate(b, mandated));
    }
  }
  return out;
}

// Independent per-candidate support check (used by the oracle tests)
inline bool passes_support(const Rational& b, const IdealQ& n, const QuadraticCharacter& eta,
                           const std::vector<SPlace>& S) {
  if (b == 0 || b == -1) return false;
  for (auto p : prime_divisors(static_cast<std::uint64_t>(boost::multiprecision::denominator(b)))) {
    int o = ord_p(b, p);
    bool ok = false;
    if (!eta.trivial() && eta.conductor() % p == 0) ok = o >= -eta.conductor_exponent(p);
    for (auto& v : S)
      if (v.p == p) ok = o >= -v.m;
    if (!ok) return false;
  }
  for (auto& [p, k] : n.fac)
    if (ord_p(b, p) < k) return false;
  return true;
}

}  // namespace rtf
