#pragma once

#include "rtf/field_core.hpp"
#include "rtf/local_value.hpp"
#include "rtf/quadrature.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

namespace rtf {

struct LocalCharacter {
  std::uint64_t q = 2;
  int unramified_value = 1;  // eta(varpi) when unramified
  bool ramified = false;
  int f = 0;                  // conductor exponent
  int uniformizer_value = 1;  // eta(varpi) when ramified
  std::map<std::uint64_t, int> unit_values;  // (Z/p^f)^x -> +-1

  static LocalCharacter unramified(std::uint64_t q, int e) {
    if (e != 1 && e != -1) throw std::invalid_argument("unramified value must be +-1");
    LocalCharacter c;
    c.q = q;
    c.unramified_value = e;
    return c;
  }

  static LocalCharacter at(const QuadraticCharacter& eta, std::uint64_t p) {
    LocalCharacter c;
    c.q = p;
    int fe = eta.trivial() ? 0 : eta.conductor_exponent(p);
    if (fe == 0) {
      c.unramified_value = eta_local(eta, p);
      return c;
    }
    c.ramified = true;
    c.f = fe;
    c.unramified_value = 0;
    c.uniformizer_value = eta_ramified_uniformizer(eta, p);
    std::uint64_t pf = ipow(p, fe);
    for (std::uint64_t u = 1; u < pf; ++u)
      if (u % p) c.unit_values[u] = eta_ramified_unit(eta, p, u);
    return c;
  }

  std::uint64_t modulus() const { return ramified ? ipow(q, f) : 1; }

  int value_on_unit(std::uint64_t u) const {
    if (!ramified) return 1;
    return unit_values.at(u % modulus());
  }

  int value(const Rational& x) const {
    int o = ord_p(x, q);
    int base = ramified ? uniformizer_value : unramified_value;
    int s = (o % 2 == 0) ? 1 : base;
    if (!ramified) return s;
    return s * unit_values.at(unit_residue(x, q, modulus()));
  }
};

struct LocalBSpec {
  int ord_b = 0;
  int ord_b1 = 0;

  static LocalBSpec of(const Rational& b, std::uint64_t p) {
    if (b == 0 || b == -1) throw std::domain_error("LocalBSpec: b in {0,-1}");
    return {ord_p(b, p), ord_p(Rational(b + 1), p)};
  }
};

// Green function on N_v: -q^{-(s+1)/2}(1-q^{-(s-2z+1)/2})^{-1}(1-q^{-(s+2z+1)/2})^{-1} q^{-l(s-2z+1)/2}
inline std::complex<double> green_unipotent(std::uint64_t q, std::complex<double> z, std::complex<double> s, int ell) {
  if (!(s.real() > std::abs(2.0 * z.real() - 1.0))) throw std::domain_error("green_unipotent: outside the convergence range");
  double lq = std::log(static_cast<double>(q));
  auto qp = [&](std::complex<double> e) { return std::exp(e * lq); };
  return -qp(-(s + 1.0) / 2.0) / (1.0 - qp(-(s - 2.0 * z + 1.0) / 2.0)) / (1.0 - qp(-(s + 2.0 * z + 1.0) / 2.0)) *
         qp(-static_cast<double>(ell) * (s - 2.0 * z + 1.0) / 2.0);
}

// Inverse spherical transform of alpha^{(m)} on n(x) with sup(1,|x|) = q^ell
inline LocalValue phi_hat(std::uint64_t q, int m, int ell) {
  if (m < 0 || ell < 0) throw std::domain_error("phi_hat: negative index");
  if (m == 0) return LocalValue::rational(q, ell == 0 ? -2 : 0);
  if (ell >= m + 1) return LocalValue::rational(q, 0);
  if (ell == m) return -LocalValue::half_power(q, -m);
  return Rational(m - ell - 1) * LocalValue::half_power(q, 2 - m) -
         Rational(m - ell + 1) * LocalValue::half_power(q, -m);
}

inline int eta_unramified_of_order(int e, int ord) { return (ord % 2 == 0) ? 1 : e; }

// delta_n^eta with the sign eta(varpi^n) eta(b); eta on units is 1
inline LocalValue delta_n_eta(std::uint64_t q, const LocalCharacter& chi, int n, int ord_b) {
  if (chi.ramified) throw std::invalid_argument("delta_n_eta: unramified character required");
  if (n < 0) throw std::domain_error("delta_n_eta: negative index");
  if (ord_b < -n) return LocalValue::rational(q, 0);
  int e = chi.unramified_value;
  if (n == 0) {
    if (e == 1) return LocalValue::rational(q, ord_b + 1);
    return LocalValue::rational(q, Rational(eta_unramified_of_order(e, ord_b) + 1, 2));
  }
  return LocalValue::rational(q, eta_unramified_of_order(e, n + ord_b));
}

inline LocalValue i_plus(std::uint64_t q, const LocalCharacter& chi, int m, int ord_b) {
  LocalValue s = -LocalValue::half_power(q, -m) * delta_n_eta(q, chi, m, ord_b);
  for (int l = std::max(0, -ord_b); l <= m - 1; ++l) s += phi_hat(q, m, l) * delta_n_eta(q, chi, l, ord_b);
  if (m == 0) {
    // only the l = 0 term with Phi-hat_0 = -2
    return LocalValue::rational(q, -2) * delta_n_eta(q, chi, 0, ord_b);
  }
  return s;
}

// J_v^eta(b; alpha^{(m)}) for v in S
inline LocalValue j_local_spherical(std::uint64_t q, const LocalCharacter& chi, int m, const LocalBSpec& b) {
  if (b.ord_b >= kOrdInfinity / 2 || b.ord_b1 >= kOrdInfinity / 2) throw std::domain_error("j_local_spherical: b in {0,-1}");
  int e = chi.unramified_value;
  return i_plus(q, chi, m, b.ord_b) + Rational(e) * i_plus(q, chi, m, b.ord_b1 - 1);
}

inline LocalValue lambda_exact(std::uint64_t q, const LocalCharacter& chi, const LocalBSpec& b) {
  if (b.ord_b < 0) return LocalValue::rational(q, 0);
  if (b.ord_b > 0) return delta_n_eta(q, chi, 0, b.ord_b);
  if (b.ord_b1 > 0) return delta_n_eta(q, chi, 0, b.ord_b1);
  return LocalValue::rational(q, 1);
}

inline int lambda_majorant(const LocalBSpec& b) {
  if (b.ord_b < 0) return 0;
  return b.ord_b + b.ord_b1 + 1;
}

inline LocalValue j_local_unramified(std::uint64_t q, const LocalCharacter& chi, const LocalBSpec& b) {
  return lambda_exact(q, chi, b);
}

// level places: k = ord_v(n) >= 1
inline LocalValue j_local_level(std::uint64_t q, const LocalCharacter& chi, int k, const LocalBSpec& b) {
  if (chi.ramified) throw std::invalid_argument("j_local_level: unramified character required");
  if (b.ord_b < k) return LocalValue::rational(q, 0);
  if (chi.unramified_value == 1) return LocalValue::rational(q, b.ord_b - k + 1);
  int eb = eta_unramified_of_order(-1, b.ord_b);
  int ek = (k % 2 == 0) ? 1 : -1;
  return LocalValue::rational(q, Rational(eb + ek, 2));
}

// ramified places: delta(ord b >= -f){eta(-1) + delta(ord b > -f) eta(-b(b+1))} q^{-f}(1-q^{-1})^{-1}
inline Rational j_local_ramified(const LocalCharacter& chi, const Rational& b) {
  if (!chi.ramified) throw std::invalid_argument("j_local_ramified: ramified character required");
  if (b == 0 || b == -1) throw std::domain_error("j_local_ramified: b in {0,-1}");
  int o = ord_p(b, chi.q);
  if (o < -chi.f) return 0;
  Rational qq = chi.q;
  int s = chi.value(Rational(-1));
  if (o > -chi.f) s += chi.value(Rational(-b * (b + 1)));
  return Rational(s) * rpow(qq, -chi.f) / (1 - 1 / qq);
}

// U_v^eta(alpha^{(m)})
inline LocalValue u_local(std::uint64_t q, int e, int m) {
  if (m < 0) throw std::domain_error("u_local: negative degree");
  if (m == 0) return LocalValue::rational(q, -2);
  Rational qi = Rational(1) / Rational(q);
  if (e == 1) return (Rational(m - 1) - Rational(m + 1) * qi) * LocalValue::half_power(q, 2 - m);
  if (e == -1) {
    if (m % 2) return LocalValue::rational(q, 0);
    return (1 - qi) * LocalValue::half_power(q, 2 - m);
  }
  throw std::invalid_argument("u_local: eta(varpi) must be +-1");
}

// U'_v(alpha^{(m)}) = log q * (returned value)
inline LocalValue u_prime_local(std::uint64_t q, int m) {
  if (m < 0) throw std::domain_error("u_prime_local: negative degree");
  if (m == 0) return LocalValue::rational(q, 0);
  Rational qi = Rational(1) / Rational(q);
  return Rational(-1, 2) * (Rational((m - 1) * (m - 2)) - Rational(m * (m + 1)) * qi) * LocalValue::half_power(q, 2 - m);
}

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

// Contour integral (1/2 pi i) int_{L(c)} F(s) dmu(s), dmu = (1/2) log q (q^{(1+s)/2} - q^{(1-s)/2}) ds
template <class F>
double spherical_contour(std::uint64_t q, double c, F&& integrand) {
  double lq = std::log(static_cast<double>(q));
  double Y = 2.0 * std::numbers::pi / lq;
  auto f = [&](double y) {
    std::complex<double> s(c, y);
    std::complex<double> dmu = 0.5 * lq * (std::exp((1.0 + s) / 2.0 * lq) - std::exp((1.0 - s) / 2.0 * lq));
    return std::real(integrand(s) * dmu);
  };
  return integrate(f, -Y, Y, 1e-14, 30, linspace_breaks(-Y, Y, 8)).value / (2.0 * std::numbers::pi);
}

inline std::complex<double> alpha_m_of_s(std::uint64_t q, int m, std::complex<double> s) {
  double lq = std::log(static_cast<double>(q));
  return std::exp(static_cast<double>(m) * s / 2.0 * lq) + std::exp(-static_cast<double>(m) * s / 2.0 * lq);
}

inline double phi_hat_contour(std::uint64_t q, int m, int ell, double c = 1.5) {
  return spherical_contour(q, c, [&](std::complex<double> s) {
    return green_unipotent(q, 0.0, s, ell) * alpha_m_of_s(q, m, s);
  });
}

inline double u_local_contour(std::uint64_t q, int e, int m, double c = 1.5) {
  double lq = std::log(static_cast<double>(q));
  return spherical_contour(q, c, [&](std::complex<double> s) {
    std::complex<double> a = std::exp((s + 1.0) / 2.0 * lq);
    return 1.0 / (1.0 - static_cast<double>(e) / a) / (1.0 - a) * alpha_m_of_s(q, m, s);
  });
}

// coefficient of log q
inline double u_prime_contour(std::uint64_t q, int m, double c = 1.5) {
  double lq = std::log(static_cast<double>(q));
  return spherical_contour(q, c, [&](std::complex<double> s) {
    std::complex<double> a = std::exp((s + 1.0) / 2.0 * lq);
    return 1.0 / ((1.0 - a) * (1.0 - a)) / (1.0 - 1.0 / a) * alpha_m_of_s(q, m, s);
  });
}

// What the local test function is at the place
struct LocalKernel {
  enum class Kind { spherical_m, unit_ball, level } kind = Kind::unit_ball;
  int m = 0;  // Hecke degree (spherical_m)
  int k = 0;  // level exponent (level)
};

namespace detail {

struct EntryOrd {
  bool exact;
  int value;  // exact ord, or a lower bound
};

inline EntryOrd linear_entry_ord(const Rational& alpha, const Rational& beta, const Rational& t0, int radius_ord,
                                 std::uint64_t p) {
  // entry = alpha t + beta on the disk t0 + p^{radius_ord} O
  int bound = (alpha == 0) ? kOrdInfinity : ord_p(alpha, p) + radius_ord;
  Rational c = alpha * t0 + beta;
  int oc = ord_p(c, p);
  if (oc < bound) return {true, oc};
  return {false, bound};
}

inline std::optional<int> row_min(EntryOrd x, EntryOrd y) {
  if (x.exact && y.exact) return std::min(x.value, y.value);
  if (x.exact && y.value >= x.value) return x.value;
  if (y.exact && x.value >= y.value) return y.value;
  return std::nullopt;
}

}  // namespace detail

// Orbital integral of the local kernel along delta_b diag(t,1) n(x_eta), weighted by eta(t x_eta),
// evaluated exactly by refining residue disks of t until every quantity is constant on the disk.
inline LocalValue j_local_oracle(const LocalCharacter& chi, const LocalKernel& ker, const Rational& b, int shell_bound = -1) {
  if (b == 0 || b == -1) throw std::domain_error("j_local_oracle: b in {0,-1}");
  const std::uint64_t p = chi.q;
  const int f = chi.ramified ? chi.f : 0;
  const Rational P = p;
  const Rational x = rpow(P, -f);
  const Rational c1 = 1 + 1 / b;
  const int ob = ord_p(b, p);
  const int ob1 = ord_p(Rational(b + 1), p);
  const int det_shift = -ob;  // ord det = j - ord b
  const int kk = (ker.kind == LocalKernel::Kind::level) ? ker.k : 0;
  if (shell_bound < 0) shell_bound = std::abs(ob) + std::abs(ob1) + 2 * f + kk + (ker.m) + 6;
  const Rational unit_measure = Rational(p) / Rational(p - 1);  // q^{-r}(1-1/q)^{-1} times q^r

  LocalValue total = LocalValue::rational(p, 0);
  bool boundary_hit = false;

  // disk: t = p^j (u0 + p^r O), u0 a unit mod p^r
  struct Disk {
    BigInt u0;
    int r;
  };
  for (int j = -shell_bound; j <= shell_bound; ++j) {
    LocalValue shell = LocalValue::rational(p, 0);
    std::vector<Disk> stack;
    for (std::uint64_t u = 1; u < p; ++u) stack.push_back({BigInt(u), 1});
    while (!stack.empty()) {
      Disk d = stack.back();
      stack.pop_back();
      Rational t0 = rpow(P, j) * Rational(d.u0);
      int rad = j + d.r;
      auto e0 = detail::linear_entry_ord(c1, 0, t0, rad, p);
      auto e1 = detail::linear_entry_ord(c1 * x, 1, t0, rad, p);
      auto e2 = detail::linear_entry_ord(1, 0, t0, rad, p);
      auto e3 = detail::linear_entry_ord(x, 1, t0, rad, p);
      auto m1 = detail::row_min(e0, e1);
      detail::EntryOrd e2k{e2.exact, e2.value - kk};
      auto m2 = detail::row_min(e2k, e3);
      bool unit_known = !chi.ramified || d.r >= f;
      if (!m1 || !m2 || !unit_known) {
        for (std::uint64_t c = 0; c < p; ++c) stack.push_back({d.u0 + BigInt(c) * BigInt(ipow(p, d.r)), d.r + 1});
        continue;
      }
      int det = j + det_shift;
      int ell = det - *m1 - *m2;
      LocalValue val;
      switch (ker.kind) {
        case LocalKernel::Kind::spherical_m:
          val = ell >= 0 ? phi_hat(p, ker.m, ell) : LocalValue::rational(p, 0);
          break;
        case LocalKernel::Kind::unit_ball:
        case LocalKernel::Kind::level:
          val = LocalValue::rational(p, ell == 0 ? 1 : 0);
          break;
      }
      if (val.is_zero()) continue;
      // eta(t x_eta), t x_eta = p^{j-f} u0
      int w;
      if (chi.ramified) {
        std::uint64_t ur = static_cast<std::uint64_t>(d.u0 % BigInt(chi.modulus()));
        w = (((j - f) % 2 == 0) ? 1 : chi.uniformizer_value) * chi.value_on_unit(ur);
      } else {
        w = eta_unramified_of_order(chi.unramified_value, j);
      }
      Rational meas = unit_measure * rpow(P, -d.r);
      shell += (Rational(w) * meas) * val;
    }
    if (!shell.is_zero() && (j == -shell_bound || j == shell_bound)) boundary_hit = true;
    total += shell;
  }
  if (boundary_hit) throw std::runtime_error("j_local_oracle: shell bound too small");
  return total;
}

}  // namespace rtf
