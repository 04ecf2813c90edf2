#pragma once

#include "rtf/quadrature.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/hypergeometric_pFq.hpp>

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace rtf {

using cplx = std::complex<double>;

inline constexpr double kPi = boost::math::constants::pi<double>();

inline void require_even_weight(int l, int min_l = 2) {
  if (l % 2 != 0) throw std::invalid_argument("weight must be even");
  if (l < min_l) throw std::invalid_argument("weight too small");
}

// Principal logarithm with arg in (-pi, pi]
inline cplx log_principal(cplx w) {
  if (w == cplx(0.0, 0.0)) throw std::domain_error("log of zero");
  double arg = std::atan2(w.imag(), w.real());
  if (arg <= -kPi) arg += 2 * kPi;
  if (arg == -kPi) arg = kPi;
  if (w.imag() == 0.0 && w.real() < 0.0) arg = kPi;  // -0.0 imaginary part
  return {std::log(std::abs(w)), arg};
}

inline cplx pow_principal(cplx w, cplx z) {
  if (z == cplx(0.0, 0.0)) return 1.0;
  return std::exp(z * log_principal(w));
}

// Psi^{(z)}(l; a_r) = 2^{-l/2} (-y)^{(2z-l)/4} (1-y)^{l/2}
inline cplx shintani_cartan(int l, cplx z, double r) {
  require_even_weight(l);
  double e = std::exp(2 * r);
  cplx y = (cplx(e, -1.0) / cplx(e, 1.0));
  y = y * y;
  cplx v = pow_principal(-y, (2.0 * z - static_cast<double>(l)) / 4.0);
  cplx w = std::pow(1.0 - y, l / 2);
  return std::pow(2.0, -l / 2.0) * v * w;
}

// Same function through y = (tanh 2r - i/cosh 2r)^2 and an explicit argument
inline cplx shintani_cartan_alt(int l, cplx z, double r) {
  require_even_weight(l);
  double ch = std::cosh(2 * r), th = std::tanh(2 * r);
  double re_my = -(1.0 - 2.0 / (ch * ch));
  double im_my = 2.0 * th / ch;
  double theta = std::atan2(im_my, re_my);
  if (theta == -kPi) theta = kPi;
  cplx expo = (2.0 * z - static_cast<double>(l)) / 4.0;
  cplx v = std::exp(expo * cplx(0.0, theta));  // |-y| = 1
  cplx one_minus_y(2.0 / (ch * ch), 2.0 * th / ch);
  cplx w = 1.0;
  for (int i = 0; i < l / 2; ++i) w *= one_minus_y;
  return std::pow(2.0, -l / 2.0) * v * w;
}

// (1 + i x)^{z - l/2}
inline cplx shintani_unipotent(int l, cplx z, double x) {
  return pow_principal(cplx(1.0, x), z - static_cast<double>(l) / 2.0);
}

// Evaluate Psi^{(z)}(l; g) on any real g with det g != 0 via g = diag(t1,t2) a_r k_theta.
inline cplx shintani_general(int l, cplx z, const std::array<double, 4>& g) {
  double a = g[0], b = g[1], c = g[2], d = g[3];
  double det = a * d - b * c;
  if (det == 0.0) throw std::domain_error("singular matrix");
  double m11 = a * a + b * b, m22 = c * c + d * d, m12 = a * c + b * d;
  // m11 = t1^2 ch, m22 = t2^2 ch, m12 = t1 t2 sh, with ch^2 - sh^2 = 1
  double ch = std::sqrt(m11 * m22) / std::abs(det);
  double t1 = std::sqrt(m11 / ch);
  double t2 = std::copysign(std::sqrt(m22 / ch), det);
  double sh = m12 / (t1 * t2);
  double r = 0.5 * std::asinh(sh);
  double chr = std::cosh(r), shr = std::sinh(r);
  // k = a_r^{-1} diag(1/t1, 1/t2) g
  double u11 = a / t1, u12 = b / t1, u21 = c / t2, u22 = d / t2;
  double k11 = chr * u11 - shr * u21;
  double k21 = -shr * u11 + chr * u21;
  (void)u12;
  (void)u22;
  double theta = std::atan2(k21, k11);
  cplx pref = std::exp(z * std::log(std::abs(t1 / t2)));
  return pref * std::exp(cplx(0.0, l * theta)) * shintani_cartan(l, z, r);
}

inline double legendre_P(int n, double x) {
  if (n < 0) throw std::domain_error("legendre_P: negative degree");
  if (n == 0) return 1.0;
  double p0 = 1.0, p1 = x;
  for (int k = 1; k < n; ++k) {
    double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

inline double gauss_2F1(double a, double b, double c, double x) {
  if (!(x >= 0.0 && x < 1.0)) throw std::domain_error("gauss_2F1: argument outside [0,1)");
  if (x == 0.0) return 1.0;
  return boost::math::hypergeometric_pFq({a, b}, {c}, x);
}

// Legendre function of the second kind Q_n(x), x > 1
inline double legendre_Q(int n, double x) {
  if (n < 0) throw std::domain_error("legendre_Q: negative degree");
  if (!(x > 1.0)) throw std::domain_error("legendre_Q: requires x > 1");
  if (x < 1.5) {
    // Q_n = P_n Q_0 - W_{n-1}
    double q0 = 0.5 * std::log((x + 1.0) / (x - 1.0));
    double w = 0.0;
    for (int k = 1; k <= n; ++k) w += legendre_P(k - 1, x) * legendre_P(n - k, x) / k;
    return legendre_P(n, x) * q0 - w;
  }
  // hypergeometric series in 1/x^2
  double z = 1.0 / (x * x);
  double a = (n + 1) / 2.0, b = (n + 2) / 2.0, c = n + 1.5;
  double term = 1.0, sum = 1.0;
  for (int k = 0; k < 10000; ++k) {
    term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  double lpref = 0.5 * std::log(kPi) + std::lgamma(n + 1.0) - std::lgamma(n + 1.5) -
                 (n + 1.0) * std::log(2.0 * x);
  return std::exp(lpref) * sum;
}

// C_l(z) by quadrature (u = 1/v on (0,1])
inline cplx c_l(cplx z, int l, double tol = 1e-13) {
  require_even_weight(l, 4);
  auto f = [&](double v) {
    cplx q = cplx(1.0, -v) / cplx(1.0, v);
    cplx w1 = -(q * q);
    cplx w2 = -(1.0 / (q * q));
    double weight = std::pow(v, l - 2) * std::pow(1.0 + v * v, 1 - l);
    return (pow_principal(w1, z) + pow_principal(w2, z)) * weight;
  };
  auto r = integrate_complex(f, 0.0, 1.0, tol, 25);
  if (!std::isfinite(r.value.real()) || r.error > 1e-8) throw std::runtime_error("c_l: quadrature did not converge");
  return r.value;
}

// C_l(0) = 2^{3-2l} pi Gamma(l-1) / Gamma(l/2)^2
inline double c_l_zero(int l) {
  require_even_weight(l, 4);
  return std::exp((3.0 - 2.0 * l) * std::log(2.0) + std::log(kPi) + std::lgamma(l - 1.0) -
                  2.0 * std::lgamma(l / 2.0));
}

// C_l(0) = Gamma((l-1)/2)^2 / (2 Gamma(l-1))
inline double c_l_zero_beta(int l) {
  require_even_weight(l, 4);
  return 0.5 * std::exp(2.0 * std::lgamma((l - 1) / 2.0) - std::lgamma(l - 1.0));
}

// 2 int_R Psi^{(z)}(a_r) conj(Psi^{(-conj z)}(a_r)) cosh(2r) dr
inline cplx shintani_inner_product(int l, cplx z) {
  auto f = [&](double r) {
    return shintani_cartan(l, z, r) * std::conj(shintani_cartan(l, -std::conj(z), r)) * std::cosh(2 * r);
  };
  double R = 40.0 / (l - 2.0);
  auto res = integrate_complex(f, -R, R, 1e-13, 25, linspace_breaks(-R, R, 16));
  return 2.0 * res.value;
}

// Archimedean orbital integral J^1(l;b)
inline double j_arch_even(int l, double b) {
  require_even_weight(l, 4);
  if (b == 0.0 || b == -1.0) throw std::domain_error("j_arch_even: b in {0,-1}");
  int n = l / 2 - 1;
  if (b > 0.0) return 4.0 * legendre_Q(n, 2.0 * b + 1.0);
  if (b < -1.0) {
    double s = ((l / 2) % 2 == 0) ? 1.0 : -1.0;
    return s * 4.0 * legendre_Q(n, -2.0 * b - 1.0);
  }
  double x = 2.0 * b + 1.0;
  double v = 2.0 * std::log(std::abs((b + 1.0) / b)) * legendre_P(n, x);
  for (int m = 1; m <= l / 4; ++m)
    v -= 8.0 * (l - 4.0 * m + 1.0) / ((2.0 * m - 1.0) * (l - 2.0 * m)) * legendre_P(l / 2 - 2 * m, x);
  return v;
}

// hypergeometric form of J^1 for b > 0
inline double j_arch_even_2F1(int l, double b) {
  if (!(b > 0.0)) throw std::domain_error("j_arch_even_2F1: b > 0 required");
  double h = l / 2.0;
  double beta = std::exp(2.0 * std::lgamma(h) - std::lgamma(2.0 * h));
  return 2.0 * std::pow(1.0 + b, -h) * beta * gauss_2F1(h, h, 2.0 * h, 1.0 / (b + 1.0));
}

// J^sgn(l;b), purely imaginary
inline cplx j_arch_odd(int l, double b) {
  require_even_weight(l, 4);
  if (b == 0.0 || b == -1.0) throw std::domain_error("j_arch_odd: b in {0,-1}");
  if (b * (b + 1.0) > 0.0) return 0.0;
  return cplx(0.0, 2.0 * kPi * legendre_P(l / 2 - 1, 2.0 * b + 1.0));
}

// Defining integral int_{R^x} (1-it)^{-l/2} (1+b+bi/t)^{-l/2} sgn(t)^eps d^x t
inline cplx j_arch_oracle(int l, int eps, double b, double tol = 1e-12) {
  require_even_weight(l, 4);
  int h = l / 2;
  auto half = [&](double sign) {
    auto f = [&](double u) {
      double t = sign * std::exp(u);
      cplx w = cplx(1.0, -t) * cplx(1.0 + b, b / t);
      return std::pow(w, -h);
    };
    double c = 0.5 * std::log(std::abs(b / (1.0 + b)));
    double span = 2.0 + 45.0 / h;
    return integrate_complex(f, c - span, c + span, tol, 25, linspace_breaks(c - span, c + span, 24));
  };
  auto pos = half(1.0);
  auto neg = half(-1.0);
  cplx v = pos.value + (eps ? -1.0 : 1.0) * neg.value;
  if (pos.error + neg.error > 1e-7) throw std::runtime_error("j_arch_oracle: quadrature did not converge");
  return v;
}

// M_l = 2 B(l/2,l/2) 2F1(l/2,l/2;l;1/2): |J^1(l;b)| <= M_l (1+b)^{-l/2} for b >= 1
inline double arch_majorant_constant(int l) {
  double h = l / 2.0;
  double beta = std::exp(2.0 * std::lgamma(h) - std::lgamma(2.0 * h));
  return 2.0 * beta * gauss_2F1(h, h, 2.0 * h, 0.5);
}

// Bound for sum over b in (1/d)Z, |b| >= B, of |J^1(l;b)| (1+|b|)^w
inline double arch_tail_bound(int l, double B, long long d = 1, int w = 0) {
  require_even_weight(l, 4);
  if (B < 1.0) throw std::domain_error("arch_tail_bound: B >= 1 required");
  double e = l / 2.0 - w - 1.0;
  if (e <= 0.0) throw std::domain_error("arch_tail_bound: weight too small for the requested moment");
  double M = arch_majorant_constant(l);
  double dd = static_cast<double>(d);
  double pos = M * (std::pow(1.0 + B, w - l / 2.0) + dd * std::pow(1.0 + B, -e) / e);
  double B2 = std::max(B, 2.0);
  double neg = M * std::pow(1.5, w) * (std::pow(B2, w - l / 2.0) + dd * std::pow(B2, -e) / e);
  double extra = 0.0;
  if (B < 2.0) {
    // lattice points in (-2, -B], excluding -1
    long long lo = static_cast<long long>(std::ceil(B * dd));
    for (long long k = lo; k < 2 * d; ++k) {
      if (k == d) continue;
      double b = -static_cast<double>(k) / dd;
      extra += std::abs(j_arch_even(l, b)) * std::pow(1.0 - b, w);
    }
  }
  return pos + neg + extra;
}

// Lanczos approximation (g = 7) for complex arguments
inline cplx complex_gamma(cplx s) {
  static const double coef[9] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                 771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                 -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  if (s.real() < 0.5) return kPi / (std::sin(kPi * s) * complex_gamma(1.0 - s));
  cplx t = s - 1.0;
  cplx x = coef[0];
  for (int i = 1; i < 9; ++i) x += coef[i] / (t + static_cast<double>(i));
  cplx u = t + 7.5;
  return std::sqrt(2 * kPi) * std::pow(u, t + 0.5) * std::exp(-u) * x;
}

// Closed form of the orbital integral of Psi^{(0)} against |x|^z sgn^eps
inline cplx shintani_orbital(int l, cplx z, int eps, int eps_prime, bool lower = false) {
  require_even_weight(l);
  if (!(z.real() > 0.0 && z.real() < l / 2.0)) throw std::domain_error("shintani_orbital: z outside the strip");
  cplx il = std::pow(cplx(0.0, 1.0), l * eps_prime);
  cplx ie = std::pow(cplx(0.0, lower ? -1.0 : 1.0), eps);
  cplx g = 2.0 * il * complex_gamma(z) * complex_gamma(l / 2.0 - z) / std::tgamma(l / 2.0);
  return g * ie * std::cos(kPi / 2.0 * (z + static_cast<double>(eps)));
}

// Quadrature of the defining integral over R^x (upper or lower unipotent, optional w0)
inline cplx shintani_orbital_oracle(int l, cplx z, int eps, int eps_prime, bool lower = false) {
  auto psi = [&](double x) {
    std::array<double, 4> g = lower ? std::array<double, 4>{1.0, 0.0, x, 1.0} : std::array<double, 4>{1.0, x, 0.0, 1.0};
    if (eps_prime) g = {g[1], -g[0], g[3], -g[2]};  // g w0 with w0 = [[0,-1],[1,0]]
    return shintani_general(l, 0.0, g);
  };
  auto half = [&](double sign) {
    auto f = [&](double u) {
      double x = sign * std::exp(u);
      return psi(x) * std::exp(z * u);
    };
    // integrand ~ e^{Re z u} at -inf and e^{(Re z - l/2) u} at +inf
    double lo = -38.0 / z.real(), hi = 38.0 / (l / 2.0 - z.real());
    return integrate_complex(f, lo, hi, 1e-12, 18, linspace_breaks(lo, hi, 32), 1e-13).value;
  };
  return half(1.0) + (eps ? -1.0 : 1.0) * half(-1.0);
}

}  // namespace rtf
