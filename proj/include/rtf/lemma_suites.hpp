#pragma once

#include "rtf/arch_special.hpp"
#include "rtf/equidist.hpp"
#include "rtf/field_core.hpp"
#include "rtf/padic_local.hpp"
#include "rtf/spectral.hpp"

#include <chrono>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace rtf {

// One closed-form-vs-oracle comparison
struct LemmaRow {
  std::string lemma;
  std::string kase;
  double closed_form = 0.0;
  double oracle = 0.0;
  double abs_err = 0.0;
  double tol = 0.0;
  bool exact = false;  // compared in exact arithmetic; tol does not apply
  bool pass = false;
};

struct SuiteResult {
  std::string name;
  std::vector<LemmaRow> rows;
  double seconds = 0.0;

  bool passed() const {
    for (auto& r : rows)
      if (!r.pass) return false;
    return !rows.empty();
  }
  std::size_t failures() const {
    std::size_t n = 0;
    for (auto& r : rows) n += !r.pass;
    return n;
  }
};

struct SuiteOptions {
  std::optional<double> tol;  // overrides every numeric tolerance
};

namespace detail {

inline void add_numeric(SuiteResult& s, const SuiteOptions& o, std::string lemma, std::string kase, double cf,
                        double oracle, double tol) {
  LemmaRow r{std::move(lemma), std::move(kase), cf, oracle, std::abs(cf - oracle), o.tol.value_or(tol), false, false};
  r.pass = std::isfinite(r.abs_err) && r.abs_err <= r.tol;
  s.rows.push_back(std::move(r));
}

inline void add_exact(SuiteResult& s, std::string lemma, std::string kase, const LocalValue& cf, const LocalValue& oracle) {
  double a = cf.to_double(), b = oracle.to_double();
  LemmaRow r{std::move(lemma), std::move(kase), a, b, std::abs(a - b), 0.0, true, cf == oracle};
  s.rows.push_back(std::move(r));
}

inline std::string fmt_b(double b) { return format_double(b); }

}  // namespace detail

// J^1 and J^sgn against the defining integral on b in {+-k/8}, l in {4,6,8,12}
inline SuiteResult suite_arch(const SuiteOptions& o = {}) {
  SuiteResult s{"arch", {}};
  for (int l : {4, 6, 8, 12}) {
    for (int k = 1; k <= 32; ++k) {
      for (int sg : {1, -1}) {
        double b = sg * k / 8.0;
        if (b == -1.0) continue;
        std::string c = "l=" + std::to_string(l) + " b=" + detail::fmt_b(b);
        cplx even = j_arch_oracle(l, 0, b);
        detail::add_numeric(s, o, "arch_even", c, j_arch_even(l, b), even.real(), 1e-8);
        cplx odd = j_arch_oracle(l, 1, b);
        detail::add_numeric(s, o, "arch_odd", c, j_arch_odd(l, b).imag(), odd.imag(), 1e-8);
        if (b < -1.0) {
          double sgn = (l / 2) % 2 == 0 ? 1.0 : -1.0;
          detail::add_numeric(s, o, "arch_reflection", c, j_arch_even(l, b), sgn * j_arch_oracle(l, 0, -b - 1.0).real(), 1e-8);
        }
      }
    }
  }
  for (int l : {4, 8, 12})
    for (double b : {0.125, 0.5, 1.0, 3.0, 10.0})
      detail::add_numeric(s, o, "arch_2F1", "l=" + std::to_string(l) + " b=" + detail::fmt_b(b), j_arch_even_2F1(l, b),
                          j_arch_even(l, b), 1e-12);
  return s;
}

// evenness of C_l, both closed forms of C_l(0) and quadrature
inline SuiteResult suite_c_l(const SuiteOptions& o = {}) {
  SuiteResult s{"c_l", {}};
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> re(-1.5, 1.5), im(-3.0, 3.0);
  const int ls[] = {4, 6, 8, 10, 12};
  for (int i = 0; i < 50; ++i) {
    int l = ls[i % 5];
    cplx z(re(rng), im(rng));
    cplx a = c_l(z, l), b = c_l(-z, l);
    detail::add_numeric(s, o, "c_l_even", "l=" + std::to_string(l) + " z=" + format_complex(z), std::abs(a - b), 0.0, 1e-10);
  }
  for (int l : ls) {
    std::string c = "l=" + std::to_string(l);
    detail::add_numeric(s, o, "c_l_zero_forms", c, c_l_zero(l), c_l_zero_beta(l), 1e-12);
    detail::add_numeric(s, o, "c_l_zero_quadrature", c, c_l_zero(l), c_l(0.0, l).real(), 1e-9);
  }
  return s;
}

// sample b values at p covering ord(b), ord(b+1) in [-5, 5]
inline std::vector<Rational> padic_b_grid(std::uint64_t p) {
  std::vector<Rational> out;
  const Rational P = p;
  const long long units[] = {1, -1, 2, -2, 3, static_cast<long long>(p) + 2, -static_cast<long long>(p) - 3};
  for (int j = -5; j <= 5; ++j)
    for (long long u : units) {
      if (u % static_cast<long long>(p) == 0) continue;
      Rational b = rpow(P, j) * Rational(u);
      if (b != -1) out.push_back(b);
    }
  for (int j = 1; j <= 5; ++j)
    for (long long u : {1LL, 2LL, -1LL}) {
      if (u % static_cast<long long>(p) == 0) continue;
      out.push_back(Rational(-1) + rpow(P, j) * Rational(u));
    }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// exact closed forms against disk refinement of the defining orbital integral
inline SuiteResult suite_padic(const SuiteOptions& = {}) {
  SuiteResult s{"padic", {}};
  using K = LocalKernel::Kind;
  for (std::uint64_t q : {2, 3, 5}) {
    auto grid = padic_b_grid(q);
    for (int e : {1, -1}) {
      auto chi = LocalCharacter::unramified(q, e);
      for (auto& b : grid) {
        auto bs = LocalBSpec::of(b, q);
        std::string c0 = "q=" + std::to_string(q) + " eta=" + std::to_string(e) + " b=" + b.str();
        for (int m = 0; m <= 4; ++m)
          detail::add_exact(s, "spherical", c0 + " m=" + std::to_string(m), j_local_spherical(q, chi, m, bs),
                            j_local_oracle(chi, {K::spherical_m, m, 0}, b));
        detail::add_exact(s, "unramified", c0, j_local_unramified(q, chi, bs), j_local_oracle(chi, {K::unit_ball, 0, 0}, b));
        for (int k = 1; k <= 3; ++k)
          detail::add_exact(s, "level", c0 + " k=" + std::to_string(k), j_local_level(q, chi, k, bs),
                            j_local_oracle(chi, {K::level, 0, k}, b));
      }
    }
  }
  for (long long D : {-3LL, -4LL, 5LL, -7LL, 12LL, 13LL, -15LL, -20LL, 21LL}) {
    QuadraticCharacter eta{D};
    for (auto p : prime_divisors(eta.conductor())) {
      auto chi = LocalCharacter::at(eta, p);
      for (auto& b : padic_b_grid(p)) {
        std::string c = "D=" + std::to_string(D) + " p=" + std::to_string(p) + " b=" + b.str();
        detail::add_exact(s, "ramified", c, LocalValue::rational(p, j_local_ramified(chi, b)),
                          j_local_oracle(chi, {K::unit_ball, 0, 0}, b));
      }
    }
  }
  return s;
}

// residue computations redone as contour integrals
inline SuiteResult suite_contour(const SuiteOptions& o = {}) {
  SuiteResult s{"contour", {}};
  for (std::uint64_t q : {2, 3, 5}) {
    for (int m = 0; m <= 4; ++m) {
      std::string c = "q=" + std::to_string(q) + " m=" + std::to_string(m);
      for (int ell = 0; ell <= 5; ++ell)
        detail::add_numeric(s, o, "phi_hat", c + " l=" + std::to_string(ell), phi_hat(q, m, ell).to_double(),
                            phi_hat_contour(q, m, ell), 1e-10);
      for (int e : {1, -1})
        detail::add_numeric(s, o, "u_local", c + " eta=" + std::to_string(e), u_local(q, e, m).to_double(),
                            u_local_contour(q, e, m), 1e-10);
      detail::add_numeric(s, o, "u_prime", c, u_prime_local(q, m).to_double(), u_prime_contour(q, m), 1e-10);
    }
  }
  return s;
}

// u_local = -int alpha^{(m)} d mu
inline SuiteResult suite_duality(const SuiteOptions& o = {}) {
  SuiteResult s{"duality", {}};
  for (int q : {2, 3, 5, 7})
    for (int e : {1, -1}) {
      MeasureSpec spec(q, e);
      for (int m = 0; m <= 6; ++m)
        detail::add_numeric(s, o, "duality", "q=" + std::to_string(q) + " eta=" + std::to_string(e) + " m=" + std::to_string(m),
                            u_local(q, e, m).to_double(), -mu_moment(spec, m), 1e-10);
    }
  return s;
}

// masses and the two density expressions
inline SuiteResult suite_measure(const SuiteOptions& o = {}) {
  SuiteResult s{"measure", {}};
  for (int q : {2, 3, 5, 7})
    for (int e : {1, -1}) {
      MeasureSpec spec(q, e);
      std::string c = "q=" + std::to_string(q) + " eta=" + std::to_string(e);
      detail::add_numeric(s, o, "mass", c, mu_mass(spec), 1.0, 1e-10);
      double lq = std::log(static_cast<double>(q));
      for (int i = 0; i < 40; ++i) {
        double y = (i + 0.37) * (4.0 * kPi / lq) / 40.0;
        detail::add_numeric(s, o, "density_forms", c + " y=" + format_double(y), mu_density_via_L(spec, y),
                            mu_density_y(spec, y), 1e-10);
      }
    }
  detail::add_numeric(s, o, "sato_tate_mass", "q=inf", mu_integral(MeasureSpec(1e12, 1), [](double) { return 1.0; }), 1.0,
                      1e-10);
  return s;
}

// alpha_S^pi at pi's own parameters equals (#S)^2, in exact arithmetic
inline SuiteResult suite_amplifier(const SuiteOptions& = {}) {
  SuiteResult s{"amplifier", {}};
  std::mt19937_64 rng(77);
  auto primes = primes_below(40);
  for (std::size_t size = 1; size <= 10; ++size) {
    for (int trial = 0; trial < 3; ++trial) {
      std::map<std::uint64_t, Rational> x;
      for (std::size_t i = 0; i < size; ++i) {
        long long num = static_cast<long long>(rng() % 4001) - 2000;  // x in [-2,2] with denominator 1000
        x[primes[i]] = Rational(num, 1000);
      }
      auto amp = amplifier_from(x);
      Rational v = alpha_eval_at(amp, x);
      Rational want = Rational(static_cast<long long>(size * size));
      LemmaRow r{"amplifier", "#S=" + std::to_string(size) + " trial=" + std::to_string(trial), to_double(v),
                 to_double(want), std::abs(to_double(v - want)), 0.0, true, v == want};
      s.rows.push_back(r);
    }
  }
  return s;
}

// Gauss sum modulus and the two L(1,eta) paths
inline SuiteResult suite_characters(const SuiteOptions& o = {}) {
  SuiteResult s{"characters", {}};
  for (long long D = -200; D <= 200; ++D) {
    if (D == 1 || !is_fundamental_discriminant(D)) continue;
    QuadraticCharacter eta{D};
    std::string c = "D=" + std::to_string(D);
    detail::add_numeric(s, o, "gauss_modulus", c, std::abs(gauss_sum(eta)), gauss_sum_modulus_formula(eta), 1e-12);
    detail::add_numeric(s, o, "dirichlet_L1", c, dirichlet_L1(eta), dirichlet_L1_digamma(eta), 1e-10);
  }
  return s;
}

struct SuiteEntry {
  const char* name;
  SuiteResult (*run)(const SuiteOptions&);
  const char* lemmas;  // space-separated lemma names produced
};

inline const std::vector<SuiteEntry>& all_suites() {
  static const std::vector<SuiteEntry> v{
      {"arch", suite_arch, "arch_even arch_odd arch_reflection arch_2F1"},
      {"c_l", suite_c_l, "c_l_even c_l_zero_forms c_l_zero_quadrature"},
      {"padic", suite_padic, "spherical unramified level ramified"},
      {"contour", suite_contour, "phi_hat u_local u_prime"},
      {"duality", suite_duality, "duality"},
      {"measure", suite_measure, "mass density_forms sato_tate_mass"},
      {"amplifier", suite_amplifier, "amplifier"},
      {"characters", suite_characters, "gauss_modulus dirichlet_L1"},
  };
  return v;
}

// suites whose name or lemma list contains the filter
inline bool suite_matches(const SuiteEntry& e, const std::string& filter) {
  if (filter.empty()) return true;
  return std::string(e.name).find(filter) != std::string::npos || std::string(e.lemmas).find(filter) != std::string::npos;
}

// run matching suites; rows are kept when the filter names their suite or their lemma
inline std::vector<SuiteResult> run_suites(const std::string& filter, const SuiteOptions& o = {}) {
  std::vector<SuiteResult> out;
  for (auto& e : all_suites()) {
    if (!suite_matches(e, filter)) continue;
    auto t0 = std::chrono::steady_clock::now();
    SuiteResult r = e.run(o);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!filter.empty() && std::string(e.name).find(filter) == std::string::npos)
      std::erase_if(r.rows, [&](const LemmaRow& row) { return row.lemma.find(filter) == std::string::npos; });
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace rtf
