#pragma once

#include "rtf/arch_special.hpp"
#include "rtf/field_core.hpp"
#include "rtf/padic_local.hpp"
#include "rtf/test_function.hpp"

#include <boost/math/constants/constants.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace rtf {

struct GeometricConfig {
  int weight = 12;
  IdealQ level{1};
  QuadraticCharacter eta{};
  double eps_trunc = 1e-10;
  double bound = 0.0;  // 0: chosen from eps_trunc
  double max_bound = 1e5;
  int threads = 0;     // 0: RTF_THREADS or 1
  bool keep_per_b = false;
};

struct BTerm {
  Rational b;
  cplx value;
};

struct GeometricReport {
  cplx hyperbolic = 0.0;
  double truncation_error = 0.0;
  bool certified = false;
  double bound_used = 0.0;
  cplx unipotent = 0.0;
  cplx unipotent_general = 0.0;
  int sign_condition = 1;  // (-1)^eps eta~(n)
  cplx total = 0.0;
  std::size_t enumerated = 0;
  std::size_t nonzero = 0;
  std::size_t parity_skipped = 0;
  std::vector<BTerm> per_b;
};

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("RTF_THREADS")) {
    int t = std::atoi(env);
    if (t > 0) return t;
  }
  return 1;
}

inline void validate(const GeometricConfig& cfg, const TestFunction& alpha) {
  require_even_weight(cfg.weight, 6);
  std::vector<SPlace> S;
  for (auto p : alpha.places) S.push_back({p, alpha.max_degree(p)});
  check_configuration(cfg.level, cfg.eta, S);
}

inline std::vector<SPlace> s_places(const TestFunction& alpha) {
  std::vector<SPlace> S;
  for (auto p : alpha.places) S.push_back({p, alpha.max_degree(p)});
  return S;
}

// Neumaier summation in the given order
struct CompensatedSum {
  double s = 0.0, c = 0.0;
  void add(double x) {
    double t = s + x;
    if (std::abs(s) >= std::abs(x)) c += (s - t) + x;
    else c += (x - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

// K_m with |I^+(m;b)| <= K_m (max(ord b,0)+1)
inline double spherical_local_constant(std::uint64_t q, int m) {
  double qd = static_cast<double>(q);
  if (m == 0) return 2.0;
  double k = std::pow(qd, -m / 2.0);
  for (int l = 0; l < m; ++l) k += std::abs(phi_hat(q, m, l).to_double());
  return k;
}

// prod over S and ramified places of the per-place constants in the tail majorant
inline double nonarch_constant(const QuadraticCharacter& eta, const TestFunction& alpha) {
  double total = 0.0;
  for (auto& [c, ms] : alpha.expanded()) {
    double t = std::abs(c);
    for (std::size_t i = 0; i < alpha.places.size(); ++i)
      t *= 2.0 * spherical_local_constant(alpha.places[i], ms[i]);
    total += t;
  }
  if (!eta.trivial())
    for (auto p : prime_divisors(eta.conductor())) {
      double q = static_cast<double>(p);
      total *= 2.0 * std::pow(q, -eta.conductor_exponent(p)) / (1.0 - 1.0 / q);
    }
  return total;
}

// Certified bound on sum_{|b| >= B} |term(b)|.
// tau(|N|) tau(|N+d|) <= 4 d (1+|b|) for b = N/d.
inline double hyperbolic_tail_bound(const GeometricConfig& cfg, const TestFunction& alpha, double B) {
  if (cfg.eta.sign_at_infinity() == 1) return B >= 1.0 ? 0.0 : std::numeric_limits<double>::infinity();
  auto S = s_places(alpha);
  long long d = static_cast<long long>(b_denominator(cfg.eta, S));
  double C = nonarch_constant(cfg.eta, alpha);
  return arch_tail_bound(cfg.weight, B, d, 1) * 4.0 * static_cast<double>(d) * C;
}

// Local factor at a prime outside S
inline double nonS_local_factor(const GeometricConfig& cfg, const Rational& b, const LocalOrders& o) {
  const std::uint64_t p = o.p;
  if (!cfg.eta.trivial() && cfg.eta.conductor() % p == 0)
    return to_double(j_local_ramified(LocalCharacter::at(cfg.eta, p), b));
  LocalCharacter chi = LocalCharacter::unramified(p, cfg.eta.trivial() ? 1 : eta_local(cfg.eta, p));
  LocalBSpec bs{o.ord_b, o.ord_b1};
  int k = cfg.level.ord(p);
  if (k > 0) return j_local_level(p, chi, k, bs).to_double();
  return j_local_unramified(p, chi, bs).to_double();
}

// Sum over the tensor terms of prod_{v in S} J_v(b; alpha_v^{(m_v)})
inline double s_factor(const GeometricConfig& cfg, const TestFunction& alpha,
                       const std::vector<std::pair<double, std::vector<int>>>& expanded, const BCandidate& c) {
  std::vector<std::map<int, double>> cache(alpha.places.size());
  CompensatedSum sum;
  for (auto& [coef, ms] : expanded) {
    double t = coef;
    for (std::size_t i = 0; i < alpha.places.size() && t != 0.0; ++i) {
      auto it = cache[i].find(ms[i]);
      if (it == cache[i].end()) {
        std::uint64_t p = alpha.places[i];
        const LocalOrders* o = c.at(p);
        LocalCharacter chi = LocalCharacter::unramified(p, cfg.eta.trivial() ? 1 : eta_local(cfg.eta, p));
        double v = j_local_spherical(p, chi, ms[i], LocalBSpec{o->ord_b, o->ord_b1}).to_double();
        it = cache[i].emplace(ms[i], v).first;
      }
      t *= it->second;
    }
    sum.add(t);
  }
  return sum.value();
}

inline cplx hyperbolic_b_term(const GeometricConfig& cfg, const TestFunction& alpha,
                              const std::vector<std::pair<double, std::vector<int>>>& expanded, const BCandidate& c,
                              bool& parity_skip) {
  parity_skip = false;
  const bool odd = cfg.eta.sign_at_infinity() == 1;
  double bd = to_double(c.b);
  if (odd && c.b * (c.b + 1) > 0) {
    parity_skip = true;
    return 0.0;
  }
  double local = 1.0;
  for (auto& o : c.orders) {
    bool inS = std::find(alpha.places.begin(), alpha.places.end(), o.p) != alpha.places.end();
    if (inS) continue;
    local *= nonS_local_factor(cfg, c.b, o);
    if (local == 0.0) return 0.0;
  }
  local *= s_factor(cfg, alpha, expanded, c);
  if (local == 0.0) return 0.0;
  cplx arch = odd ? j_arch_odd(cfg.weight, bd) : cplx(j_arch_even(cfg.weight, bd), 0.0);
  return arch * local;
}

struct HyperbolicResult {
  cplx value = 0.0;
  double error = 0.0;
  bool certified = false;
  double bound = 0.0;
  std::size_t enumerated = 0, nonzero = 0, parity_skipped = 0;
  std::vector<BTerm> per_b;
};

inline HyperbolicResult hyperbolic_sum_at(const GeometricConfig& cfg, const TestFunction& alpha, double B) {
  validate(cfg, alpha);
  auto S = s_places(alpha);
  Rational RB = Rational(static_cast<long long>(std::floor(B * 1024.0)), 1024);
  auto cands = enumerate_b(cfg.level, cfg.eta, S, RB);
  auto expanded = alpha.expanded();
  std::vector<cplx> vals(cands.size());
  std::vector<char> skipped(cands.size(), 0);
  int nt = std::max(1, std::min<int>(resolve_threads(cfg.threads), static_cast<int>(cands.size())));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&]() {
    try {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= cands.size() || failed) return;
        bool sk = false;
        vals[i] = hyperbolic_b_term(cfg, alpha, expanded, cands[i], sk);
        skipped[i] = sk;
      }
    } catch (...) {
      if (!failed.exchange(true)) failure = std::current_exception();
    }
  };
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  HyperbolicResult r;
  r.bound = B;
  r.enumerated = cands.size();
  CompensatedSum re, im;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (skipped[i]) ++r.parity_skipped;
    if (vals[i] == cplx(0.0)) continue;
    ++r.nonzero;
    re.add(vals[i].real());
    im.add(vals[i].imag());
    if (cfg.keep_per_b) r.per_b.push_back({cands[i].b, vals[i]});
  }
  r.value = cplx(re.value(), im.value());
  r.error = hyperbolic_tail_bound(cfg, alpha, B);
  r.certified = r.error <= cfg.eps_trunc;
  return r;
}

// bound used when none is configured: smallest power-of-two multiple of 8 with certificate <= eps_trunc
inline double choose_bound(const GeometricConfig& cfg, const TestFunction& alpha) {
  double B = 8.0;
  while (B <= cfg.max_bound) {
    if (hyperbolic_tail_bound(cfg, alpha, B) <= cfg.eps_trunc) return B;
    B *= 2.0;
  }
  throw std::runtime_error("hyperbolic_term: truncation target " + std::to_string(cfg.eps_trunc) +
                           " unreachable below bound " + std::to_string(cfg.max_bound));
}

inline HyperbolicResult hyperbolic_term(const GeometricConfig& cfg, const TestFunction& alpha) {
  validate(cfg, alpha);
  double B = cfg.bound > 0.0 ? cfg.bound : choose_bound(cfg, alpha);
  return hyperbolic_sum_at(cfg, alpha, B);
}

inline double c_F_eta_constant(int l, const IdealQ& n, const QuadraticCharacter& eta) {
  if (!eta.trivial()) return dirichlet_L1(eta);
  const double gamma = boost::math::constants::euler<double>();
  const double pi = boost::math::constants::pi<double>();
  auto [R, C0] = laurent_zeta_constants();
  double h = 0.0;
  for (int k = 1; k <= l / 2 - 1; ++k) h += 1.0 / k;
  double brace = -0.5 * kDegreeF * (gamma + std::log(pi)) + std::log(kDiscF * std::sqrt(static_cast<double>(n.n))) + h;
  return C0 + R * brace;
}

// (-1)^{eps(eta)} eta~(n); the closed unipotent formula presumes +1
inline int unipotent_sign(const GeometricConfig& cfg) {
  return (cfg.eta.sign_at_infinity() ? -1 : 1) * (cfg.eta.trivial() ? 1 : eta_tilde(cfg.eta, cfg.level));
}

namespace detail {

// sum over tensor terms of coeff * (C prod U + R sum U' prod_{w != v} U)
inline double unipotent_bracket(const GeometricConfig& cfg, const TestFunction& alpha, double C, double R) {
  std::vector<int> e(alpha.places.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = cfg.eta.trivial() ? 1 : eta_local(cfg.eta, alpha.places[i]);
  CompensatedSum sum;
  for (auto& [c, ms] : alpha.expanded()) {
    std::size_t k = ms.size();
    std::vector<double> u(k), up(k);
    for (std::size_t i = 0; i < k; ++i) {
      std::uint64_t q = alpha.places[i];
      u[i] = u_local(q, e[i], ms[i]).to_double();
      up[i] = std::log(static_cast<double>(q)) * u_prime_local(q, ms[i]).to_double();
    }
    double prod = 1.0;
    for (double x : u) prod *= x;
    double deriv = 0.0;
    if (R != 0.0)
      for (std::size_t i = 0; i < k; ++i) {
        double t = up[i];
        for (std::size_t j = 0; j < k; ++j)
          if (j != i) t *= u[j];
        deriv += t;
      }
    sum.add(c * (C * prod + R * deriv));
  }
  return sum.value();
}

}  // namespace detail

// 2(-1)^eps G(eta) D_F^{1/2} (1 + i^l delta(n=1)) {C_F prod U + R sum U' prod U}
inline cplx unipotent_term(const GeometricConfig& cfg, const TestFunction& alpha) {
  validate(cfg, alpha);
  cplx G = gauss_sum(cfg.eta);
  cplx il = std::pow(cplx(0.0, 1.0), cfg.weight % 4);
  cplx enh = 1.0 + (cfg.level.is_unit() ? il : cplx(0.0));
  double R = cfg.eta.trivial() ? laurent_zeta_constants().R : 0.0;
  double CF = c_F_eta_constant(cfg.weight, cfg.level, cfg.eta);
  double sgn = cfg.eta.sign_at_infinity() ? -1.0 : 1.0;
  return 2.0 * sgn * G * std::sqrt(kDiscF) * enh * detail::unipotent_bracket(cfg, alpha, CF, R);
}

// Sum of the two unipotent contributions without presuming (-1)^eps eta~(n) = 1:
// (1 + s i^l delta) C_u + (s + i^l delta)(C_u + R log N(n)), s = (-1)^eps eta~(n).
// Equals unipotent_term when s = 1 and vanishes for n != 1 when s = -1.
inline cplx unipotent_general(const GeometricConfig& cfg, const TestFunction& alpha) {
  validate(cfg, alpha);
  cplx G = gauss_sum(cfg.eta);
  double s = unipotent_sign(cfg);
  cplx il = cfg.level.is_unit() ? std::pow(cplx(0.0, 1.0), cfg.weight % 4) : cplx(0.0);
  double R = cfg.eta.trivial() ? laurent_zeta_constants().R : 0.0;
  double logN = std::log(static_cast<double>(cfg.level.n));
  double Cu = c_F_eta_constant(cfg.weight, cfg.level, cfg.eta) - 0.5 * R * logN;
  double sgn = cfg.eta.sign_at_infinity() ? -1.0 : 1.0;
  cplx first = (1.0 + s * il) * detail::unipotent_bracket(cfg, alpha, Cu, R);
  cplx second = (s + il) * detail::unipotent_bracket(cfg, alpha, Cu + R * logN, R);
  return sgn * G * std::sqrt(kDiscF) * (first + second);
}

inline GeometricReport geometric_side(const GeometricConfig& cfg, const TestFunction& alpha) {
  GeometricReport rep;
  auto h = hyperbolic_term(cfg, alpha);
  rep.hyperbolic = h.value;
  rep.truncation_error = h.error;
  rep.certified = h.certified;
  rep.bound_used = h.bound;
  rep.enumerated = h.enumerated;
  rep.nonzero = h.nonzero;
  rep.parity_skipped = h.parity_skipped;
  rep.per_b = std::move(h.per_b);
  rep.unipotent = unipotent_term(cfg, alpha);
  rep.unipotent_general = unipotent_general(cfg, alpha);
  rep.sign_condition = unipotent_sign(cfg);
  rep.total = rep.hyperbolic + rep.unipotent_general;
  return rep;
}

}  // namespace rtf
