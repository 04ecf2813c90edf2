#pragma once

#include "rtf/arch_special.hpp"
#include "rtf/field_core.hpp"
#include "rtf/quadrature.hpp"
#include "rtf/test_function.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <numeric>
#include <complex>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rtf {

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SpectralDatum {
  std::string label;
  int weight = 0;
  IdealQ conductor{1};
  std::map<std::uint64_t, BigInt> hecke;  // a_p, arithmetic normalization
  std::optional<double> L_half;
  std::map<long long, double> L_half_twist;
  std::optional<double> L_adjoint;
  std::string provenance;

  int c_at(std::uint64_t p) const { return conductor.ord(p); }

  // x_p = a_p / p^{(k-1)/2}
  double satake_trace(std::uint64_t p) const {
    auto it = hecke.find(p);
    if (it == hecke.end()) throw DataError("form " + label + ": missing a_" + std::to_string(p));
    return to_double(Rational(it->second)) / std::pow(static_cast<double>(p), (weight - 1) / 2.0);
  }

  bool satisfies_ramanujan(std::uint64_t p, const BigInt& a) const {
    if (conductor.n % p == 0) return true;
    BigInt bound = 4;
    for (int i = 0; i < weight - 1; ++i) bound *= p;
    return a * a <= bound;
  }
};

struct SpectralDataSet {
  std::vector<SpectralDatum> forms;
  std::set<std::pair<int, std::uint64_t>> complete;  // (weight, N)

  bool complete_for(int weight, std::uint64_t n) const { return complete.count({weight, n}) > 0; }
};

namespace detail {

inline double parse_double(const std::string& s, int line) {
  std::size_t used = 0;
  double v;
  try {
    v = std::stod(s, &used);
  } catch (...) {
    throw DataError("line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  if (used != s.size()) throw DataError("line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

inline long long parse_int(const std::string& s, int line) {
  std::size_t used = 0;
  long long v;
  try {
    v = std::stoll(s, &used);
  } catch (...) {
    throw DataError("line " + std::to_string(line) + ": bad integer '" + s + "'");
  }
  if (used != s.size()) throw DataError("line " + std::to_string(line) + ": bad integer '" + s + "'");
  return v;
}

inline BigInt parse_bigint(const std::string& s, int line) {
  std::size_t i = (s.size() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
  if (i == s.size()) throw DataError("line " + std::to_string(line) + ": bad integer '" + s + "'");
  for (std::size_t j = i; j < s.size(); ++j)
    if (s[j] < '0' || s[j] > '9') throw DataError("line " + std::to_string(line) + ": bad integer '" + s + "'");
  return BigInt(s);
}

}  // namespace detail

inline SpectralDataSet parse_spectral_data(std::istream& in) {
  SpectralDataSet ds;
  std::string raw;
  int line = 0;
  SpectralDatum* cur = nullptr;
  auto need = [&](const char* key) {
    if (!cur) throw DataError("line " + std::to_string(line) + ": '" + key + "' before any 'form'");
  };
  auto check_form = [&](const SpectralDatum& f) {
    if (f.weight <= 0) throw DataError("form " + f.label + ": missing weight");
  };
  while (std::getline(in, raw)) {
    ++line;
    auto hash = raw.find('#');
    std::string body = raw.substr(0, hash);
    std::istringstream ls(body);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    const std::string& key = tok[0];
    auto arity = [&](std::size_t n) {
      if (tok.size() != n + 1)
        throw DataError("line " + std::to_string(line) + ": '" + key + "' expects " + std::to_string(n) + " field(s)");
    };
    if (key == "form") {
      arity(1);
      if (cur) check_form(*cur);
      ds.forms.push_back({});
      cur = &ds.forms.back();
      cur->label = tok[1];
    } else if (key == "weight") {
      need("weight");
      arity(1);
      long long k = detail::parse_int(tok[1], line);
      if (k < 2 || k % 2) throw DataError("line " + std::to_string(line) + ": weight must be even and >= 2");
      cur->weight = static_cast<int>(k);
    } else if (key == "conductor") {
      need("conductor");
      arity(1);
      long long N = detail::parse_int(tok[1], line);
      if (N < 1) throw DataError("line " + std::to_string(line) + ": conductor must be positive");
      cur->conductor = IdealQ(static_cast<std::uint64_t>(N));
    } else if (key == "ap") {
      need("ap");
      arity(2);
      long long p = detail::parse_int(tok[1], line);
      if (p < 2 || !is_prime(static_cast<std::uint64_t>(p)))
        throw DataError("line " + std::to_string(line) + ": ap index is not a prime");
      BigInt a = detail::parse_bigint(tok[2], line);
      if (cur->weight <= 0) throw DataError("line " + std::to_string(line) + ": 'ap' before 'weight'");
      if (!cur->satisfies_ramanujan(static_cast<std::uint64_t>(p), a))
        throw DataError("line " + std::to_string(line) + ": a_" + tok[1] + " violates the Ramanujan bound");
      cur->hecke[static_cast<std::uint64_t>(p)] = a;
    } else if (key == "Lhalf") {
      need("Lhalf");
      arity(1);
      cur->L_half = detail::parse_double(tok[1], line);
    } else if (key == "Lhalf_twist") {
      need("Lhalf_twist");
      arity(2);
      cur->L_half_twist[detail::parse_int(tok[1], line)] = detail::parse_double(tok[2], line);
    } else if (key == "Ladj") {
      need("Ladj");
      arity(1);
      double v = detail::parse_double(tok[1], line);
      if (!(v > 0)) throw DataError("line " + std::to_string(line) + ": Ladj must be positive");
      cur->L_adjoint = v;
    } else if (key == "provenance") {
      need("provenance");
      std::string rest = body.substr(body.find("provenance") + 10);
      auto a = rest.find_first_not_of(" \t");
      cur->provenance = a == std::string::npos ? "" : rest.substr(a, rest.find_last_not_of(" \t\r") - a + 1);
    } else if (key == "complete_for_level") {
      need("complete_for_level");
      arity(2);
      long long N = detail::parse_int(tok[1], line);
      if (N < 1) throw DataError("line " + std::to_string(line) + ": level must be positive");
      if (tok[2] == "true") ds.complete.insert({cur->weight, static_cast<std::uint64_t>(N)});
      else if (tok[2] != "false") throw DataError("line " + std::to_string(line) + ": expected true/false");
    } else {
      throw DataError("line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
  }
  if (cur) check_form(*cur);
  return ds;
}

inline SpectralDataSet load_spectral_data(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return parse_spectral_data(in);
}

// ---------------------------------------------------------------------------
// Test functions on the spectral side
// ---------------------------------------------------------------------------

// z^m + z^{-m} for x = z + 1/z
template <class T>
T chebyshev_alpha(int m, const T& x) {
  if (m < 0) throw std::domain_error("chebyshev_alpha: negative degree");
  T t0 = T(2), t1 = x;
  if (m == 0) return t0;
  for (int i = 1; i < m; ++i) {
    T t2 = x * t1 - t0;
    t0 = t1;
    t1 = t2;
  }
  return t1;
}

template <class T>
T alpha_eval_at(const TestFunctionT<T>& alpha, const std::map<std::uint64_t, T>& x) {
  T sum = T(0);
  for (auto& [c, ms] : alpha.expanded()) {
    T t = c;
    for (std::size_t i = 0; i < ms.size(); ++i) t *= chebyshev_alpha(ms[i], x.at(alpha.places[i]));
    sum += t;
  }
  return sum;
}

inline std::map<std::uint64_t, double> satake_traces(const TestFunction& alpha, const SpectralDatum& pi) {
  std::map<std::uint64_t, double> x;
  for (auto p : alpha.places) {
    if (pi.conductor.n % p == 0) throw std::invalid_argument("alpha_eval: place divides the conductor of " + pi.label);
    x[p] = pi.satake_trace(p);
  }
  return x;
}

inline double alpha_eval(const TestFunction& alpha, const SpectralDatum& pi) {
  return alpha_eval_at(alpha, satake_traces(alpha, pi));
}

// (sum_v {lambda_v alpha_v^{(1)} - alpha_v^{(2)} - (1/2) alpha_v^{(0)}})^2
template <class T>
TestFunctionT<T> amplifier_from(const std::map<std::uint64_t, T>& lambda) {
  if (lambda.empty()) throw std::invalid_argument("amplifier: empty S");
  TestFunctionT<T> sum;
  bool first = true;
  for (auto& [p, l] : lambda) {
    TestFunctionT<T> a = TestFunctionT<T>::hecke(p, 1, l) + TestFunctionT<T>::hecke(p, 2, T(-1)) +
                         TestFunctionT<T>::hecke(p, 0, T(-1) / T(2));
    sum = first ? a : sum + a;
    first = false;
  }
  return sum * sum;
}

inline TestFunction amplifier(const SpectralDatum& pi, const std::vector<std::uint64_t>& S) {
  std::map<std::uint64_t, double> lambda;
  for (auto p : S) {
    if (pi.conductor.n % p == 0) throw std::invalid_argument("amplifier: S meets the conductor");
    lambda[p] = pi.satake_trace(p);
  }
  return amplifier_from(lambda);
}

// ---------------------------------------------------------------------------
// Weights and constants
// ---------------------------------------------------------------------------

inline int sign_of_fe(const SpectralDatum& pi, const QuadraticCharacter& eta) {
  if (eta.trivial()) return 1;
  if (std::gcd(pi.conductor.n, eta.conductor()) != 1) throw std::invalid_argument("sign_of_fe: conductors not coprime");
  return (eta.sign_at_infinity() ? -1 : 1) * eta_tilde(eta, pi.conductor);
}

// r(pi_v, eta_v) with k = ord_v(n f_pi^{-1}) >= 1
inline double r_local(const SpectralDatum& pi, const QuadraticCharacter& eta, std::uint64_t p, int k) {
  double q = static_cast<double>(p);
  int e = eta.trivial() ? 1 : eta_local(eta, p);
  int c = pi.c_at(p);
  if (e == 0) throw std::invalid_argument("w_weight: level not prime to the conductor of eta");
  if (e == -1) {
    double par = (k % 2 == 0) ? 1.0 : 0.0;
    return par * (c == 0 ? (q + 1.0) / (q - 1.0) : 1.0);
  }
  if (c >= 2) return k + 1.0;
  if (c == 1) {
    // chi_v(varpi) = a_p / p^{(k-2)/2}
    auto it = pi.hecke.find(p);
    if (it == pi.hecke.end()) throw DataError("form " + pi.label + ": missing a_" + std::to_string(p));
    double chi = to_double(Rational(it->second)) / std::pow(q, (pi.weight - 2) / 2.0);
    return 1.0 + k * (1.0 - chi / q) / (1.0 + chi / q);
  }
  // Satake pair {alpha, 1/alpha}: roots of X^2 - x X + 1
  double x = pi.satake_trace(p);
  double sq = std::sqrt(q);
  double den = 1.0 + x / sq + 1.0 / q;       // (1 + q^{-1/2} alpha)(1 + q^{-1/2} alpha^{-1})
  double mid = 1.0 - sq * x + q;             // (1 - alpha q^{1/2})(1 - alpha^{-1} q^{1/2})
  return (q + 1.0) / (q * den) * (2.0 + (k - 1.0) / (q - 1.0) * mid);
}

inline double w_weight(const SpectralDatum& pi, const IdealQ& n, const QuadraticCharacter& eta) {
  if (n.n % pi.conductor.n != 0) throw std::invalid_argument("w_weight: conductor does not divide the level");
  if (std::gcd(n.n, eta.trivial() ? std::uint64_t(1) : eta.conductor()) != 1)
    throw std::invalid_argument("w_weight: level not prime to the conductor of eta");
  IdealQ m(n.n / pi.conductor.n);
  double w = 1.0;
  for (auto& [p, k] : m.fac) w *= r_local(pi, eta, p, k);
  return w;
}

inline double rtf_constant(int l, const IdealQ& n, std::size_t S_size) {
  double sign = (S_size % 2) ? -1.0 : 1.0;
  double arch = 2.0 * kPi * std::exp(std::lgamma(l - 1.0) - 2.0 * std::lgamma(l / 2.0));
  return sign * arch * 0.5 / kDiscF / to_double(Rational(index_K0(n)));
}

// L-values in the completed normalization used throughout
struct LValues {
  double L_half;
  double L_half_twist;
  double L_adjoint;
};

inline cplx i_cus(const SpectralDatum& pi, const IdealQ& n, const QuadraticCharacter& eta, const LValues& L) {
  cplx G = gauss_sum(eta);
  double sign = eta.sign_at_infinity() ? -1.0 : 1.0;
  double w = w_weight(pi, n, eta);
  if (sign_of_fe(pi, eta) == -1) return 0.0;
  double norm = static_cast<double>(pi.conductor.n) / to_double(Rational(index_K0(pi.conductor))) * L.L_adjoint;
  return sign * G * w * L.L_half * L.L_half_twist / norm;
}

// ---------------------------------------------------------------------------
// Central values
// ---------------------------------------------------------------------------

// normalized Dirichlet coefficients lambda(n) = a_n / n^{(k-1)/2} for n <= limit
inline std::vector<double> hecke_coefficients(const SpectralDatum& pi, std::size_t limit) {
  std::vector<double> lam(limit + 1, 0.0);
  if (limit >= 1) lam[1] = 1.0;
  // lambda(p^r) from lambda(p)
  std::vector<std::uint64_t> spf(limit + 1, 0);
  for (std::uint64_t i = 2; i <= limit; ++i)
    if (!spf[i])
      for (std::uint64_t j = i; j <= limit; j += i)
        if (!spf[j]) spf[j] = i;
  std::map<std::uint64_t, std::vector<double>> powers;
  for (std::uint64_t n = 2; n <= limit; ++n) {
    std::uint64_t p = spf[n], m = n;
    int r = 0;
    while (m % p == 0) {
      m /= p;
      ++r;
    }
    auto& pw = powers[p];
    if (pw.empty()) pw = {1.0, pi.satake_trace(p)};
    while (static_cast<int>(pw.size()) <= r) {
      if (pi.conductor.n % p == 0) pw.push_back(pw.back() * pw[1]);  // lambda(p^r) = lambda(p)^r
      else pw.push_back(pw[1] * pw[pw.size() - 1] - pw[pw.size() - 2]);
    }
    lam[n] = pw[r] * lam[m];
  }
  return lam;
}

// largest n with every prime factor's a_p available
inline std::size_t coefficient_limit(const SpectralDatum& pi) {
  std::uint64_t n = 2;
  while (pi.hecke.count(n) || !is_prime(n)) ++n;
  return static_cast<std::size_t>(n - 1);
}

struct AFEResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t terms = 0;
  int sign = 1;
};

// Completed central value Gamma_C(s + (k-1)/2) L(s, pi (x) eta) at s = 1/2 for level-N pi
// and eta of conductor D coprime to N, via the split of the Mellin integral at A.
inline AFEResult central_L_afe(const SpectralDatum& pi, const QuadraticCharacter& eta, double target_error = 1e-13,
                               double A = 1.0) {
  const int k = pi.weight;
  const double h = k / 2.0;
  const double D = eta.trivial() ? 1.0 : static_cast<double>(eta.conductor());
  const double M = static_cast<double>(pi.conductor.n) * D * D;
  AFEResult r;
  int eps_f = (pi.conductor.n == 1) ? (((k / 2) % 2) ? -1 : 1) : 0;
  if (eps_f == 0) throw std::invalid_argument("central_L_afe: only level-one forms carry a known root number here");
  r.sign = eps_f * (eta.trivial() ? 1 : eta_integer(eta, -1));
  if (r.sign == -1) return r;
  const double c = 2.0 * kPi / std::sqrt(M);
  // |lambda(n)| n^{-1/2} <= d(n) n^{-1/2} <= 2, Gamma(h, y) <= 2 y^{h-1} e^{-y} for y >= 2h,
  // so sum_{n > N} |term(n)| <= 4 * (2 / (c a)) Gamma(h, c N a), a = min(A, 1/A)
  const double amin = std::min(A, 1.0 / A);
  auto tail = [&](double N0) {
    double y = c * N0 * amin;
    if (y < 2.0 * h) return std::numeric_limits<double>::infinity();
    return 4.0 * 2.0 / (c * amin) * boost::math::tgamma(h, y) * std::pow(c, -h);
  };
  std::size_t N = 1;
  while (!(2.0 * tail(static_cast<double>(N)) * std::pow(M, -k / 4.0) <= target_error)) {
    N = N < 8 ? N + 1 : N + N / 8;
    if (N > 10000000) throw std::runtime_error("central_L_afe: target error unreachable");
  }
  std::size_t avail = coefficient_limit(pi);
  if (N > avail)
    throw DataError("central_L_afe: need coefficients up to " + std::to_string(N) + ", data covers " +
                    std::to_string(avail));
  auto lam = hecke_coefficients(pi, N);
  double s = 0.0;
  for (std::size_t n = 1; n <= N; ++n) {
    int chi = eta.trivial() ? 1 : eta_integer(eta, static_cast<long long>(n));
    if (!chi || lam[n] == 0.0) continue;
    double nd = static_cast<double>(n);
    double g = boost::math::tgamma(h, c * nd * A) + boost::math::tgamma(h, c * nd / A);
    s += chi * lam[n] / std::sqrt(nd) * g;
  }
  // Lambda_cl(k/2) = sum a_n (c n)^{-h} [...], a_n = lambda(n) n^{h - 1/2}
  double lam_cl = s * std::pow(c, -h);
  r.value = 2.0 * lam_cl * std::pow(M, -k / 4.0);
  r.error = 2.0 * tail(static_cast<double>(N)) * std::pow(M, -k / 4.0);
  r.terms = N;
  return r;
}

// Oracle: quadrature of int_1^inf F(t) t^{h-1} dt (1 + sign), F(t) = sum a_n e^{-c n t}
inline double central_L_mellin(const SpectralDatum& pi, const QuadraticCharacter& eta, std::size_t terms) {
  const int k = pi.weight;
  const double h = k / 2.0;
  const double D = eta.trivial() ? 1.0 : static_cast<double>(eta.conductor());
  const double M = static_cast<double>(pi.conductor.n) * D * D;
  const double c = 2.0 * kPi / std::sqrt(M);
  int eps_f = (pi.conductor.n == 1) ? (((k / 2) % 2) ? -1 : 1) : 0;
  if (eps_f == 0) throw std::invalid_argument("central_L_mellin: level-one forms only");
  int sign = eps_f * (eta.trivial() ? 1 : eta_integer(eta, -1));
  if (sign == -1) return 0.0;
  if (terms > coefficient_limit(pi)) throw DataError("central_L_mellin: not enough coefficients");
  auto lam = hecke_coefficients(pi, terms);
  std::vector<double> a(terms + 1, 0.0);
  for (std::size_t n = 1; n <= terms; ++n) {
    int chi = eta.trivial() ? 1 : eta_integer(eta, static_cast<long long>(n));
    a[n] = chi * lam[n] * std::pow(static_cast<double>(n), h - 0.5);
  }
  auto F = [&](double t) {
    double s = 0.0;
    for (std::size_t n = terms; n >= 1; --n) s += a[n] * std::exp(-c * static_cast<double>(n) * t);
    return s * std::pow(t, h - 1.0);
  };
  double hi = 1.0 + 60.0 / c;
  auto q = integrate(F, 1.0, hi, 1e-16, 30, linspace_breaks(1.0, hi, 64), 1e-14);
  return 2.0 * 2.0 * q.value * std::pow(M, -k / 4.0);
}

// ---------------------------------------------------------------------------

struct SpectralTerm {
  std::string label;
  double w = 0.0;
  double alpha = 0.0;
  cplx i_cus = 0.0;
  std::string provenance;
};

struct SpectralReport {
  cplx value = 0.0;
  double constant = 0.0;
  bool complete = false;
  std::vector<SpectralTerm> terms;
};

// L-values for pi and eta: ingested when present, else the AFE path
inline LValues resolve_L_values(const SpectralDatum& pi, const QuadraticCharacter& eta, std::string* provenance) {
  LValues L{};
  std::string prov;
  if (pi.L_half) {
    L.L_half = *pi.L_half;
    prov += "Lhalf:ingested";
  } else {
    L.L_half = central_L_afe(pi, QuadraticCharacter{}).value;
    prov += "Lhalf:afe";
  }
  if (eta.trivial()) {
    L.L_half_twist = L.L_half;
  } else if (pi.L_half_twist.count(eta.D)) {
    L.L_half_twist = pi.L_half_twist.at(eta.D);
    prov += " Lhalf_twist:ingested";
  } else {
    L.L_half_twist = central_L_afe(pi, eta).value;
    prov += " Lhalf_twist:afe";
  }
  if (!pi.L_adjoint) throw DataError("form " + pi.label + ": missing Ladj");
  L.L_adjoint = *pi.L_adjoint;
  prov += " Ladj:ingested";
  if (!pi.provenance.empty()) prov += " (" + pi.provenance + ")";
  if (provenance) *provenance = prov;
  return L;
}

inline SpectralReport spectral_side(const SpectralDataSet& data, int l, const IdealQ& n, const QuadraticCharacter& eta,
                                    const TestFunction& alpha, bool allow_partial = false) {
  SpectralReport rep;
  rep.complete = data.complete_for(l, n.n);
  if (!rep.complete && !allow_partial)
    throw DataError("spectral data not declared complete for weight " + std::to_string(l) + " and level " +
                    std::to_string(n.n));
  rep.constant = rtf_constant(l, n, alpha.places.size());
  for (auto& pi : data.forms) {
    if (pi.weight != l || n.n % pi.conductor.n != 0) continue;
    SpectralTerm t;
    t.label = pi.label;
    t.w = w_weight(pi, n, eta);
    t.alpha = alpha_eval(alpha, pi);
    if (t.w != 0.0 && sign_of_fe(pi, eta) == 1) {
      LValues L = resolve_L_values(pi, eta, &t.provenance);
      t.i_cus = i_cus(pi, n, eta, L);
    }
    rep.value += rep.constant * t.i_cus * t.alpha;
    rep.terms.push_back(t);
  }
  return rep;
}

}  // namespace rtf
