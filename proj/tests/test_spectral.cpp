#include "rtf/spectral.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace rtf;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SpectralDataSet parse(const std::string& text) {
  std::istringstream in(text);
  return parse_spectral_data(in);
}

const SpectralDataSet& delta_data() {
  static SpectralDataSet d = load_spectral_data(std::string(RTF_DATA_DIR) + "/delta.dat");
  return d;
}

const SpectralDatum& delta() { return delta_data().forms.at(0); }

// synthetic datum from integer a_p
SpectralDatum synthetic(std::uint64_t cond, std::map<std::uint64_t, long long> ap, int k = 12) {
  SpectralDatum d;
  d.label = "syn";
  d.weight = k;
  d.conductor = IdealQ(cond);
  for (auto [p, a] : ap) d.hecke[p] = a;
  d.L_half = 1.0;
  d.L_adjoint = 1.0;
  return d;
}

}  // namespace

TEST_CASE("spectral data parser", "[spectral]") {
  auto one = parse("form Delta\nweight 12\nconductor 1\nap 2 -24\nap 3 252\nLadj 0.5\n");
  REQUIRE(one.forms.size() == 1);
  CHECK(one.forms[0].label == "Delta");
  CHECK(one.forms[0].hecke.at(2) == -24);
  CHECK(one.complete.empty());
  CHECK(parse("").forms.empty());
  CHECK(parse("# nothing\n\n").forms.empty());
  // 2 * 2^{11/2} ~ 90.5
  CHECK_NOTHROW(parse("form f\nweight 12\nap 2 90\n"));
  CHECK_THROWS_WITH(parse("form f\nweight 12\nap 2 91\n"), ContainsSubstring("line 3") && ContainsSubstring("Ramanujan"));
  CHECK_THROWS_WITH(parse("form f\nweight 12\nfoo 1\n"), ContainsSubstring("line 3"));
  CHECK_THROWS_AS(parse("weight 12\n"), DataError);
  CHECK_THROWS_AS(parse("form f\nap 2 1\n"), DataError);
  CHECK_THROWS_AS(parse("form f\nweight 11\n"), DataError);
  CHECK_THROWS_AS(parse("form f\nweight 12\nap 4 1\n"), DataError);
  CHECK_THROWS_AS(parse("form f\nweight 12\nLadj -1\n"), DataError);
  CHECK_THROWS_AS(parse("form f\nweight 12\nLhalf abc\n"), DataError);
  CHECK_THROWS_AS(parse("form f\nconductor 1\n"), DataError);
  CHECK_THROWS_AS(load_spectral_data("/nonexistent/file.dat"), DataError);
}

TEST_CASE("shipped Delta data", "[spectral]") {
  auto& d = delta();
  CHECK(d.weight == 12);
  CHECK(d.hecke.at(2) == -24);
  CHECK(d.hecke.at(3) == 252);
  CHECK(d.hecke.at(5) == 4830);
  CHECK(d.hecke.at(7) == -16744);
  CHECK(delta_data().complete_for(12, 1));
  CHECK(delta_data().complete_for(12, 2));
  CHECK(!delta_data().complete_for(12, 3));
  // tau(4) = -1472, tau(6) = -6048, tau(9) = -113643
  auto lam = hecke_coefficients(d, 9);
  CHECK_THAT(lam[4] * std::pow(4.0, 5.5), WithinRel(-1472.0, 1e-12));
  CHECK_THAT(lam[6] * std::pow(6.0, 5.5), WithinRel(-6048.0, 1e-12));
  CHECK_THAT(lam[9] * std::pow(9.0, 5.5), WithinRel(-113643.0, 1e-12));
}

TEST_CASE("Hecke basis evaluation", "[spectral]") {
  CHECK(chebyshev_alpha(0, 0.7) == 2.0);
  CHECK(chebyshev_alpha(1, 0.7) == 0.7);
  CHECK(chebyshev_alpha(2, 1.0) == -1.0);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    double x = u(rng);
    std::complex<double> z = (x + std::sqrt(std::complex<double>(x * x - 4.0))) / 2.0;
    for (int m = 0; m <= 8; ++m) {
      double direct = (std::pow(z, m) + std::pow(z, -m)).real();
      CHECK_THAT(chebyshev_alpha(m, x), WithinAbs(direct, 1e-12));
    }
  }
  auto f = synthetic(1, {{2, 0}, {3, 0}});
  auto tf = parse_test_function("2:2,3:1");
  CHECK(alpha_eval(tf, f) == 0.0);
  auto g = parse_test_function("2:2");
  CHECK(alpha_eval(g, f) == -2.0);
  CHECK_THROWS_AS(alpha_eval(g, synthetic(2, {})), std::invalid_argument);
}

TEST_CASE("amplifier", "[spectral]") {
  auto single = amplifier_from<Rational>({{2, Rational(0)}});
  CHECK(alpha_eval_at(single, std::map<std::uint64_t, Rational>{{2, Rational(0)}}) == 1);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> num(-2000, 2000);
  std::vector<std::uint64_t> primes{2, 3, 5, 7, 11};
  for (std::size_t s = 1; s <= primes.size(); ++s)
    for (int trial = 0; trial < 3; ++trial) {
      std::map<std::uint64_t, Rational> x;
      for (std::size_t i = 0; i < s; ++i) x[primes[i]] = Rational(num(rng), 1000);
      auto a = amplifier_from(x);
      CHECK(alpha_eval_at(a, x) == Rational(static_cast<long long>(s * s)));
      for (auto& t : a.terms)
        for (auto [q, m] : t.degree) CHECK(m <= 4);
    }
  auto amp = amplifier(delta(), {2, 3});
  CHECK_THAT(alpha_eval(amp, delta()), WithinAbs(4.0, 1e-12));
  CHECK_THROWS_AS(amplifier(synthetic(2, {{2, 1}}), {2}), std::invalid_argument);
}

TEST_CASE("weights w(pi, n, eta)", "[spectral]") {
  auto f1 = synthetic(1, {{2, 0}, {3, 5}, {11, 100}});
  CHECK(w_weight(f1, IdealQ(1), QuadraticCharacter{5}) == 1.0);
  // eta(2) = -1 for D = 5
  CHECK(w_weight(f1, IdealQ(2), QuadraticCharacter{5}) == 0.0);
  CHECK(w_weight(f1, IdealQ(8), QuadraticCharacter{5}) == 0.0);
  CHECK(w_weight(f1, IdealQ(4), QuadraticCharacter{5}) > 0.0);
  // 11 splits in Q(sqrt 5)
  auto f121 = synthetic(121, {{2, 0}});
  CHECK(w_weight(f121, IdealQ(121 * 1331), QuadraticCharacter{5}) == 4.0);
  CHECK_THROWS_AS(w_weight(f121, IdealQ(11), QuadraticCharacter{5}), std::invalid_argument);
  CHECK_THROWS_AS(w_weight(f1, IdealQ(5), QuadraticCharacter{5}), std::invalid_argument);
  // nonnegative throughout
  for (long long a2 : {-90LL, -40LL, 0LL, 33LL, 90LL})
    for (long long D : {1LL, 5LL, -3LL, 13LL})
      for (std::uint64_t n : {1, 2, 4, 8, 16, 32}) {
        auto f = synthetic(1, {{2, a2}});
        QuadraticCharacter eta = D == 1 ? QuadraticCharacter{} : QuadraticCharacter{D};
        CHECK(w_weight(f, IdealQ(n), eta) >= 0.0);
      }
}

TEST_CASE("r(pi, eta) is symmetric in the Satake pair", "[spectral]") {
  const double q = 3.0, sq = std::sqrt(q);
  for (long long a3 : {-400LL, -100LL, 0LL, 252LL, 500LL})
    for (int k : {1, 2, 3}) {
      auto f = synthetic(1, {{3, a3}});
      double x = f.satake_trace(3);
      std::complex<double> al = (x + std::sqrt(std::complex<double>(x * x - 4.0))) / 2.0;
      auto r_of = [&](std::complex<double> a) {
        auto den = (1.0 + a / sq) * (1.0 + 1.0 / (a * sq));
        auto mid = (1.0 - a * sq) * (1.0 - sq / a);
        return (q + 1.0) / q / den * (2.0 + (k - 1.0) / (q - 1.0) * mid);
      };
      auto r1 = r_of(al), r2 = r_of(1.0 / al);
      double r = r_local(f, QuadraticCharacter{13}, 3, k);  // (13|3) = 1
      CHECK(std::abs(r1 - r2) < 1e-12);
      CHECK_THAT(r, WithinAbs(r1.real(), 1e-12));
      CHECK(std::abs(r1.imag()) < 1e-12);
    }
}

TEST_CASE("constants and signs", "[spectral]") {
  const double pi = std::numbers::pi;
  CHECK_THAT(rtf_constant(12, IdealQ(1), 0), WithinRel(pi * 3628800.0 / (120.0 * 120.0), 1e-14));
  CHECK_THAT(rtf_constant(12, IdealQ(1), 1), WithinRel(-pi * 3628800.0 / (120.0 * 120.0), 1e-14));
  CHECK_THAT(rtf_constant(12, IdealQ(2), 2), WithinRel(pi * 3628800.0 / (120.0 * 120.0) / 3.0, 1e-14));
  CHECK(sign_of_fe(synthetic(7, {}), QuadraticCharacter{}) == 1);
  CHECK(sign_of_fe(synthetic(7, {}), QuadraticCharacter{-4}) == 1);
  CHECK(sign_of_fe(synthetic(1, {}), QuadraticCharacter{-4}) == -1);
  CHECK(sign_of_fe(synthetic(1, {}), QuadraticCharacter{5}) == 1);
  CHECK(sign_of_fe(synthetic(11, {}), QuadraticCharacter{5}) == 1);
  CHECK(sign_of_fe(synthetic(2, {}), QuadraticCharacter{5}) == -1);
  CHECK_THROWS_AS(sign_of_fe(synthetic(5, {}), QuadraticCharacter{5}), std::invalid_argument);
  // sign -1 kills the cuspidal term
  LValues L{1.0, 1.0, 1.0};
  CHECK(i_cus(synthetic(1, {}), IdealQ(1), QuadraticCharacter{-4}, L) == cplx(0.0));
  auto ic = i_cus(synthetic(1, {}), IdealQ(1), QuadraticCharacter{5}, L);
  CHECK(std::abs(ic - gauss_sum(QuadraticCharacter{5})) < 1e-15);
}

TEST_CASE("central values", "[spectral]") {
  auto& d = delta();
  auto a = central_L_afe(d, QuadraticCharacter{});
  CHECK(a.value > 0.0);
  CHECK(a.error <= 1e-13);
  CHECK_THAT(a.value, WithinAbs(*d.L_half, 1e-12));
  CHECK_THAT(a.value, WithinAbs(central_L_mellin(d, QuadraticCharacter{}, 60), 1e-8));
  for (long long D : {5LL, 8LL, 13LL}) {
    QuadraticCharacter eta{D};
    auto t = central_L_afe(d, eta);
    INFO("D=" << D);
    CHECK_THAT(t.value, WithinAbs(d.L_half_twist.at(D), 1e-12));
    CHECK_THAT(t.value, WithinAbs(central_L_mellin(d, eta, 150), 1e-8));
    auto shifted = central_L_afe(d, eta, 1e-13, 1.3);
    CHECK(std::abs(shifted.value - t.value) <= shifted.error + t.error + 1e-15);
    auto loose = central_L_afe(d, eta, 1e-9);
    CHECK(loose.terms <= t.terms);
    CHECK(std::abs(loose.value - t.value) <= loose.error + t.error);
  }
  auto odd = central_L_afe(d, QuadraticCharacter{-4});
  CHECK(odd.sign == -1);
  CHECK(odd.value == 0.0);
  auto few = synthetic(1, {{2, -24}, {3, 252}});
  CHECK_THROWS_AS(central_L_afe(few, QuadraticCharacter{5}), DataError);
}

TEST_CASE("spectral side", "[spectral]") {
  SpectralDataSet empty;
  empty.complete.insert({12, 1});
  CHECK(spectral_side(empty, 12, IdealQ(1), QuadraticCharacter{5}, TestFunction::constant(1.0)).value == cplx(0.0));
  CHECK_THROWS_AS(spectral_side(SpectralDataSet{}, 12, IdealQ(1), QuadraticCharacter{5}, TestFunction::constant(1.0)),
                  DataError);
  auto partial = spectral_side(SpectralDataSet{}, 12, IdealQ(1), QuadraticCharacter{5}, TestFunction::constant(1.0), true);
  CHECK(!partial.complete);

  QuadraticCharacter eta{5};
  auto& d = delta();
  LValues L{*d.L_half, d.L_half_twist.at(5), *d.L_adjoint};
  cplx I = i_cus(d, IdealQ(1), eta, L);
  auto plain = spectral_side(delta_data(), 12, IdealQ(1), eta, TestFunction::constant(1.0));
  CHECK(std::abs(plain.value - rtf_constant(12, IdealQ(1), 0) * I) < 1e-15);
  auto zero = spectral_side(delta_data(), 12, IdealQ(1), eta, TestFunction::hecke(3, 0));
  CHECK(std::abs(zero.value - rtf_constant(12, IdealQ(1), 1) * I * 2.0) < 1e-15);
  REQUIRE(zero.terms.size() == 1);
  CHECK(zero.terms[0].provenance.find("ingested") != std::string::npos);
  // forms of other weights or levels are ignored
  auto other = spectral_side(delta_data(), 16, IdealQ(1), eta, TestFunction::constant(1.0), true);
  CHECK(other.terms.empty());
}
