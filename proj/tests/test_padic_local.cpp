#include "rtf/lemma_suites.hpp"
#include "rtf/padic_local.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace rtf;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using K = LocalKernel::Kind;

namespace {

LocalValue R(std::uint64_t q, Rational r) { return LocalValue::rational(q, r); }

}  // namespace

TEST_CASE("LocalValue ring", "[padic]") {
  auto s = LocalValue::half_power(3, 1);
  CHECK(s * s == R(3, 3));
  CHECK(LocalValue::half_power(3, -1) * s == R(3, 1));
  CHECK(LocalValue::half_power(2, -3) == LocalValue(2, 0, Rational(1, 4)));
  CHECK_THAT(LocalValue::half_power(5, -5).to_double(), WithinRel(std::pow(5.0, -2.5), 1e-15));
  CHECK_THROWS_AS(LocalValue::half_power(2, 1) + LocalValue::half_power(3, 1), std::invalid_argument);
}

TEST_CASE("Green function on the unipotent radical", "[padic]") {
  for (std::uint64_t q : {2, 3, 7})
    for (double s : {1.5, 2.0, 4.0}) {
      double a = std::pow(q, -(s + 1) / 2);
      auto g0 = green_unipotent(q, 0.0, s, 0);
      CHECK_THAT(g0.real(), WithinRel(-a / ((1 - a) * (1 - a)), 1e-14));
      CHECK(std::abs(green_unipotent(q, 0.0, s, 1) - g0 * a) < 1e-15);
      cplx z(0.2, 0.5);
      cplx sc(s, 0.3);
      double ratio = std::abs(green_unipotent(q, z, sc, 3)) / std::abs(green_unipotent(q, z, sc, 2));
      CHECK_THAT(ratio, WithinRel(std::pow(q, -(s + 1) / 2 + z.real()), 1e-13));
    }
  CHECK_THROWS_AS(green_unipotent(2, 1.0, 0.5, 0), std::domain_error);
}

TEST_CASE("inverse spherical transform", "[padic]") {
  CHECK(phi_hat(2, 0, 0) == R(2, -2));
  CHECK(phi_hat(5, 0, 1) == R(5, 0));
  CHECK(phi_hat(2, 2, 0) == R(2, Rational(-1, 2)));
  CHECK(phi_hat(7, 3, 4) == R(7, 0));
  CHECK(phi_hat(3, 3, 3) == -LocalValue::half_power(3, -3));
  for (std::uint64_t q : {2, 3, 5})
    for (int m = 0; m <= 4; ++m)
      for (int l = 0; l <= 5; ++l) CHECK_THAT(phi_hat(q, m, l).to_double(), WithinAbs(phi_hat_contour(q, m, l), 1e-10));
}

TEST_CASE("delta_n^eta", "[padic]") {
  auto plus = LocalCharacter::unramified(3, 1), minus = LocalCharacter::unramified(3, -1);
  CHECK(delta_n_eta(3, plus, 0, 2) == R(3, 3));
  CHECK(delta_n_eta(3, minus, 0, 1) == R(3, 0));
  CHECK(delta_n_eta(3, minus, 0, 2) == R(3, 1));
  CHECK(delta_n_eta(3, plus, 2, -3) == R(3, 0));
  CHECK(delta_n_eta(3, minus, 2, -3) == R(3, 0));
  CHECK(delta_n_eta(3, minus, 3, -1) == R(3, 1));
}

TEST_CASE("spherical orbital integrals", "[padic]") {
  auto plus2 = LocalCharacter::unramified(2, 1);
  CHECK(j_local_spherical(2, plus2, 0, LocalBSpec::of(1, 2)) == R(2, -4));
  CHECK(j_local_spherical(2, plus2, 1, LocalBSpec::of(1, 2)) == Rational(-6) * LocalValue::half_power(2, -1));
  CHECK(j_local_spherical(2, plus2, 1, LocalBSpec::of(1, 2)) == LocalValue(2, 0, -3));
  for (int e : {1, -1}) {
    auto chi = LocalCharacter::unramified(3, e);
    Rational b = Rational(1, 27);  // |b| = q^3
    CHECK(j_local_spherical(3, chi, 2, LocalBSpec::of(b, 3)).is_zero());
    CHECK(j_local_oracle(chi, {K::spherical_m, 2, 0}, b).is_zero());
    // m = 0 is -2 Lambda
    for (Rational x : {Rational(1), Rational(3), Rational(9, 2), Rational(-4), Rational(26), Rational(1, 3)})
      CHECK(j_local_spherical(3, chi, 0, LocalBSpec::of(x, 3)) == Rational(-2) * lambda_exact(3, chi, LocalBSpec::of(x, 3)));
  }
}

TEST_CASE("support and size of spherical orbital integrals", "[padic]") {
  for (std::uint64_t q : {2, 3, 5})
    for (int e : {1, -1}) {
      auto chi = LocalCharacter::unramified(q, e);
      for (auto& b : padic_b_grid(q)) {
        auto bs = LocalBSpec::of(b, q);
        for (int m = 0; m <= 4; ++m) {
          double v = std::abs(j_local_spherical(q, chi, m, bs).to_double());
          int size = -std::min(bs.ord_b, 0);  // |b| = q^size when b is not integral
          double shape = (size <= m - 1 ? std::pow(q, 1 - m / 2.0) : 0.0) + (size == m ? std::pow(q, -m / 2.0) : 0.0);
          INFO("q=" << q << " e=" << e << " b=" << b << " m=" << m);
          if (size > m) CHECK(v == 0.0);
          if (bs.ord_b >= 0) continue;
          CHECK(v <= 2.0 * (m + 1) * (m + 1) * shape * (1 + 1e-12));
        }
      }
    }
}

TEST_CASE("Lambda and the unramified places", "[padic]") {
  auto plus = LocalCharacter::unramified(3, 1), minus = LocalCharacter::unramified(3, -1);
  CHECK(lambda_exact(3, plus, LocalBSpec::of(1, 3)) == R(3, 1));
  CHECK(lambda_exact(3, minus, LocalBSpec::of(1, 3)) == R(3, 1));
  CHECK(lambda_exact(3, minus, LocalBSpec::of(3, 3)) == R(3, 0));
  CHECK(lambda_majorant(LocalBSpec::of(3, 3)) == 2);
  CHECK(lambda_majorant(LocalBSpec::of(Rational(1, 3), 3)) == 0);
  CHECK(j_local_unramified(3, plus, LocalBSpec::of(1, 3)) == R(3, 1));
  CHECK(j_local_unramified(3, plus, LocalBSpec::of(3, 3)) == R(3, 2));
  CHECK(j_local_unramified(3, plus, LocalBSpec::of(Rational(1, 3), 3)) == R(3, 0));
  for (std::uint64_t q : {2, 3, 5})
    for (auto& b : padic_b_grid(q)) {
      auto bs = LocalBSpec::of(b, q);
      for (int e : {1, -1})
        CHECK(std::abs(lambda_exact(q, LocalCharacter::unramified(q, e), bs).to_double()) <= lambda_majorant(bs));
    }
}

TEST_CASE("level places", "[padic]") {
  auto plus = LocalCharacter::unramified(5, 1), minus = LocalCharacter::unramified(5, -1);
  CHECK(j_local_level(5, plus, 1, LocalBSpec::of(5, 5)) == R(5, 1));
  CHECK(j_local_level(5, minus, 1, LocalBSpec::of(5, 5)) == R(5, -1));
  CHECK(j_local_level(5, plus, 2, LocalBSpec::of(5, 5)) == R(5, 0));
  CHECK(j_local_level(5, minus, 2, LocalBSpec::of(5, 5)) == R(5, 0));
  CHECK(j_local_level(5, plus, 2, LocalBSpec::of(125, 5)) == R(5, 2));
}

TEST_CASE("ramified places", "[padic]") {
  auto chi3 = LocalCharacter::at(QuadraticCharacter{-3}, 3);
  CHECK(chi3.ramified);
  CHECK(chi3.f == 1);
  CHECK(j_local_ramified(chi3, 1) == 0);
  CHECK(j_local_ramified(chi3, Rational(1, 9)) == 0);
  for (long long D : {-3LL, -4LL, 5LL, -7LL, 8LL, 12LL, 13LL, -15LL, -20LL}) {
    QuadraticCharacter eta{D};
    for (auto p : prime_divisors(eta.conductor())) {
      auto chi = LocalCharacter::at(eta, p);
      double bound = 4.0 * std::pow(static_cast<double>(p), -chi.f);
      for (auto& b : padic_b_grid(p)) {
        Rational v = j_local_ramified(chi, b);
        INFO("D=" << D << " p=" << p << " b=" << b);
        if (ord_p(b, p) < -chi.f) CHECK(v == 0);
        else CHECK(std::abs(to_double(v)) <= bound);
      }
    }
  }
  CHECK_THROWS_AS(j_local_ramified(LocalCharacter::unramified(3, 1), 1), std::invalid_argument);
}

TEST_CASE("unipotent local factors", "[padic]") {
  for (std::uint64_t q : {2, 3, 5, 7}) {
    CHECK(u_local(q, 1, 0) == R(q, -2));
    CHECK(u_local(q, -1, 0) == R(q, -2));
    CHECK(u_local(q, -1, 1).is_zero());
    CHECK(u_local(q, -1, 3).is_zero());
  }
  CHECK(u_local(3, 1, 2).is_zero());
  for (std::uint64_t q : {2, 3, 5})
    for (int m = 0; m <= 4; ++m) {
      for (int e : {1, -1}) CHECK_THAT(u_local(q, e, m).to_double(), WithinAbs(u_local_contour(q, e, m), 1e-10));
      CHECK_THAT(u_prime_local(q, m).to_double(), WithinAbs(u_prime_contour(q, m), 1e-10));
      double want = m == 0 ? 0.0
                           : -0.5 * std::pow(q, 1 - m / 2.0) * ((m - 1) * (m - 2) - m * (m + 1) / static_cast<double>(q));
      CHECK_THAT(u_prime_local(q, m).to_double(), WithinAbs(want, 1e-14));
    }
}

TEST_CASE("p-adic oracle suites", "[padic][suite]") {
  auto p = suite_padic();
  CHECK(p.rows.size() >= 3000);
  CHECK(p.failures() == 0);
  auto c = suite_contour();
  CHECK(c.failures() == 0);
}

TEST_CASE("oracle detects an insufficient shell bound", "[padic]") {
  auto chi = LocalCharacter::unramified(2, 1);
  CHECK_THROWS(j_local_oracle(chi, {K::spherical_m, 1, 0}, Rational(1), 1));
  CHECK_THROWS(j_local_oracle(chi, {K::unit_ball, 0, 0}, Rational(1), 0));
  CHECK(j_local_oracle(chi, {K::spherical_m, 1, 0}, Rational(1), 3) == LocalValue(2, 0, -3));
}
