#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace rtf {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

namespace detail {

template <class F>
QuadResult gk_rule(F& f, double a, double b) {
  QuadResult r;
  r.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &r.error);
  return r;
}

template <class F>
QuadResult gk_adapt(F& f, double a, double b, QuadResult whole, double abs_tol, double rel_tol, unsigned depth) {
  if (depth == 0 || whole.error <= std::max(abs_tol, rel_tol * std::abs(whole.value)) || !std::isfinite(whole.value))
    return whole;
  double m = 0.5 * (a + b);
  auto l = gk_rule(f, a, m);
  auto r = gk_rule(f, m, b);
  // bisection no longer helps: the estimate sits at the roundoff floor
  bool near_floor = whole.error <= std::max(1e-14, 256.0 * std::numeric_limits<double>::epsilon() * std::abs(whole.value));
  if (near_floor && l.error + r.error >= 0.5 * whole.error) return {l.value + r.value, l.error + r.error};
  l = gk_adapt(f, a, m, l, 0.5 * abs_tol, rel_tol, depth - 1);
  r = gk_adapt(f, m, b, r, 0.5 * abs_tol, rel_tol, depth - 1);
  return {l.value + r.value, l.error + r.error};
}

}  // namespace detail

// Adaptive Gauss-Kronrod (7/15) on [a,b] with absolute and relative tolerance,
// split at the given interior breakpoints.
template <class F>
QuadResult integrate(F&& f, double a, double b, double tol = 1e-12, unsigned max_depth = 30,
                     const std::vector<double>& breaks = {}, double rel_tol = 1e-14) {
  std::vector<double> pts{a};
  for (double x : breaks)
    if (x > a && x < b) pts.push_back(x);
  pts.push_back(b);
  QuadResult r;
  double share = tol / static_cast<double>(pts.size() - 1);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    auto piece = detail::gk_adapt(f, pts[i], pts[i + 1], detail::gk_rule(f, pts[i], pts[i + 1]), share, rel_tol, max_depth);
    r.value += piece.value;
    r.error += piece.error;
  }
  return r;
}

struct ComplexQuadResult {
  std::complex<double> value{0.0, 0.0};
  double error = 0.0;
};

template <class F>
ComplexQuadResult integrate_complex(F&& f, double a, double b, double tol = 1e-12,
                                    unsigned max_depth = 30, const std::vector<double>& breaks = {},
                                    double rel_tol = 1e-14) {
  auto re = integrate([&](double x) { return std::real(f(x)); }, a, b, tol, max_depth, breaks, rel_tol);
  auto im = integrate([&](double x) { return std::imag(f(x)); }, a, b, tol, max_depth, breaks, rel_tol);
  return {{re.value, im.value}, re.error + im.error};
}

// uniform breakpoints, handy for long ranges with localized structure
inline std::vector<double> linspace_breaks(double a, double b, int pieces) {
  std::vector<double> v;
  for (int i = 1; i < pieces; ++i) v.push_back(a + (b - a) * i / pieces);
  return v;
}

}  // namespace rtf
