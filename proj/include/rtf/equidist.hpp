#pragma once

#include "rtf/arch_special.hpp"
#include "rtf/quadrature.hpp"
#include "rtf/report.hpp"
#include "rtf/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace rtf {

struct MeasureSpec {
  double q = 2.0;
  int eta_p = 1;

  MeasureSpec() = default;
  MeasureSpec(double q_, int e) : q(q_), eta_p(e) {
    if (!(q_ >= 2.0)) throw std::invalid_argument("MeasureSpec: q must be >= 2");
    if (e != 1 && e != -1) throw std::invalid_argument("MeasureSpec: eta_p must be +-1");
  }
};

inline void require_in_range(double x) {
  if (!(x >= -2.0 && x <= 2.0)) throw std::domain_error("density: x outside [-2,2]");
}

inline double sato_tate_density(double x) {
  require_in_range(x);
  return std::sqrt(std::max(0.0, 4.0 - x * x)) / (2.0 * kPi);
}

// d mu / d mu^ST
inline double mu_ratio(const MeasureSpec& s, double x) {
  double a = std::sqrt(s.q) + 1.0 / std::sqrt(s.q);
  if (s.eta_p == 1) return (s.q - 1.0) / ((a - x) * (a - x));
  return (s.q + 1.0) / (a * a - x * x);
}

inline double mu_density(const MeasureSpec& s, double x) {
  require_in_range(x);
  return mu_ratio(s, x) * sato_tate_density(x);
}

// density in y over one full period 4 pi / log q, built from local L-factors of I(iy)
inline double mu_density_via_L(const MeasureSpec& s, double y) {
  using C = std::complex<double>;
  const double q = s.q, lq = std::log(q);
  const double e = s.eta_p;
  C z = std::exp(C(0.0, y * lq / 2.0));
  auto L = [&](double a, double sv) {
    double qs = std::pow(q, -sv);
    return 1.0 / ((1.0 - a * z * qs) * (1.0 - a / z * qs));
  };
  C ad = 1.0 / ((1.0 - z * z / q) * (1.0 - 1.0 / q) * (1.0 - 1.0 / (z * z * q)));
  double zeta2 = 1.0 / (1.0 - 1.0 / (q * q));
  double L1eta = 1.0 / (1.0 - e / q);
  C qiy = std::exp(C(0.0, -y * lq));
  double ratio = std::norm((1.0 - qiy) / (1.0 - qiy / q));
  C v = L(1.0, 0.5) * L(e, 0.5) / (2.0 * ad) * zeta2 / L1eta * (1.0 + 1.0 / q) * lq / (4.0 * kPi) * ratio;
  return v.real();
}

// the same density from mu_density by x = q^{iy/2} + q^{-iy/2}; each x is covered twice per period
inline double mu_density_y(const MeasureSpec& s, double y) {
  double lq = std::log(s.q);
  double x = 2.0 * std::cos(y * lq / 2.0);
  x = std::clamp(x, -2.0, 2.0);
  return 0.5 * mu_density(s, x) * std::abs(std::sin(y * lq / 2.0)) * lq;
}

// int_{-2}^{x} g d mu, with x = 2 cos(theta)
template <class G>
double mu_integral(const MeasureSpec& s, G&& g, double upper = 2.0, double tol = 1e-14) {
  double th0 = std::acos(std::clamp(upper / 2.0, -1.0, 1.0));
  auto f = [&](double th) {
    double x = 2.0 * std::cos(th);
    double sn = std::sin(th);
    return g(x) * mu_ratio(s, x) * 2.0 * sn * sn / kPi;
  };
  if (th0 >= kPi) return 0.0;
  return integrate(f, th0, kPi, tol, 30, linspace_breaks(th0, kPi, 8)).value;
}

inline double mu_mass(const MeasureSpec& s) {
  return mu_integral(s, [](double) { return 1.0; });
}

inline double mu_cdf(const MeasureSpec& s, double x) {
  if (x <= -2.0) return 0.0;
  if (x >= 2.0) return 1.0;
  return mu_integral(s, [](double) { return 1.0; }, x);
}

// int alpha^{(m)} d mu, alpha^{(m)}(x) = z^m + z^{-m}
inline double mu_moment(const MeasureSpec& s, int m) {
  if (m < 0) throw std::domain_error("mu_moment: negative degree");
  return mu_integral(s, [m](double x) { return chebyshev_alpha(m, x); });
}

struct WeightedPoint {
  double x;
  double weight;
};

struct HistogramBin {
  double lo, hi, weight, model_mass;
};

struct EmpiricalResult {
  std::vector<HistogramBin> bins;
  double discrepancy = 1.0;  // sup |F_emp - F_model|
  double total_weight = 0.0;
};

// normalized weighted histogram of the points against mu, with the Kolmogorov-Smirnov distance
inline EmpiricalResult weighted_empirical(std::vector<WeightedPoint> pts, const MeasureSpec& s, int nbins) {
  if (nbins < 1) throw std::invalid_argument("weighted_empirical: need at least one bin");
  EmpiricalResult r;
  double total = 0.0;
  for (auto& p : pts) {
    require_in_range(p.x);
    if (p.weight < 0.0) throw std::invalid_argument("weighted_empirical: negative weight");
    total += p.weight;
  }
  r.total_weight = total;
  if (total <= 0.0) return r;
  std::vector<double> edges(nbins + 1);
  for (int i = 0; i <= nbins; ++i) edges[i] = -2.0 + 4.0 * i / nbins;
  std::vector<double> cdf(nbins + 1);
  for (int i = 0; i <= nbins; ++i) cdf[i] = mu_cdf(s, edges[i]);
  for (int i = 0; i < nbins; ++i) r.bins.push_back({edges[i], edges[i + 1], 0.0, cdf[i + 1] - cdf[i]});
  for (auto& p : pts) {
    int b = std::min(nbins - 1, static_cast<int>((p.x + 2.0) / 4.0 * nbins));
    r.bins[b].weight += p.weight / total;
  }
  std::sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.x < b.x; });
  double F = 0.0, d = 0.0;
  for (std::size_t i = 0; i < pts.size();) {
    double x = pts[i].x, Fm = mu_cdf(s, x);
    d = std::max(d, std::abs(F - Fm));
    while (i < pts.size() && pts[i].x == x) F += pts[i++].weight / total;
    d = std::max(d, std::abs(F - Fm));
  }
  r.discrepancy = d;
  return r;
}

// (x_p(pi), L(1/2,pi)L(1/2,pi x eta)/L(1,pi;Ad)) for the forms of weight l and conductor n
inline std::vector<WeightedPoint> spectral_points(const SpectralDataSet& data, int l, const IdealQ& n,
                                                  const QuadraticCharacter& eta, std::uint64_t p) {
  std::vector<WeightedPoint> pts;
  for (auto& pi : data.forms) {
    if (pi.weight != l || pi.conductor.n != n.n) continue;
    double w = 0.0;
    if (sign_of_fe(pi, eta) == 1) {
      LValues L = resolve_L_values(pi, eta, nullptr);
      w = L.L_half * L.L_half_twist / L.L_adjoint;
    }
    pts.push_back({std::clamp(pi.satake_trace(p), -2.0, 2.0), w});
  }
  return pts;
}

// rejection sampling from mu
inline std::vector<WeightedPoint> sample_mu(const MeasureSpec& s, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(-2.0, 2.0), uy(0.0, 1.0);
  double top = 0.0;
  for (int i = 0; i <= 400; ++i) top = std::max(top, mu_density(s, -2.0 + i / 100.0));
  top *= 1.05;
  std::vector<WeightedPoint> out;
  while (out.size() < count) {
    double x = ux(rng);
    if (uy(rng) * top <= mu_density(s, x)) out.push_back({x, 1.0});
  }
  return out;
}

inline void write_histogram_csv(std::ostream& os, const EmpiricalResult& r) {
  CsvWriter w{os};
  w.row({"bin_lo", "bin_hi", "weight", "model_mass"});
  for (auto& b : r.bins) w.row({format_double(b.lo), format_double(b.hi), format_double(b.weight), format_double(b.model_mass)});
}

// model-only table on a uniform grid
inline EmpiricalResult model_histogram(const MeasureSpec& s, int nbins) {
  EmpiricalResult r;
  double prev = 0.0;
  for (int i = 0; i < nbins; ++i) {
    double lo = -2.0 + 4.0 * i / nbins, hi = -2.0 + 4.0 * (i + 1) / nbins;
    double c = (i + 1 == nbins) ? mu_cdf(s, 2.0) : mu_cdf(s, hi);
    r.bins.push_back({lo, hi, 0.0, c - prev});
    prev = c;
  }
  r.total_weight = 0.0;
  return r;
}

// bars for the histogram, polyline for the model density and Sato-Tate
inline void write_svg(std::ostream& os, const MeasureSpec& s, const EmpiricalResult& r, const std::string& title) {
  const double W = 640, H = 400, pad = 40;
  double ymax = 0.0;
  for (int i = 0; i <= 400; ++i) ymax = std::max(ymax, mu_density(s, -2.0 + i / 100.0));
  ymax = std::max(ymax, 1.0 / kPi);
  for (auto& b : r.bins) ymax = std::max(ymax, b.weight / (b.hi - b.lo));
  ymax *= 1.1;
  auto X = [&](double x) { return pad + (x + 2.0) / 4.0 * (W - 2 * pad); };
  auto Y = [&](double y) { return H - pad - y / ymax * (H - 2 * pad); };
  auto esc = [](const std::string& t) {
    std::string o;
    for (char c : t) {
      if (c == '&') o += "&amp;";
      else if (c == '<') o += "&lt;";
      else if (c == '>') o += "&gt;";
      else if (c == '"') o += "&quot;";
      else o += c;
    }
    return o;
  };
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << " " << H << "\">\n";
  os << "<title>" << esc(title) << "</title>\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  os << "<line x1=\"" << pad << "\" y1=\"" << H - pad << "\" x2=\"" << W - pad << "\" y2=\"" << H - pad
     << "\" stroke=\"black\"/>\n";
  for (int t = -2; t <= 2; ++t)
    os << "<text x=\"" << X(t) << "\" y=\"" << H - pad + 16 << "\" font-size=\"12\" text-anchor=\"middle\">" << t
       << "</text>\n";
  for (auto& b : r.bins) {
    if (b.weight <= 0.0) continue;
    double h = b.weight / (b.hi - b.lo);
    os << "<rect x=\"" << format_double(X(b.lo)) << "\" y=\"" << format_double(Y(h)) << "\" width=\""
       << format_double(X(b.hi) - X(b.lo)) << "\" height=\"" << format_double(Y(0) - Y(h))
       << "\" fill=\"#9ecae1\" stroke=\"#3182bd\"/>\n";
  }
  auto curve = [&](auto&& f, const char* colour) {
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"";
    for (int i = 0; i <= 200; ++i) {
      double x = -2.0 + i / 50.0;
      os << format_double(X(x)) << "," << format_double(Y(f(x))) << (i < 200 ? " " : "");
    }
    os << "\"/>\n";
  };
  curve([&](double x) { return mu_density(s, x); }, "#d62728");
  curve([](double x) { return sato_tate_density(x); }, "#7f7f7f");
  os << "<text x=\"" << pad << "\" y=\"20\" font-size=\"14\">" << esc(title) << "</text>\n";
  os << "</svg>\n";
}

}  // namespace rtf
