#ifndef SIE_TESTS_ORACLES_HPP
#define SIE_TESTS_ORACLES_HPP

// Test-only reference computations. Nothing here is used by the library.

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "sie/core.hpp"

namespace oracle {

using sie::cplx;
using sie::pi;

// Weighted basis functions in the angle variable x = cos(theta), in extended
// precision so that the subtracted integrands keep their digits near the endpoints.
// fs(n, phi) = f_n(cos phi) * sin(phi), which stays smooth up to the endpoints.
using real = long double;
inline constexpr real pi_l = 3.141592653589793238462643383279502884L;

struct WeightedFamily {
  bool wu;

  real fs(int n, real phi) const {
    return wu ? std::sin((n + 1) * phi) * std::sin(phi) : std::cos(n * phi);
  }
  real value(int n, real x) const {
    real th = std::acos(x), s = std::sin(th);
    return wu ? std::sin((n + 1) * th) : std::cos(n * th) / s;
  }
  real derivative(int n, real x) const {
    real th = std::acos(x), s = std::sin(th);
    if (wu) return -(n + 1) * std::cos((n + 1) * th) / s;
    return (n * std::sin(n * th) * s + std::cos(n * th) * std::cos(th)) / (s * s * s);
  }
};

// Gauss-Legendre on [a, b]
template <class F>
real gauss(F f, real a, real b) {
  return boost::math::quadrature::gauss<real, 100>::integrate(f, a, b);
}

// (1/pi) PV int f(y) / (y - x) dy, singularity subtracted
inline double hilbert(const WeightedFamily& w, int n, double xd) {
  real x = xd, th = std::acos(x), fx = w.value(n, x);
  auto g = [&](real phi) {
    real y = std::cos(phi);
    if (y == x) return real(0);
    return (w.fs(n, phi) - fx * std::sin(phi)) / (y - x);
  };
  real s = gauss(g, real(0), th) + gauss(g, th, pi_l);
  return double((s + fx * std::log((1 - x) / (1 + x))) / pi_l);
}

// (1/pi) f.p. int f(y) / (y - x)^2 dy
inline double finite_part(const WeightedFamily& w, int n, double xd) {
  real x = xd, th = std::acos(x), fx = w.value(n, x), dfx = w.derivative(n, x);
  auto g = [&](real phi) {
    real y = std::cos(phi), d = y - x;
    if (d == 0) return real(0);
    return (w.fs(n, phi) - (fx + dfx * d) * std::sin(phi)) / (d * d);
  };
  real s = gauss(g, real(0), th) + gauss(g, th, pi_l);
  s += fx * (-1 / (1 - x) - 1 / (1 + x));
  s += dfx * std::log((1 - x) / (1 + x));
  return double(s / pi_l);
}

// (1/pi) int log|y - x| f(y) dy
inline double log_transform(const WeightedFamily& w, int n, double xd) {
  real x = xd, th = std::acos(x);
  auto g = [&](real phi) {
    real d = std::abs(std::cos(phi) - x);
    return d == 0 ? real(0) : std::log(d) * w.fs(n, phi);
  };
  boost::math::quadrature::tanh_sinh<real> ts;
  return double((ts.integrate(g, real(0), th) + ts.integrate(g, th, pi_l)) / pi_l);
}

// (1/pi) int f(y) dy
inline double sigma(const WeightedFamily& w, int n) {
  return double(gauss([&](real phi) { return w.fs(n, phi); }, real(0), pi_l) / pi_l);
}

// Chebyshev / ultraspherical sums evaluated term by term
inline double cheb_T(int n, double x) { return std::cos(n * std::acos(x)); }
inline cplx direct_T(const std::vector<cplx>& c, cplx x) {
  // three-term recurrence summed forward
  cplx t0 = 1.0, t1 = x, s = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (k == 0) s += c[0] * t0;
    else if (k == 1) s += c[1] * t1;
    else {
      cplx t2 = 2.0 * x * t1 - t0;
      t0 = t1;
      t1 = t2;
      s += c[k] * t2;
    }
  }
  return s;
}
inline cplx direct_C(const std::vector<cplx>& c, int lam, cplx x) {
  cplx p0 = 1.0, p1 = 2.0 * double(lam) * x, s = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    cplx pk;
    if (k == 0) pk = p0;
    else if (k == 1) pk = p1;
    else {
      double n = double(k - 1);
      pk = (2.0 * (n + lam) * x * p1 - (n + 2.0 * lam - 1.0) * p0) / (n + 1.0);
      p0 = p1;
      p1 = pk;
    }
    s += c[k] * pk;
  }
  return s;
}

// Chebyshev coefficients by a long trapezoid sum in the angle variable
inline std::vector<cplx> cheb_coeffs(const std::function<cplx(double)>& f, int n, int m = 4096) {
  std::vector<cplx> c(n, 0.0);
  for (int j = 0; j < m; ++j) {
    double th = pi * (j + 0.5) / m;
    cplx v = f(std::cos(th));
    for (int k = 0; k < n; ++k) c[k] += v * std::cos(k * th);
  }
  for (int k = 0; k < n; ++k) c[k] *= (k == 0 ? 1.0 : 2.0) / m;
  return c;
}

// Bessel functions by ascending series (small arguments only)
inline double j0_series(double x) {
  double t = 1.0, s = 1.0, q = -0.25 * x * x;
  for (int m = 1; m < 80; ++m) {
    t *= q / (double(m) * m);
    s += t;
  }
  return s;
}
inline double y0_series(double x) {
  double q = -0.25 * x * x, t = 1.0, h = 0.0, s = 0.0;
  for (int m = 1; m < 80; ++m) {
    t *= q / (double(m) * m);
    h += 1.0 / m;
    s += t * h;
  }
  return 2.0 / pi * ((std::log(0.5 * x) + sie::euler_gamma) * j0_series(x) - s);
}

inline std::vector<cplx> random_coeffs(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  std::vector<cplx> c(n);
  for (auto& v : c) v = {g(rng), g(rng)};
  return c;
}

inline double rel_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double num = 0.0, den = 0.0;
  std::size_t n = std::max(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    cplx x = i < a.size() ? a[i] : 0.0, y = i < b.size() ? b[i] : 0.0;
    num = std::max(num, std::abs(x - y));
    den = std::max(den, std::abs(y));
  }
  return den > 0.0 ? num / den : num;
}

// limit of f(eps) as eps -> 0 by Neville extrapolation on eps = h, h/2, ..., h/2^(levels-1)
inline cplx limit_at_zero(const std::function<cplx(double)>& f, double h, int levels = 6) {
  std::vector<cplx> t(levels);
  for (int k = 0; k < levels; ++k) {
    t[k] = f(h / double(1 << k));
    for (int j = k - 1; j >= 0; --j) {
      double r = double(1 << (k - j));
      t[j] = t[j + 1] + (t[j + 1] - t[j]) / (r - 1.0);
    }
  }
  return t[0];
}

}  // namespace oracle

#endif
