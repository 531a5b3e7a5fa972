#include <boost/math/special_functions/bessel.hpp>
#include <cmath>

#include "sie/physics.hpp"

namespace sie {

double bessel_j0(double x) { return boost::math::cyl_bessel_j(0, x); }
double bessel_j1(double x) { return boost::math::cyl_bessel_j(1, x); }
double bessel_y0(double x) { return boost::math::cyl_neumann(0, x); }
double bessel_y1(double x) { return boost::math::cyl_neumann(1, x); }
cplx hankel1_0(double x) { return {bessel_j0(x), bessel_y0(x)}; }
cplx hankel1_1(double x) { return {bessel_j1(x), bessel_y1(x)}; }

namespace {

// B = sum_m beta_m u^m with u = (kr/2)^2
cplx smooth_series(double k, double u, bool derivative) {
  const cplx I(0.0, 1.0);
  cplx c0 = 0.25 * I - (std::log(0.5 * k) + euler_gamma) / (2.0 * pi);
  cplx s = 0.0;
  double fact2 = 1.0, harm = 0.0, up = 1.0, sign = 1.0;
  for (int m = 0; m < 60; ++m) {
    if (m > 0) {
      fact2 *= double(m) * double(m);
      harm += 1.0 / double(m);
      sign = -sign;
    }
    cplx beta = sign / fact2 * (c0 + harm / (2.0 * pi));
    cplx t;
    if (derivative) {
      if (m == 0) continue;
      t = double(m) * beta * up;  // up = u^(m-1)
      up *= u;
    } else {
      t = beta * up;
      up *= u;
    }
    s += t;
    if (m > 4 && std::abs(t) < 1e-18 * std::abs(s)) break;
  }
  return s;
}

}  // namespace

cplx helmholtz_smooth(double k, double r) {
  double kr = k * r;
  if (kr < 2.0) return smooth_series(k, 0.25 * kr * kr, false);
  const cplx I(0.0, 1.0);
  return 0.25 * I * hankel1_0(kr) + bessel_j0(kr) * std::log(r) / (2.0 * pi);
}

cplx helmholtz_smooth_dd(double k, double r) {
  double kr = k * r;
  if (kr < 2.0) return -0.5 * k * k * smooth_series(k, 0.25 * kr * kr, true);
  const cplx I(0.0, 1.0);
  cplx knn = 0.25 * I * k * hankel1_1(kr) / r;
  double a = -bessel_j0(kr) / (2.0 * pi);
  double add = -k * bessel_j1(kr) / (2.0 * pi * r);
  return knn + a / (r * r) - add * std::log(r);
}

}  // namespace sie
