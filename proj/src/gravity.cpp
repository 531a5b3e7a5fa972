#include <algorithm>
#include <cmath>

#include "sie/physics.hpp"

namespace sie {

namespace {

// double-double arithmetic, about 32 significant digits
struct dd {
  double hi = 0.0, lo = 0.0;
};
inline dd quick_two_sum(double a, double b) {
  double s = a + b;
  return {s, b - (s - a)};
}
inline dd operator+(dd x, dd y) {
  double s = x.hi + y.hi, bb = s - x.hi;
  double e = (x.hi - (s - bb)) + (y.hi - bb);
  double t = x.lo + y.lo, cc = t - x.lo;
  double f = (x.lo - (t - cc)) + (y.lo - cc);
  e += t;
  dd r = quick_two_sum(s, e);
  r.lo += f;
  return quick_two_sum(r.hi, r.lo);
}
inline dd operator-(dd x) { return {-x.hi, -x.lo}; }
inline dd operator-(dd x, dd y) { return x + (-y); }
inline dd operator*(dd x, dd y) {
  double p = x.hi * y.hi;
  double e = std::fma(x.hi, y.hi, -p);
  e += x.hi * y.lo + x.lo * y.hi;
  return quick_two_sum(p, e);
}
inline dd recip(double d) {
  double q = 1.0 / d;
  return {q, std::fma(-q, d, 1.0) / d};
}

struct qc {
  dd re, im;
};
inline qc operator+(qc a, qc b) { return {a.re + b.re, a.im + b.im}; }
inline qc operator-(qc a, qc b) { return {a.re - b.re, a.im - b.im}; }
inline qc operator-(qc a) { return {-a.re, -a.im}; }
inline qc operator*(qc a, qc b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
inline qc operator*(dd s, qc a) { return {s * a.re, s * a.im}; }
inline qc to_qc(cplx z) { return {{z.real(), 0.0}, {z.imag(), 0.0}}; }
inline cplx to_cplx(qc z) { return {z.re.hi + z.re.lo, z.im.hi + z.im.lo}; }
inline double abs1(qc z) { return std::abs(z.re.hi) + std::abs(z.im.hi); }

// Terms t_ij = V_ij u^i v^j by antidiagonal d = i + j. Each antidiagonal only
// needs the ones at d - 2 and d - 3. nmax > 0 fixes the truncation i, j <= nmax.
cplx riemann_sum(cplx u, cplx v, cplx e_tilde, int nmax) {
  const int dmax = nmax > 0 ? 2 * nmax : 6000;
  const int lim = nmax > 0 ? nmax : dmax;
  qc U = to_qc(u), Vv = to_qc(v), Et = to_qc(e_tilde);
  const qc m_i8 = {{0.0, 0.0}, {-0.125, 0.0}};  // 1/(8i)
  qc c1 = Et * U * Vv;
  qc c2 = m_i8 * U * U * Vv;
  qc c3 = m_i8 * U * Vv * Vv;
  std::vector<qc> d3, d2, d1, cur;  // antidiagonals d-3, d-2, d-1, d
  d1.assign(1, qc{{1.0, 0.0}, {0.0, 0.0}});  // d = 0
  d2.clear();
  qc sum = d1[0];
  // d = 1 is empty
  d3 = d2;
  d2 = d1;
  d1.assign(2, qc{});
  int small_run = 0;
  for (int d = 2; d <= dmax; ++d) {
    cur.assign(d + 1, qc{});
    double dmag = 0.0;
    for (int i = std::max(1, d - lim); i <= std::min(d - 1, lim); ++i) {
      int j = d - i;
      qc val = -(c1 * d2[i - 1]);
      if (i >= 2 && i - 2 < int(d3.size())) val = val - c2 * d3[i - 2];
      if (i - 1 < int(d3.size())) val = val + c3 * d3[i - 1];
      val = recip(double(i) * double(j)) * val;
      cur[i] = val;
      sum = sum + val;
      dmag = std::max(dmag, abs1(val));
    }
    d3.swap(d2);
    d2.swap(d1);
    d1.swap(cur);
    if (nmax > 0) continue;
    if (d > 4 && dmag < 1e-17 * std::max(abs1(sum), 1e-300)) {
      if (++small_run >= 3) break;
    } else {
      small_run = 0;
    }
    if (d == dmax) fail(ErrorKind::resolution_failure, "Riemann series did not converge");
  }
  return to_cplx(sum);
}

}  // namespace

std::vector<std::vector<cplx>> gravity_riemann_coefficients(cplx e_tilde, int n) {
  std::vector<std::vector<qc>> V(n + 1, std::vector<qc>(n + 1));
  V[0][0] = to_qc(1.0);
  const qc m_i8 = {{0.0, 0.0}, {-0.125, 0.0}};
  qc Et = to_qc(e_tilde);
  for (int d = 2; d <= 2 * n; ++d)
    for (int i = std::max(1, d - n); i <= std::min(n, d - 1); ++i) {
      int j = d - i;
      qc s = -(Et * V[i - 1][j - 1]);
      if (i >= 2) s = s - m_i8 * V[i - 2][j - 1];
      if (j >= 2) s = s + m_i8 * V[i - 1][j - 2];
      V[i][j] = recip(double(i) * double(j)) * s;
    }
  std::vector<std::vector<cplx>> out(n + 1, std::vector<cplx>(n + 1));
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) out[i][j] = to_cplx(V[i][j]);
  return out;
}

cplx gravity_riemann_uv(cplx u, cplx v, cplx e_tilde, int nmax) { return riemann_sum(u, v, e_tilde, nmax); }

cplx gravity_riemann_series(cplx z, cplx zeta, cplx z0, cplx zeta0, double E, int nmax) {
  cplx et = 0.25 * E + (z0 - zeta0) / cplx(0.0, 8.0);
  return riemann_sum(z - z0, zeta - zeta0, et, nmax);
}

cplx gravity_riemann_bromwich(cplx u, cplx v, cplx e_tilde, const BromwichOptions& opt) {
  const cplx I(0.0, 1.0);
  cplx c = u / (4.0 * I);
  double ac = std::abs(c);
  double rho = opt.radius;
  if (rho <= 0.0) {
    rho = std::max(1.0, 2.0 * std::sqrt(ac));
    if (std::abs(v) > 0.0) rho = std::max(rho, std::sqrt(8.0 * std::abs(e_tilde) * ac / std::abs(v)));
  }
  if (rho * rho <= ac) fail(ErrorKind::invalid_argument, "contour radius inside the branch cut");
  auto integrand = [&](double th) {
    cplx s = std::polar(rho, th);
    cplx x = c / (s * s);
    cplx g = std::sqrt(1.0 - x);
    cplx one_m_g = x / (1.0 + g);
    // s g - s and s^3 - s^3 g^3 without cancellation
    cplx sg_m_s = -s * one_m_g;
    cplx cube = s * s * s * one_m_g * (1.0 + g + g * g);
    cplx ex = 8.0 * I * e_tilde * sg_m_s + (8.0 * I / 3.0) * cube - u * s + s * v;
    return std::exp(ex) / g;  // V^ e^{sv} s
  };
  std::size_t n = 64;
  cplx prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) prev += integrand(2.0 * pi * double(i) / double(n));
  prev /= double(n);
  while (n < opt.max_nodes) {
    cplx add = 0.0;
    for (std::size_t i = 0; i < n; ++i) add += integrand(2.0 * pi * (double(i) + 0.5) / double(n));
    add /= double(n);
    cplx cur = 0.5 * (prev + add);
    n *= 2;
    if (std::abs(cur - prev) <= opt.tol * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  throw ResolutionFailure("Bromwich integral did not converge", std::abs(prev));
}

cplx gravity_fundamental(cplx x, cplx y, double E, const ContourOptions& opt) {
  double r = std::abs(x - y);
  if (r == 0.0) fail(ErrorKind::singular_argument, "fundamental solution at coincident points");
  const double a = 0.25 * r * r;
  const double b = E + 0.5 * (x.imag() + y.imag());
  const double eps = opt.eps;
  const cplx I(0.0, 1.0);
  auto F = [&](double tau) {
    double T = std::exp(tau);
    double h = b * T - a / T - T * T * T / 4.0;
    double ht = b * T + a / T - 0.75 * T * T * T;
    double htt = b * T - a / T - 2.25 * T * T * T;
    double q = ht * ht + 1.0;
    double kap = 1.0 / std::sqrt(q);
    double kapp = -ht * htt / (q * std::sqrt(q));
    double arg = kap * h / eps;
    double th = eps * std::tanh(arg);
    double sech = 1.0 / std::cosh(arg);
    double thp = sech * sech * (kapp * h + kap * ht);
    cplx t = std::exp(cplx(tau, th));
    cplx ph = a / t + b * t - t * t * t / 12.0;
    return std::exp(I * ph) * cplx(1.0, thp) / (4.0 * pi);
  };
  // truncation where the integrand is negligible
  const double step = 0.25, small = 1e-18;
  double lo = std::log(a) - 8.0, hi = std::log(4.0 + 4.0 * std::sqrt(std::abs(b))) + 1.0;
  while (hi - lo > step && std::abs(F(lo + step)) < small) lo += step;
  while (hi - lo > step && std::abs(F(hi - step)) < small) hi -= step;
  double h = 0.125;
  std::size_t n = std::size_t(std::ceil((hi - lo) / h));
  h = (hi - lo) / double(n);
  cplx sum = 0.0;
  for (std::size_t i = 0; i <= n; ++i) sum += F(lo + h * double(i));
  cplx prev = sum * h;
  for (int level = 0; level < 14; ++level) {
    cplx add = 0.0;
    for (std::size_t i = 0; i < n; ++i) add += F(lo + h * (double(i) + 0.5));
    sum += add;
    n *= 2;
    h *= 0.5;
    cplx cur = sum * h;
    if (std::abs(cur - prev) <= opt.tol * std::max(std::abs(cur), 1e-2)) return cur;
    prev = cur;
  }
  throw ResolutionFailure("fundamental solution quadrature did not converge", std::abs(prev));
}

}  // namespace sie
