#include "sie/fieldeval.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "sie/opalg.hpp"

namespace sie {

cplx joukowsky_inv_plus(cplx z) {
  cplx w = std::sqrt(z - 1.0) * std::sqrt(z + 1.0);
  // z - w = 1 / (z + w) and |z + w| >= 1
  return 1.0 / (z + w);
}

cplx joukowsky(cplx q) { return 0.5 * (q + 1.0 / q); }

double bernstein_rho(cplx z) { return 1.0 / std::abs(joukowsky_inv_plus(z)); }

namespace {

void check_off_contour(cplx z) {
  if (z.imag() == 0.0 && std::abs(z.real()) < 1.0)
    fail(ErrorKind::on_contour, "Cauchy transform evaluated on the open interval; take a one-sided limit");
}

const double log2v = std::log(2.0);

}  // namespace

cplx cauchy_WU(const CVec& d, cplx z) {
  check_off_contour(z);
  cplx q = joukowsky_inv_plus(z);
  cplx s = 0.0;
  for (index_t k = index_t(d.size()) - 1; k >= 0; --k) s = s * q + d[k];
  return cplx(0.0, 0.5) * q * s;
}

cplx cauchy_WT(const CVec& d, cplx z) {
  check_off_contour(z);
  if (d.empty()) return 0.0;
  cplx w = std::sqrt(z - 1.0) * std::sqrt(z + 1.0);
  cplx q = 1.0 / (z + w);
  const cplx I(0.0, 1.0);
  cplx v = d[0] * (0.5 * I / w);
  if (d.size() > 1) v += d[1] * (0.5 * I * q / w);
  cplx s = 0.0;
  for (index_t k = index_t(d.size()) - 1; k >= 2; --k) s = s * q + d[k];
  return v - I * q * s;
}

cplx log_WT(const CVec& d, cplx z) {
  if (d.empty()) return 0.0;
  cplx q = joukowsky_inv_plus(z);
  double lq = std::log(std::abs(q));
  cplx v = d[0] * (-lq - log2v);
  if (d.size() > 1) v += d[1] * (-q.real());
  if (d.size() > 2) v += d[2] * (lq + log2v - 0.5 * (q * q).real());
  cplx qk2 = q;  // q^(k-2)
  for (std::size_t k = 3; k < d.size(); ++k) {
    cplx qk = qk2 * q * q;
    v += d[k] * (qk2.real() / double(k - 2) - qk.real() / double(k));
    qk2 *= q;
  }
  return v;
}

cplx log_WU(const CVec& d, cplx z) {
  if (d.empty()) return 0.0;
  cplx q = joukowsky_inv_plus(z);
  double lq = std::log(std::abs(q));
  cplx q2 = q * q;
  cplx v = d[0] * (0.25 * q2.real() - 0.5 * (lq + log2v));
  cplx qk = q;  // q^k
  for (std::size_t k = 1; k < d.size(); ++k) {
    cplx qk2 = qk * q2;
    v += d[k] * (0.5 * (qk2.real() / double(k + 2) - qk.real() / double(k)));
    qk *= q;
  }
  return v;
}

cplx density_mass(const CoeffExpansion& density) {
  double h = density.segment.half_length();
  switch (density.basis.kind) {
    case BasisKind::WT: return h * density.coeff(0);
    case BasisKind::WU: return 0.5 * h * density.coeff(0);
    default: fail(ErrorKind::unsupported_basis, "density must be WT or WU");
  }
}

cplx log_transform_interval(const CoeffExpansion& density, cplx z) {
  const Segment& seg = density.segment;
  double h = seg.half_length();
  cplx s = seg.to_local(z);
  cplx l;
  switch (density.basis.kind) {
    case BasisKind::WT: l = log_WT(to_modified(density.coeffs), s); break;
    case BasisKind::WU: l = log_WU(density.coeffs, s); break;
    default: fail(ErrorKind::unsupported_basis, "density must be WT or WU");
  }
  return h * l + density_mass(density) * std::log(h);
}

namespace {

struct Quadrature {
  std::vector<double> t, w;
  CVec g;  // density polynomial at the nodes, weight absorbed
};

Quadrature density_quadrature(const CoeffExpansion& density, std::size_t n) {
  Quadrature q;
  q.t.resize(n);
  q.w.resize(n);
  q.g.resize(n);
  bool wu = density.basis.kind == BasisKind::WU;
  if (!wu && density.basis.kind != BasisKind::WT) fail(ErrorKind::unsupported_basis, "density must be WT or WU");
  for (std::size_t j = 0; j < n; ++j) {
    if (wu) {
      double th = double(j + 1) * pi / double(n + 1);
      q.t[j] = std::cos(th);
      q.w[j] = pi / double(n + 1) * std::sin(th) * std::sin(th);
      q.g[j] = clenshaw_C(density.coeffs, 1, q.t[j]);
    } else {
      double th = (2.0 * double(j) + 1.0) * pi / (2.0 * double(n));
      q.t[j] = std::cos(th);
      q.w[j] = pi / double(n);
      q.g[j] = clenshaw_T(density.coeffs, q.t[j]);
    }
  }
  return q;
}

template <class F>
void for_targets(index_t n, Exec exec, F&& f) {
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (index_t i = 0; i < n; ++i) f(i);
  } else {
    for (index_t i = 0; i < n; ++i) f(i);
  }
}

}  // namespace

CVec far_field_eval(const BivariateFunction& phi, const CoeffExpansion& density, const CVec& targets,
                    std::size_t nodes, Exec exec) {
  std::size_t n = nodes ? nodes : 2 * density.size() + 128;
  Quadrature q = density_quadrature(density, n);
  const Segment& seg = density.segment;
  double h = seg.half_length();
  CVec out(targets.size());
  for_targets(index_t(targets.size()), exec, [&](index_t i) {
    cplx s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += q.w[j] * q.g[j] * phi(targets[i], seg.to_global(q.t[j]));
    out[i] = h * s;
  });
  return out;
}

CVec near_field_eval(const PointSplitting& split, const CoeffExpansion& density, const CVec& targets, Exec exec) {
  const Segment& seg = density.segment;
  bool wu = density.basis.kind == BasisKind::WU;
  std::size_t n = 2 * density.size() + 64;
  Quadrature q = density_quadrature(density, n);
  double h = seg.half_length();
  CVec out(targets.size());
  for_targets(index_t(targets.size()), exec, [&](index_t i) {
    cplx z = targets[i];
    CoeffExpansion a = adaptive_fit([&](cplx y) { return split.A(z, y); }, 1e-15, seg);
    CVec prod;
    if (wu) {
      CoeffExpansion au(Basis::U(), convert_coeffs(a.coeffs, 1));
      prod = multiplication_op(au, 1).apply(density.coeffs);
    } else {
      prod = multiplication_op(CoeffExpansion(Basis::T(), a.coeffs), 0).apply(density.coeffs);
    }
    CoeffExpansion ad(density.basis, std::move(prod), seg);
    cplx v = pi * log_transform_interval(ad, z);
    if (split.B) {
      cplx s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += q.w[j] * q.g[j] * split.B(z, seg.to_global(q.t[j]));
      v += h * s;
    }
    out[i] = v;
  });
  return out;
}

CVec layer_potential(const BivariateFunction& phi, const PointSplitting& split, const CoeffExpansion& density,
                     const CVec& targets, double rho_switch, Exec exec) {
  CVec near_pts, far_pts;
  std::vector<std::size_t> near_idx, far_idx;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (bernstein_rho(density.segment.to_local(targets[i])) <= rho_switch) {
      near_pts.push_back(targets[i]);
      near_idx.push_back(i);
    } else {
      far_pts.push_back(targets[i]);
      far_idx.push_back(i);
    }
  }
  CVec out(targets.size());
  if (!near_pts.empty()) {
    CVec v = near_field_eval(split, density, near_pts, exec);
    for (std::size_t i = 0; i < v.size(); ++i) out[near_idx[i]] = v[i];
  }
  if (!far_pts.empty()) {
    CVec v = far_field_eval(phi, density, far_pts, 0, exec);
    for (std::size_t i = 0; i < v.size(); ++i) out[far_idx[i]] = v[i];
  }
  return out;
}

void write_grid_csv(std::ostream& os, const CVec& points, const CVec& values) {
  os << "re_z,im_z,re_u,im_u\n" << std::setprecision(17);
  for (std::size_t i = 0; i < points.size(); ++i)
    os << points[i].real() << ',' << points[i].imag() << ',' << values[i].real() << ',' << values[i].imag() << '\n';
}

}  // namespace sie
