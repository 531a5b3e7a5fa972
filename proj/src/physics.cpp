#include "sie/physics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <mutex>
#include <unordered_map>

namespace sie {

namespace {

const cplx I(0.0, 1.0);

double dot(cplx a, cplx b) { return a.real() * b.real() + a.imag() * b.imag(); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// radial derivatives f'(r), f''(r) of Phi = f(|x - y|)
void radial_derivatives(const PDEKernel& K, double r, cplx& f1, cplx& f2) {
  switch (K.family) {
    case Family::laplace:
      f1 = -1.0 / (2.0 * pi * r);
      f2 = 1.0 / (2.0 * pi * r * r);
      return;
    case Family::helmholtz: {
      double kr = K.k * r;
      cplx h0 = hankel1_0(kr), h1 = hankel1_1(kr);
      f1 = -0.25 * I * K.k * h1;
      f2 = -0.25 * I * K.k * K.k * (h0 - h1 / kr);
      return;
    }
    default: fail(ErrorKind::invalid_argument, "normal derivatives need a radial kernel");
  }
}

// Riemann values memoized across the A and B samplings of one segment
class RiemannMemo {
 public:
  explicit RiemannMemo(const PDEKernel& K) : K_(K) {}
  cplx operator()(cplx x, cplx y) {
    Key key{x.real(), x.imag(), y.real(), y.imag()};
    {
      std::lock_guard<std::mutex> g(m_);
      auto it = map_.find(key);
      if (it != map_.end()) return it->second;
    }
    cplx v = K_.riemann(x, y);
    std::lock_guard<std::mutex> g(m_);
    map_.emplace(key, v);
    return v;
  }

 private:
  struct Key {
    double v[4];
    bool operator==(const Key& o) const { return std::memcmp(v, o.v, sizeof v) == 0; }
  };
  struct Hash {
    std::size_t operator()(const Key& k) const {
      std::size_t h = 0;
      for (double d : k.v) h = h * 1000003u ^ std::hash<double>()(d);
      return h;
    }
  };
  const PDEKernel& K_;
  std::mutex m_;
  std::unordered_map<Key, cplx, Hash> map_;
};

LowRankKernel concat(LowRankKernel a, const LowRankKernel& b) {
  a.terms.insert(a.terms.end(), b.terms.begin(), b.terms.end());
  return a;
}

}  // namespace

// ---------------------------------------------------------------- kernels

cplx PDEKernel::phi(cplx x, cplx y) const {
  double r = std::abs(x - y);
  switch (family) {
    case Family::laplace:
      if (r == 0.0) fail(ErrorKind::singular_argument, "fundamental solution at coincident points");
      return -std::log(r) / (2.0 * pi);
    case Family::helmholtz:
      if (r == 0.0) fail(ErrorKind::singular_argument, "fundamental solution at coincident points");
      return 0.25 * I * hankel1_0(k * r);
    case Family::gravity: return gravity_fundamental(x, y, E);
  }
  return 0.0;
}

cplx PDEKernel::riemann(cplx x, cplx y) const {
  switch (family) {
    case Family::laplace: return 1.0;
    case Family::helmholtz: return bessel_j0(k * std::abs(x - y));
    case Family::gravity: return gravity_riemann_series(x, std::conj(x), y, std::conj(y), E);
  }
  return 0.0;
}

cplx PDEKernel::B(cplx x, cplx y) const {
  double r = std::abs(x - y);
  switch (family) {
    case Family::laplace: return 0.0;
    case Family::helmholtz: return helmholtz_smooth(k, r);
    case Family::gravity:
      if (r == 0.0) fail(ErrorKind::singular_argument, "smooth part at coincident points");
      return phi(x, y) - A(x, y) * std::log(r);
  }
  return 0.0;
}

cplx PDEKernel::dphi_dny(cplx x, cplx y, cplx ny) const {
  double r = std::abs(x - y);
  if (r == 0.0) fail(ErrorKind::singular_argument, "kernel at coincident points");
  cplx f1, f2;
  radial_derivatives(*this, r, f1, f2);
  return -f1 * dot(x - y, ny) / r;
}

cplx PDEKernel::d2phi(cplx x, cplx y, cplx nx, cplx ny) const {
  double r = std::abs(x - y);
  if (r == 0.0) fail(ErrorKind::singular_argument, "kernel at coincident points");
  cplx f1, f2;
  radial_derivatives(*this, r, f1, f2);
  cplx rh = (x - y) / r;
  return -((f2 - f1 / r) * dot(nx, rh) * dot(ny, rh) + (f1 / r) * dot(nx, ny));
}

cplx PDEKernel::A_dd(cplx x, cplx y) const {
  double r = std::abs(x - y);
  switch (family) {
    case Family::laplace: return 0.0;
    case Family::helmholtz: {
      double kr = k * r;
      if (kr < 1e-8) return -k * k / (4.0 * pi);
      return -k * bessel_j1(kr) / (2.0 * pi * r);
    }
    default: fail(ErrorKind::invalid_argument, "hypersingular splitting needs laplace or helmholtz");
  }
}

cplx PDEKernel::B_dd(cplx x, cplx y) const {
  switch (family) {
    case Family::laplace: return 0.0;
    case Family::helmholtz: return helmholtz_smooth_dd(k, std::abs(x - y));
    default: fail(ErrorKind::invalid_argument, "hypersingular splitting needs laplace or helmholtz");
  }
}

std::string PDEKernel::name() const {
  switch (family) {
    case Family::laplace: return "laplace";
    case Family::helmholtz: return "helmholtz";
    case Family::gravity: return "gravity";
  }
  return "";
}

PointSplitting PDEKernel::point_splitting() const {
  PDEKernel K = *this;
  PointSplitting s;
  s.A = [K](cplx x, cplx y) { return K.A(x, y); };
  if (family != Family::laplace) s.B = [K](cplx x, cplx y) { return K.B(x, y); };
  return s;
}

BivariateFunction PDEKernel::phi_fn() const {
  PDEKernel K = *this;
  return [K](cplx x, cplx y) { return K.phi(x, y); };
}

PDEKernel laplace_kernel() { return PDEKernel{}; }

PDEKernel helmholtz_kernel(double k) {
  if (!(k > 0.0)) fail(ErrorKind::invalid_argument, "wavenumber must be positive");
  PDEKernel K;
  K.family = Family::helmholtz;
  K.k = k;
  return K;
}

PDEKernel gravity_kernel(double E) {
  PDEKernel K;
  K.family = Family::gravity;
  K.E = E;
  return K;
}

KernelSplitting segment_splitting(const PDEKernel& K, const Segment& seg, double tol, bool neumann) {
  KernelSplitting s;
  s.diagonal_value = -1.0 / (2.0 * pi);
  switch (K.family) {
    case Family::laplace:
      s.A = LowRankKernel::constant(-1.0 / (2.0 * pi), seg, seg);
      s.B = LowRankKernel::constant(0.0, seg, seg);
      if (neumann) {
        s.A_dd = LowRankKernel::constant(0.0, seg, seg);
        s.B_dd = LowRankKernel::constant(0.0, seg, seg);
      }
      return s;
    case Family::helmholtz:
      s.A = ge_lowrank([&](cplx x, cplx y) { return K.A(x, y); }, tol, seg, seg);
      s.B = ge_lowrank([&](cplx x, cplx y) { return K.B(x, y); }, tol, seg, seg);
      if (neumann) {
        s.A_dd = ge_lowrank([&](cplx x, cplx y) { return K.A_dd(x, y); }, tol, seg, seg);
        s.B_dd = ge_lowrank([&](cplx x, cplx y) { return K.B_dd(x, y); }, tol, seg, seg);
      }
      return s;
    case Family::gravity: {
      if (neumann) fail(ErrorKind::invalid_argument, "hypersingular splitting needs laplace or helmholtz");
      RiemannMemo memo(K);
      auto A = [&](cplx x, cplx y) { return -memo(x, y) / (2.0 * pi); };
      s.A = ge_lowrank(A, tol, seg, seg);
      try {
        s.B = ge_lowrank([&](cplx x, cplx y) { return K.phi(x, y) - A(x, y) * std::log(std::abs(x - y)); }, tol,
                         seg, seg);
      } catch (const ResolutionFailure& e) {
        fail(ErrorKind::splitting_mismatch, std::string("smooth part not resolved: ") + e.what());
      }
      return s;
    }
  }
  return s;
}

// ---------------------------------------------------------------- incident fields

Incident plane_wave(double k, cplx direction) {
  cplx d = direction / std::abs(direction);
  Incident inc;
  inc.u = [k, d](cplx x) { return std::exp(I * k * dot(d, x)); };
  inc.dn = [k, d](cplx x, cplx n) { return I * k * dot(d, n) * std::exp(I * k * dot(d, x)); };
  return inc;
}

Incident point_source(const PDEKernel& K, cplx source, cplx strength) {
  Incident inc;
  inc.u = [K, source, strength](cplx x) { return strength * K.phi(x, source); };
  if (K.family != Family::gravity) {
    // derivative in the second slot along n
    inc.dn = [K, source, strength](cplx x, cplx n) { return strength * K.dphi_dny(source, x, n); };
  }
  return inc;
}

Incident log_source(cplx source) {
  Incident inc;
  inc.u = [source](cplx x) { return cplx(std::log(std::abs(x - source))); };
  inc.dn = [source](cplx x, cplx n) {
    cplx d = x - source;
    return cplx(dot(d, n) / std::norm(d));
  };
  return inc;
}

// ---------------------------------------------------------------- assembly and solve

namespace {

bool is_neumann(const ScatteringProblem& p) { return p.bc == BoundaryCondition::neumann; }

CVec precond_diagonal(bool neumann, double h, index_t n) {
  CVec d(n);
  for (index_t i = 0; i < n; ++i) {
    if (neumann) d[i] = -2.0 * h / double(i + 1);
    else d[i] = (i == 0 ? 2.0 / std::log(2.0) : 2.0 * double(i)) / h;
  }
  return d;
}

BandedOperator precond_op(bool neumann, double h) {
  Basis b = neumann ? Basis::WU() : Basis::WT();
  return diagonal_op(
      [neumann, h](index_t i) {
        if (neumann) return cplx(-2.0 * h / double(i + 1));
        return cplx((i == 0 ? 2.0 / std::log(2.0) : 2.0 * double(i)) / h);
      },
      b, b);
}

BandedOperator self_block(const PDEKernel& K, const Segment& seg, bool neumann, double ktol) {
  double h = seg.half_length();
  double lh = std::log(h);
  KernelSplitting s = segment_splitting(K, seg, ktol, neumann);
  if (!neumann) {
    Basis b = Basis::WT();
    BandedOperator op = kernel_wrapped_op(SingularKind::log, scaled(s.A, pi * h), b);
    if (K.family != Family::laplace || lh != 0.0) {
      LowRankKernel sig = concat(scaled(s.A, pi * h * lh), scaled(s.B, pi * h));
      op = op_add(op, kernel_wrapped_op(SingularKind::sigma, sig, b));
    }
    return op;
  }
  Basis b = Basis::WU();
  BandedOperator op = kernel_wrapped_op(SingularKind::hadamard, scaled(s.A, -pi / h), b);
  if (K.family != Family::laplace) {
    BandedOperator lg = kernel_wrapped_op(SingularKind::log, scaled(*s.A_dd, pi * h), b);
    LowRankKernel sig = concat(scaled(*s.A_dd, pi * h * lh), scaled(*s.B_dd, pi * h));
    lg = op_add(lg, kernel_wrapped_op(SingularKind::sigma, sig, b));
    op = op_add(op, op_compose(conversion_op(0), lg));
  }
  return op;
}

BandedOperator coupling_block(const PDEKernel& K, const Segment& tgt, const Segment& src, bool neumann,
                              double ktol) {
  double h = src.half_length();
  if (!neumann) {
    LowRankKernel k = ge_lowrank([&](cplx x, cplx y) { return pi * h * K.phi(x, y); }, ktol, tgt, src);
    return kernel_wrapped_op(SingularKind::sigma, k, Basis::WT());
  }
  cplx nx = tgt.normal(), ny = src.normal();
  LowRankKernel k = ge_lowrank([&](cplx x, cplx y) { return pi * h * K.d2phi(x, y, nx, ny); }, ktol, tgt, src);
  return op_compose(conversion_op(0), kernel_wrapped_op(SingularKind::sigma, k, Basis::WU()));
}

CVec boundary_rhs(const ScatteringProblem& p, const Segment& seg) {
  if (!is_neumann(p)) return adaptive_fit(p.incident.u, 1e-16, seg).coeffs;
  if (!p.incident.dn) fail(ErrorKind::invalid_argument, "Neumann data needs the normal derivative of the incident field");
  cplx n = seg.normal();
  auto f = p.incident.dn;
  CVec t = adaptive_fit([&](cplx x) { return -f(x, n); }, 1e-16, seg).coeffs;
  return convert_coeffs(t, 1);
}

void finish_solution(ScatteringSolution& s, const CVec& x) {
  const ScatteringProblem& p = *s.problem;
  bool neumann = is_neumann(p);
  std::size_t d = p.segments.size();
  index_t off = p.zero_charge_constant ? 1 : 0;
  s.unknowns = x;
  if (p.zero_charge_constant) s.u0 = x.empty() ? cplx(0.0) : x[0];
  CVec body(x.begin() + std::min<std::size_t>(off, x.size()), x.end());
  auto parts = deinterlace(body, d);
  s.densities.clear();
  s.dof_per_segment.clear();
  s.column_scale.clear();
  for (std::size_t j = 0; j < d; ++j) {
    CVec c = parts[j];
    CVec sc = precond_diagonal(neumann, p.segments[j].half_length(), index_t(c.size()));
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= sc[i];
    std::size_t len = std::max<std::size_t>(chop_absolute(c, 0.0), 1);
    c.resize(len);
    s.dof_per_segment.push_back(index_t(len));
    s.column_scale.push_back(std::move(sc));
    s.densities.emplace_back(neumann ? Basis::WU() : Basis::WT(), std::move(c), p.segments[j]);
  }
  // residual of the truncated system
  CVec ax = s.system->op.apply(x);
  CVec b = s.system->rhs.coeffs;
  double r2 = 0.0;
  for (std::size_t i = 0; i < std::max(ax.size(), b.size()); ++i) {
    cplx v = (i < ax.size() ? ax[i] : 0.0) - (i < b.size() ? b[i] : 0.0);
    r2 += std::norm(v);
  }
  for (std::size_t f = 0; f < s.system->functionals.size(); ++f) {
    cplx v = -s.system->constraints[f];
    for (std::size_t c = 0; c < x.size(); ++c) v += s.system->functionals[f].entry(index_t(c)) * x[c];
    r2 += std::norm(v);
  }
  s.coefficient_residual = std::sqrt(r2);
  if (p.zero_charge_constant) {
    cplx q = 0.0;
    for (const auto& dens : s.densities) q += pi * density_mass(dens);
    s.charge = std::abs(q);
  }
}

}  // namespace

ScatteringSolution solve_scattering(const ScatteringProblem& p, const SolveOptions& opt) {
  std::size_t d = p.segments.size();
  if (d == 0) fail(ErrorKind::invalid_argument, "no segments");
  if (!p.incident.u) fail(ErrorKind::invalid_argument, "missing incident field");
  bool neumann = is_neumann(p);
  if (neumann && p.zero_charge_constant) fail(ErrorKind::invalid_argument, "charge constraint needs Dirichlet data");
  for (const auto& s : p.segments)
    if (s.a == s.b) fail(ErrorKind::invalid_argument, "degenerate segment");

  ScatteringSolution sol;
  sol.problem = std::make_shared<const ScatteringProblem>(p);
  auto t0 = std::chrono::steady_clock::now();

  std::vector<std::vector<BandedOperator>> blocks(d, std::vector<BandedOperator>(d));
  index_t nb = index_t(d * d);
  std::vector<std::string> errors(nb);
  // independent per pair
#pragma omp parallel for schedule(dynamic)
  for (index_t q = 0; q < nb; ++q) {
    std::size_t i = std::size_t(q) / d, j = std::size_t(q) % d;
    try {
      BandedOperator op = i == j ? self_block(p.kernel, p.segments[i], neumann, opt.kernel_tol)
                                 : coupling_block(p.kernel, p.segments[i], p.segments[j], neumann, opt.kernel_tol);
      blocks[i][j] = op_compose(op, precond_op(neumann, p.segments[j].half_length()));
    } catch (const std::exception& e) {
      errors[q] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) fail(ErrorKind::splitting_mismatch, e);

  std::vector<CVec> rhs(d);
  for (std::size_t i = 0; i < d; ++i) rhs[i] = boundary_rhs(p, p.segments[i]);

  auto sys = std::make_shared<AlmostBandedSystem>(interlace(blocks, std::vector<BlockFunctional>{}, rhs));
  if (p.zero_charge_constant) {
    sys->op = bordered(sys->op, {CVec(d, 1.0)});
    // total charge: pi h_j coefficient 0 of each WT density, preconditioned
    double w = 2.0 * pi / std::log(2.0);
    sys->functionals.emplace_back([d, w](index_t c) { return (c >= 1 && c <= index_t(d)) ? cplx(w) : cplx(0.0); },
                                  RowFunctional::Decay::finite_support, index_t(d) + 1);
    sys->constraints.push_back(0.0);
  }
  sol.system = sys;
  sol.timings.assembly = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  sol.cache = std::make_shared<QRFactorizationCache>(*sys, opt.qr);
  CoeffExpansion x = cached_solve(*sol.cache, sys->stacked_rhs(), opt.tol, &sol.info);
  sol.timings.solve = seconds_since(t0);
  sol.dof = sol.info.n;
  finish_solution(sol, x.coeffs);
  return sol;
}

ScatteringSolution resolve_with_incident(const ScatteringSolution& s, const Incident& inc, double tol) {
  ScatteringProblem p = *s.problem;
  p.incident = inc;
  ScatteringSolution out = s;
  out.problem = std::make_shared<const ScatteringProblem>(p);
  std::vector<CVec> rhs;
  for (const auto& seg : p.segments) rhs.push_back(boundary_rhs(p, seg));
  auto sys = std::make_shared<AlmostBandedSystem>(*s.system);
  sys->rhs = CoeffExpansion(sys->op.range(), interleave(rhs));
  out.system = sys;
  auto t0 = std::chrono::steady_clock::now();
  CoeffExpansion x = cached_solve(*out.cache, sys->stacked_rhs(), tol, &out.info);
  out.timings.assembly = 0.0;
  out.timings.solve = seconds_since(t0);
  out.dof = out.info.n;
  finish_solution(out, x.coeffs);
  return out;
}

// ---------------------------------------------------------------- fields

CVec ScatteringSolution::scattered(const CVec& points, Exec exec) const {
  const ScatteringProblem& p = *problem;
  CVec out(points.size(), 0.0);
  for (std::size_t j = 0; j < densities.size(); ++j) {
    CVec v;
    if (is_neumann(p)) {
      PDEKernel K = p.kernel;
      cplx ny = p.segments[j].normal();
      v = far_field_eval([&](cplx x, cplx y) { return K.dphi_dny(x, y, ny); }, densities[j], points, 0, exec);
    } else {
      v = layer_potential(p.kernel.phi_fn(), p.kernel.point_splitting(), densities[j], points, 1.2, exec);
      for (auto& z : v) z = -z;
    }
    for (std::size_t i = 0; i < points.size(); ++i) out[i] += v[i];
  }
  return out;
}

CVec ScatteringSolution::total(const CVec& points, Exec exec) const {
  CVec v = scattered(points, exec);
  for (std::size_t i = 0; i < points.size(); ++i) v[i] += problem->incident.u(points[i]);
  return v;
}

CVec ScatteringSolution::boundary_residual(std::size_t j, const std::vector<double>& local_points) const {
  const ScatteringProblem& p = *problem;
  const Segment& seg = p.segments.at(j);
  CVec out(local_points.size());
  if (is_neumann(p)) {
    CVec ax = system->op.apply(unknowns);
    CVec b = system->rhs.coeffs;
    ax.resize(std::max(ax.size(), b.size()), 0.0);
    for (std::size_t i = 0; i < b.size(); ++i) ax[i] -= b[i];
    auto parts = deinterlace(ax, p.segments.size());
    for (std::size_t i = 0; i < local_points.size(); ++i) out[i] = clenshaw_C(parts[j], 1, local_points[i]);
    return out;
  }
  CVec pts(local_points.size());
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = seg.to_global(local_points[i]);
  CVec us = scattered(pts, Exec::serial);
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = p.incident.u(pts[i]) + us[i] - u0.value_or(0.0);
  return out;
}

// ---------------------------------------------------------------- Faraday cage

std::vector<Segment> faraday_plates(int n, double r, bool normal) {
  if (n < 1 || !(r > 0.0)) fail(ErrorKind::invalid_argument, "need n >= 1 plates of positive radius");
  std::vector<Segment> s;
  for (int j = 0; j < n; ++j) {
    cplx c = std::polar(1.0, 2.0 * pi * double(j) / double(n));
    cplx dir = normal ? I * c : c;
    s.emplace_back(c - 2.0 * r * dir, c + 2.0 * r * dir);
  }
  return s;
}

ScatteringSolution solve_faraday(const std::vector<Segment>& plates, cplx source, const SolveOptions& opt) {
  for (const auto& s : plates)
    if (std::abs(s.to_local(source).imag()) < 1e-14 && std::abs(s.to_local(source).real()) <= 1.0)
      fail(ErrorKind::invalid_argument, "source lies on a plate");
  ScatteringProblem p;
  p.kernel = laplace_kernel();
  p.segments = plates;
  p.bc = BoundaryCondition::dirichlet;
  // log|x - y| = -2 pi Phi for the Laplace kernel
  p.incident = log_source(source);
  p.zero_charge_constant = true;
  return solve_scattering(p, opt);
}

double faraday_forward_error(const ScatteringSolution& s, int points_per_plate) {
  std::vector<double> t(points_per_plate);
  for (int i = 0; i < points_per_plate; ++i) t[i] = -0.95 + 1.9 * (double(i) + 0.37) / double(points_per_plate);
  double e = 0.0;
  for (std::size_t j = 0; j < s.densities.size(); ++j)
    for (const auto& v : s.boundary_residual(j, t)) e = std::max(e, std::abs(v));
  return e;
}

// ---------------------------------------------------------------- near-singular data

std::vector<cplx> bernstein_sources(double rho, int n, double phase) {
  std::vector<cplx> s(n);
  for (int j = 0; j < n; ++j) s[j] = joukowsky(std::polar(rho, phase + 2.0 * pi * double(j) / double(n)));
  return s;
}

namespace {

Incident sources_incident(const PDEKernel& K, const std::vector<cplx>& src, const CVec& charges) {
  Incident inc;
  inc.u = [K, src, charges](cplx x) {
    cplx v = 0.0;
    for (std::size_t j = 0; j < src.size(); ++j) v += charges[j % charges.size()] * K.phi(x, src[j]);
    return v;
  };
  return inc;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

}  // namespace

NearSingularReport near_singular_scenario(double k, double rho, int n_sources, const CVec& charges, int repeats,
                                          double tol) {
  if (!(rho > 1.0)) fail(ErrorKind::invalid_argument, "sources need rho > 1");
  if (charges.empty()) fail(ErrorKind::invalid_argument, "no charges");
  PDEKernel K = helmholtz_kernel(k);
  ScatteringProblem p;
  p.kernel = K;
  p.segments = {Segment()};
  p.incident = sources_incident(K, bernstein_sources(rho, n_sources), charges);
  SolveOptions opt;
  opt.tol = tol;
  NearSingularReport rep;
  rep.rho = rho;
  rep.k = k;
  rep.solution = solve_scattering(p, opt);
  rep.degree = rep.solution.dof;

  // fresh factorization vs reuse of a grown cache, rhs from rotated sources
  Incident other = sources_incident(K, bernstein_sources(rho, n_sources, 0.5), charges);
  ScatteringProblem p2 = p;
  p2.incident = other;
  std::vector<CVec> rhs2{adaptive_fit(other.u, 1e-16, p.segments[0]).coeffs};
  AlmostBandedSystem sys = *rep.solution.system;
  sys.rhs = CoeffExpansion(sys.op.range(), interleave(rhs2));
  CVec b = sys.stacked_rhs();
  std::vector<double> fresh, cached;
  for (int r = 0; r < std::max(1, repeats); ++r) {
    auto t0 = std::chrono::steady_clock::now();
    QRFactorizationCache c(sys);
    cached_solve(c, b, tol);
    fresh.push_back(seconds_since(t0));
    t0 = std::chrono::steady_clock::now();
    cached_solve(*rep.solution.cache, b, tol);
    cached.push_back(seconds_since(t0));
  }
  rep.fresh_seconds = median(fresh);
  rep.cached_seconds = median(cached);
  return rep;
}

// ---------------------------------------------------------------- committed geometries

std::vector<Segment> screens_k100() {
  return {Segment({-2.9, 2.2}, {-0.3, 2.9}),  Segment({0.4, 2.6}, {2.9, 1.3}),   Segment({-2.8, 1.2}, {-1.4, -1.2}),
          Segment({-0.9, 1.4}, {1.6, 0.2}),   Segment({2.6, 0.6}, {1.7, -2.0}),  Segment({-2.7, -2.0}, {-0.2, -2.9}),
          Segment({-0.8, -0.4}, {1.2, -2.2})};
}

std::vector<Segment> gravity_segments() {
  return {Segment({-10.0, -3.0}, {-5.0, 0.0}), Segment({-2.0, 5.0}, {2.0, 5.0}), Segment({5.0, 0.0}, {10.0, -3.0})};
}

}  // namespace sie
