#ifndef SIE_PHYSICS_HPP
#define SIE_PHYSICS_HPP

#include <memory>
#include <optional>

#include "sie/fieldeval.hpp"
#include "sie/infqr.hpp"
#include "sie/lowrank.hpp"
#include "sie/sio.hpp"

namespace sie {

// Points of the plane are complex numbers x1 + i x2.

// ---------------------------------------------------------------- special functions
double bessel_j0(double x);
double bessel_j1(double x);
double bessel_y0(double x);
double bessel_y1(double x);
cplx hankel1_0(double x);
cplx hankel1_1(double x);

// Smooth remainder of (i/4) H0(k r) after removing -J0(k r) log(r) / (2 pi), and
// the matching remainder of the flat normal-normal kernel.
cplx helmholtz_smooth(double k, double r);
cplx helmholtz_smooth_dd(double k, double r);

// ---------------------------------------------------------------- gravity Helmholtz
// Coefficients [V]_{ij}, 0 <= i, j <= n, of the Riemann function in u = z - z0, v = zeta - zeta0.
std::vector<std::vector<cplx>> gravity_riemann_coefficients(cplx e_tilde, int n);
// nmax = 0 picks the truncation adaptively
cplx gravity_riemann_series(cplx z, cplx zeta, cplx z0, cplx zeta0, double E, int nmax = 0);
cplx gravity_riemann_uv(cplx u, cplx v, cplx e_tilde, int nmax = 0);

struct BromwichOptions {
  double radius = 0.0;  // 0: automatic
  std::size_t max_nodes = std::size_t(1) << 16;
  double tol = 1e-14;
};
// Inverse Laplace transform on a circle enclosing the branch cut of the transform.
cplx gravity_riemann_bromwich(cplx u, cplx v, cplx e_tilde, const BromwichOptions& opt = BromwichOptions());

struct ContourOptions {
  double eps = 0.5;  // maximal deformation angle
  double tol = 1e-14;
};
cplx gravity_fundamental(cplx x, cplx y, double E, const ContourOptions& opt = ContourOptions());

// ---------------------------------------------------------------- kernels
enum class Family { laplace, helmholtz, gravity };

struct PDEKernel {
  Family family = Family::laplace;
  double k = 0.0;  // helmholtz
  double E = 0.0;  // gravity

  cplx phi(cplx x, cplx y) const;
  cplx riemann(cplx x, cplx y) const;
  // Phi = A log|x-y| + B, pointwise
  cplx A(cplx x, cplx y) const { return -riemann(x, y) / (2.0 * pi); }
  cplx B(cplx x, cplx y) const;
  // d/dn_y Phi and d^2/dn_x dn_y Phi for unit normals nx, ny (laplace, helmholtz)
  cplx dphi_dny(cplx x, cplx y, cplx ny) const;
  cplx d2phi(cplx x, cplx y, cplx nx, cplx ny) const;
  // flat-segment split of the normal-normal kernel: -A/r^2 + A'' log r + B''
  cplx A_dd(cplx x, cplx y) const;
  cplx B_dd(cplx x, cplx y) const;

  std::string name() const;
  PointSplitting point_splitting() const;
  BivariateFunction phi_fn() const;
};

PDEKernel laplace_kernel();
PDEKernel helmholtz_kernel(double k);
PDEKernel gravity_kernel(double E);

// Splitting of the self-interaction kernel on one segment (A_dd, B_dd filled when neumann).
KernelSplitting segment_splitting(const PDEKernel& K, const Segment& seg, double tol, bool neumann);

// ---------------------------------------------------------------- scattering
enum class BoundaryCondition { dirichlet, neumann };

struct Incident {
  std::function<cplx(cplx)> u;
  std::function<cplx(cplx, cplx)> dn;  // normal derivative at x along the unit normal n
};

Incident plane_wave(double k, cplx direction);
Incident point_source(const PDEKernel& K, cplx source, cplx strength = 1.0);
Incident log_source(cplx source);

struct ScatteringProblem {
  PDEKernel kernel;
  std::vector<Segment> segments;
  BoundaryCondition bc = BoundaryCondition::dirichlet;
  Incident incident;
  bool zero_charge_constant = false;  // Faraday: unknown constant plus total charge zero
};

struct Timings {
  double assembly = 0.0;
  double solve = 0.0;
  double evaluation_per_target = 0.0;
};

struct ScatteringSolution {
  std::vector<CoeffExpansion> densities;  // WT (dirichlet) or WU (neumann)
  std::optional<cplx> u0;
  index_t dof = 0;
  std::vector<index_t> dof_per_segment;
  Timings timings;
  SolveInfo info;
  double coefficient_residual = 0.0;  // ||A x - b||_2 of the interlaced system
  double charge = 0.0;                // |total charge| when constrained

  std::shared_ptr<const ScatteringProblem> problem;
  std::shared_ptr<AlmostBandedSystem> system;
  std::shared_ptr<QRFactorizationCache> cache;
  std::vector<CVec> column_scale;  // preconditioner diagonals per block
  CVec unknowns;                   // interlaced, preconditioned variables

  // u^s at points off the segments
  CVec scattered(const CVec& points, Exec exec = Exec::parallel) const;
  CVec total(const CVec& points, Exec exec = Exec::parallel) const;
  // boundary residual at points on segment j: dirichlet/faraday value, neumann normal derivative
  CVec boundary_residual(std::size_t j, const std::vector<double>& local_points) const;
};

struct SolveOptions {
  double tol = 1e-14;
  double kernel_tol = 1e-14;
  QROptions qr;
};

ScatteringSolution solve_scattering(const ScatteringProblem& p, const SolveOptions& opt = SolveOptions());

std::vector<Segment> faraday_plates(int n, double r, bool normal);
ScatteringSolution solve_faraday(const std::vector<Segment>& plates, cplx source, const SolveOptions& opt = SolveOptions());
// max pointwise |u0 + S sigma - u^i| over sample points of every plate
double faraday_forward_error(const ScatteringSolution& s, int points_per_plate = 20);

// New right-hand side against the cached factorization of a solved problem.
ScatteringSolution resolve_with_incident(const ScatteringSolution& s, const Incident& inc, double tol);

struct NearSingularReport {
  double rho = 0.0, k = 0.0;
  index_t degree = 0;
  double fresh_seconds = 0.0, cached_seconds = 0.0;
  ScatteringSolution solution;
};
std::vector<cplx> bernstein_sources(double rho, int n, double phase = 0.0);
NearSingularReport near_singular_scenario(double k, double rho, int n_sources, const CVec& charges,
                                          int repeats = 5, double tol = 1e-13);

// committed scenario geometries
std::vector<Segment> screens_k100();
std::vector<Segment> gravity_segments();

}  // namespace sie

#endif
