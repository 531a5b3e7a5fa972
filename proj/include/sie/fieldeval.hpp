#ifndef SIE_FIELDEVAL_HPP
#define SIE_FIELDEVAL_HPP

#include <iosfwd>

#include "sie/lowrank.hpp"

namespace sie {

// z - sqrt(z-1) sqrt(z+1); maps the slit plane into the unit disk
cplx joukowsky_inv_plus(cplx z);
cplx joukowsky(cplx q);
// Bernstein ellipse parameter of z with respect to [-1, 1]
double bernstein_rho(cplx z);

struct JoukowskyPoint {
  cplx z, q;
  explicit JoukowskyPoint(cplx z_) : z(z_), q(joukowsky_inv_plus(z_)) {}
};

// Canonical interval. WU densities are U_k sqrt(1-x^2) coefficients, WT densities
// are given as modified coefficients of T^_k / sqrt(1-x^2).
cplx cauchy_WU(const CVec& d, cplx z);
cplx cauchy_WT(const CVec& d_mt, cplx z);
cplx log_WU(const CVec& d, cplx z);
cplx log_WT(const CVec& d_mt, cplx z);

// (1/pi) int log|y - z| f(y) |dy| for a WT or WU density living on its segment.
cplx log_transform_interval(const CoeffExpansion& density, cplx z);
// (1/pi) int f(y) |dy|
cplx density_mass(const CoeffExpansion& density);

// Smooth factors of a kernel Phi = A log|x-y| + B, valid for any x in the plane.
struct PointSplitting {
  BivariateFunction A, B;
};

// int Phi(z, y) f(y) |dy| by Gauss-Chebyshev quadrature on `nodes` points (0: automatic)
CVec far_field_eval(const BivariateFunction& phi, const CoeffExpansion& density, const CVec& targets,
                    std::size_t nodes = 0, Exec exec = Exec::parallel);
// Same integral with the log part integrated exactly after multiplying by A(z, .)
CVec near_field_eval(const PointSplitting& split, const CoeffExpansion& density, const CVec& targets,
                     Exec exec = Exec::parallel);

// Chooses near or far by the Bernstein parameter (near inside rho_switch).
CVec layer_potential(const BivariateFunction& phi, const PointSplitting& split, const CoeffExpansion& density,
                     const CVec& targets, double rho_switch = 1.2, Exec exec = Exec::parallel);

// row-major over (x, y), header re_z,im_z,re_u,im_u
void write_grid_csv(std::ostream& os, const CVec& points, const CVec& values);

}  // namespace sie

#endif
