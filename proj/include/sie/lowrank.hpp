#ifndef SIE_LOWRANK_HPP
#define SIE_LOWRANK_HPP

#include <Eigen/Dense>
#include <functional>
#include <optional>

#include "sie/chebkit.hpp"

namespace sie {

// f(x, y) at global points x on the target segment and y on the source segment
using BivariateFunction = std::function<cplx(cplx, cplx)>;

// Sum of products A_i(x) B_i(y); slices are T expansions in the local variables.
struct LowRankKernel {
  struct Term {
    CoeffExpansion a;  // over target
    CoeffExpansion b;  // over source
  };

  Segment target, source;
  std::vector<Term> terms;

  std::size_t rank() const { return terms.size(); }
  index_t degree_x() const;
  index_t degree_y() const;
  cplx operator()(cplx x, cplx y) const;
  cplx eval_local(cplx s, cplx t) const;
  // sum of a_i b_i^T, (degree_x+1) x (degree_y+1)
  Eigen::MatrixXcd coeff_matrix() const;

  static LowRankKernel constant(cplx c, const Segment& target = Segment(), const Segment& source = Segment());
  static LowRankKernel separable(const CoeffExpansion& a, const CoeffExpansion& b);
};

LowRankKernel scaled(const LowRankKernel& k, cplx s);

struct KernelSplitting {
  LowRankKernel A, B;
  std::optional<LowRankKernel> A_dd, B_dd;
  cplx diagonal_value = 0.0;
};

struct LowRankOptions {
  std::size_t initial_grid = 16;  // first-kind count; the second-kind direction gets one more
  std::size_t max_grid = 1024;
  std::size_t max_rank = 4096;
  double scale_floor = 0.0;  // tolerances are relative to max(|f| on the grid, scale_floor)
  Exec exec = Exec::parallel;
};

// rows: m first-kind points on target, columns: n second-kind points on source
Eigen::MatrixXcd skewed_grid_sample(const BivariateFunction& f, std::size_t m, std::size_t n,
                                    const Segment& target = Segment(), const Segment& source = Segment(),
                                    Exec exec = Exec::parallel);

LowRankKernel ge_lowrank(const BivariateFunction& f, double tol, const Segment& target = Segment(),
                         const Segment& source = Segment(), const LowRankOptions& opt = LowRankOptions());

// diagonal pivots on a symmetric first-kind grid; terms A_i(x) conj(A_i(y))
LowRankKernel cholesky_lowrank(const BivariateFunction& f, double tol, const Segment& seg = Segment(),
                               const LowRankOptions& opt = LowRankOptions());

Eigen::MatrixXcd tensor_interpolant(const BivariateFunction& f, std::size_t m, std::size_t n,
                                    const Segment& target = Segment(), const Segment& source = Segment());
LowRankKernel svd_recompress(const Eigen::MatrixXcd& coeffs, double tol, const Segment& target = Segment(),
                             const Segment& source = Segment());

std::size_t numerical_rank(const BivariateFunction& f, double tol, const Segment& target = Segment(),
                           const Segment& source = Segment());

// A = -R/(2 pi), B = phi - A log|x-y|, each by ge_lowrank
KernelSplitting extract_splitting(const BivariateFunction& phi, const BivariateFunction& riemann,
                                  const Segment& target, const Segment& source, double tol,
                                  const LowRankOptions& opt = LowRankOptions());

nlohmann::json to_json(const LowRankKernel& k);
LowRankKernel kernel_from_json(const nlohmann::json& j);

}  // namespace sie

#endif
