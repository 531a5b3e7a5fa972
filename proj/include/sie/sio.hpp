#ifndef SIE_SIO_HPP
#define SIE_SIO_HPP

#include <optional>

#include "sie/lowrank.hpp"
#include "sie/opalg.hpp"

namespace sie {

// arc: integrate against |dz|, complex: against dz. They differ by the phase of b - a.
enum class Measure { arc, complex };

enum class SingularKind { hadamard, hilbert, log, sigma };

// Hilbert, log and finite-part transforms of the weighted bases, normalized with 1/pi.
BandedOperator hilbert_op(Basis basis, const Segment& seg = Segment(), Measure m = Measure::arc);
BandedOperator log_op(Basis basis, const Segment& seg = Segment(), Measure m = Measure::arc);
BandedOperator hadamard_op(Basis basis, const Segment& seg = Segment(), Measure m = Measure::arc);
RowFunctional sigma_functional(Basis basis, const Segment& seg = Segment(), Measure m = Measure::arc);
BandedOperator singular_op(SingularKind kind, Basis basis, const Segment& seg = Segment(),
                           Measure m = Measure::arc);

// Range basis of the kernel-wrapped operator of the given kind.
Basis wrapped_range(SingularKind kind, Basis basis);

// sum_i M[A_i] Op M[B_i] on the canonical interval. Rows are formed from the
// coefficient matrix of K directly; the WT hadamard case falls back to composition.
BandedOperator kernel_wrapped_op(SingularKind kind, const LowRankKernel& K, Basis basis);
// Same operator built by composing multiplication operators (reference path).
BandedOperator kernel_wrapped_reference(SingularKind kind, const LowRankKernel& K, Basis basis);

struct SIEProblem {
  std::optional<LowRankKernel> K1, K2, K3, K4;  // hadamard, hilbert, log, sigma
  CoeffExpansion f;
  std::vector<std::pair<RowFunctional, cplx>> constraints;
  Basis solution_basis = Basis::WT();
};

AlmostBandedSystem assemble_sie(const SIEProblem& p);

BandedOperator dirichlet_preconditioner();
BandedOperator neumann_preconditioner();

}  // namespace sie

#endif
