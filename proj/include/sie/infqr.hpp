#ifndef SIE_INFQR_HPP
#define SIE_INFQR_HPP

#include <cstdint>

#include "sie/opalg.hpp"

namespace sie {

// SIE_MAX_N overrides the default 2^20
std::size_t default_max_n();

struct QROptions {
  std::size_t max_n = default_max_n();
  std::size_t initial = 64;  // first factorization chunk
};

struct SolveInfo {
  index_t n = 0;          // columns used (termination degree)
  double tail = 0.0;      // final transformed-rhs tail, absolute
  double rhs_norm = 0.0;
};

struct GivensRotation {
  index_t row;  // partner of the pivot row
  double c;
  cplx s;
};

// Growable Givens factorization of an almost-banded system. Row k of R is kept as
// dense entries on columns [k, k + width) plus multiples of the functionals beyond.
class QRFactorizationCache {
 public:
  explicit QRFactorizationCache(const AlmostBandedSystem& sys, const QROptions& opt = QROptions());

  index_t frontier() const { return frontier_; }
  std::size_t num_rotations() const { return rotations_.size(); }
  std::uint64_t fingerprint() const { return fingerprint_; }
  index_t width() const { return width_; }
  index_t lower() const { return lower_; }
  index_t num_functionals() const { return nf_; }
  const AlmostBandedSystem& system() const { return sys_; }
  const QROptions& options() const { return opt_; }

  // rotations for column k
  const GivensRotation* rotations_begin(index_t k) const { return rotations_.data() + rot_start_[k]; }
  const GivensRotation* rotations_end(index_t k) const { return rotations_.data() + rot_start_[k + 1]; }
  const cplx* r_row(index_t k) const { return r_dense_.data() + k * width_; }
  const cplx* r_alpha(index_t k) const { return r_alpha_.data() + k * nf_; }
  cplx functional_value(index_t f, index_t c) const;

  void extend(index_t new_frontier);

 private:
  void ensure_functional_values(index_t upto) const;
  void load_row(index_t r, index_t k, cplx* dense, cplx* alpha) const;

  AlmostBandedSystem sys_;
  QROptions opt_;
  std::uint64_t fingerprint_;
  index_t nf_, lower_, upper_, width_, active_;
  index_t frontier_ = 0;

  std::vector<GivensRotation> rotations_;
  std::vector<std::size_t> rot_start_{0};
  std::vector<cplx> r_dense_, r_alpha_;

  // working rows k .. k + active - 1 (circular by row index)
  std::vector<cplx> w_dense_, w_alpha_;
  mutable std::vector<CVec> fvals_;
};

CoeffExpansion adaptive_qr_solve(const AlmostBandedSystem& sys, double tol, SolveInfo* info = nullptr,
                                 const QROptions& opt = QROptions());

// no-op when new_frontier <= frontier; throws cache_mismatch for a different system
void qr_extend(QRFactorizationCache& cache, const AlmostBandedSystem& sys, index_t new_frontier);

// rhs is stacked: constraint values then operator-range coefficients. Extends the cache when needed.
CoeffExpansion cached_solve(QRFactorizationCache& cache, const CVec& rhs, double tol, SolveInfo* info = nullptr);

// Several right-hand sides against one cache. The parallel version fans out over
// right-hand sides; extension happens serially beforehand.
std::vector<CoeffExpansion> cached_solve_batch(QRFactorizationCache& cache, const std::vector<CVec>& rhs, double tol,
                                               Exec exec = Exec::parallel);

}  // namespace sie

#endif
