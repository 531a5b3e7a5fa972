#ifndef SIE_OPALG_HPP
#define SIE_OPALG_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>

#include "sie/chebkit.hpp"

namespace sie {

// Lazy banded operator on coefficient sequences. Subclasses only see
// in-band, nonnegative (i, j).
class OperatorNode {
 public:
  OperatorNode(index_t lower, index_t upper, Basis domain, Basis range);
  virtual ~OperatorNode() = default;

  virtual cplx entry(index_t i, index_t j) const = 0;
  // out[j - j0] for j in [j0, j1), a subrange of row i's band
  virtual void fill_row(index_t i, index_t j0, index_t j1, cplx* out) const;

  index_t lower, upper;
  Basis domain, range;
  std::uint64_t id;
};

class BandedOperator {
 public:
  BandedOperator() = default;
  explicit BandedOperator(std::shared_ptr<const OperatorNode> node) : node_(std::move(node)) {}

  cplx entry(index_t i, index_t j) const;
  // dense row slice [j0, j1), zeros outside the band
  void row(index_t i, index_t j0, index_t j1, cplx* out) const;
  index_t lower_bw() const { return node_->lower; }
  index_t upper_bw() const { return node_->upper; }
  Basis domain() const { return node_->domain; }
  Basis range() const { return node_->range; }
  std::uint64_t id() const { return node_->id; }
  const OperatorNode* node() const { return node_.get(); }
  explicit operator bool() const { return bool(node_); }

  Eigen::MatrixXcd section(index_t rows, index_t cols) const;
  // applies to a finite vector; output length u.size() + lower_bw
  CVec apply(const CVec& u) const;

 private:
  std::shared_ptr<const OperatorNode> node_;
};

struct RowFunctional {
  enum class Decay { finite_support, bounded };

  std::function<cplx(index_t)> fn;
  Decay decay = Decay::bounded;
  index_t support = 0;  // entries vanish for j >= support when finite
  std::uint64_t id = 0;

  RowFunctional() = default;
  RowFunctional(std::function<cplx(index_t)> f, Decay d, index_t supp = 0);
  static RowFunctional dense(const CVec& row);

  cplx entry(index_t j) const {
    if (decay == Decay::finite_support && j >= support) return 0.0;
    return fn(j);
  }
  CVec values(index_t n) const;
  explicit operator bool() const { return bool(fn); }
};

struct AlmostBandedSystem {
  std::vector<RowFunctional> functionals;
  CVec constraints;
  BandedOperator op;
  CoeffExpansion rhs;  // in op.range()
  Basis solution_basis = Basis::T();
  Segment segment;

  std::size_t num_functionals() const { return functionals.size(); }
  std::uint64_t fingerprint() const;
  // full right-hand side: constraints followed by rhs coefficients
  CVec stacked_rhs() const;
  // rows: functionals then operator rows, n rows total
  Eigen::MatrixXcd section(index_t rows, index_t cols) const;
};

// ---------------------------------------------------------------- constructors

BandedOperator make_operator(index_t lower, index_t upper, Basis domain, Basis range,
                             std::function<cplx(index_t, index_t)> entry);
BandedOperator identity_op(Basis b);
BandedOperator diagonal_op(std::function<cplx(index_t)> d, Basis domain, Basis range);

BandedOperator derivative_op(int lambda, const Segment& seg = Segment());
BandedOperator conversion_op(int lambda);
// S_{to-1} ... S_{from}; identity when from == to
BandedOperator conversion_chain(int from, int to);
BandedOperator multiplication_op(const CoeffExpansion& a, int lambda);

BandedOperator op_add(const BandedOperator& a, const BandedOperator& b);
BandedOperator op_sum(const std::vector<BandedOperator>& terms);
BandedOperator op_compose(const BandedOperator& left, const BandedOperator& right);
BandedOperator op_scale(cplx s, const BandedOperator& a);

// T-coefficients converted into C(lambda) coefficients
CVec convert_coeffs(const CVec& t_coeffs, int to_lambda);

enum class FunctionalKind { eval_left, eval_right, eval_at, sum };
RowFunctional boundary_functional(FunctionalKind kind, Basis basis, cplx x = 0.0);

AlmostBandedSystem assemble_ode(const std::vector<CoeffExpansion>& coeff_funs,
                                const std::vector<RowFunctional>& bcs, const CVec& c,
                                const CoeffExpansion& f);

// A functional acting on all d blocks of an interlaced system; missing parts are zero.
struct BlockFunctional {
  std::vector<RowFunctional> parts;
  cplx value = 0.0;
};

AlmostBandedSystem interlace(const std::vector<std::vector<BandedOperator>>& blocks,
                             const std::vector<BlockFunctional>& functionals,
                             const std::vector<CVec>& rhs);
// per-block functional lists, each acting on its own block only
AlmostBandedSystem interlace(const std::vector<std::vector<BandedOperator>>& blocks,
                             const std::vector<std::vector<std::pair<RowFunctional, cplx>>>& functionals,
                             const std::vector<CVec>& rhs);

BandedOperator interlace_operator(const std::vector<std::vector<BandedOperator>>& blocks);
std::vector<CVec> deinterlace(const CVec& u, std::size_t d);
CVec interleave(const std::vector<CVec>& parts);

// Extra leading unknowns: columns[c] is the (finite) column of the new unknown c.
BandedOperator bordered(const BandedOperator& op, const std::vector<CVec>& columns);

void dump_section_csv(const BandedOperator& op, index_t rows, index_t cols, std::ostream& os);

}  // namespace sie

#endif
