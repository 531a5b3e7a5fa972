#include "sie/opalg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <ostream>

namespace sie {

namespace {

std::uint64_t next_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter++;
}

void require_same(const Basis& a, const Basis& b, const char* what) {
  if (a != b) fail(ErrorKind::invalid_argument, std::string(what) + ": basis mismatch " + a.name() + " vs " + b.name());
}

Basis c_basis(int lambda) { return lambda == 0 ? Basis::T() : Basis::C(lambda); }

}  // namespace

OperatorNode::OperatorNode(index_t lo, index_t up, Basis dom, Basis ran)
    : lower(lo), upper(up), domain(dom), range(ran), id(next_id()) {}

void OperatorNode::fill_row(index_t i, index_t j0, index_t j1, cplx* out) const {
  for (index_t j = j0; j < j1; ++j) out[j - j0] = entry(i, j);
}

cplx BandedOperator::entry(index_t i, index_t j) const {
  if (i < 0 || j < 0) return 0.0;
  if (j - i > node_->upper || i - j > node_->lower) return 0.0;
  return node_->entry(i, j);
}

void BandedOperator::row(index_t i, index_t j0, index_t j1, cplx* out) const {
  std::fill(out, out + (j1 - j0), cplx(0.0));
  index_t a = std::max({j0, i - node_->lower, index_t(0)});
  index_t b = std::min(j1, i + node_->upper + 1);
  if (a < b) node_->fill_row(i, a, b, out + (a - j0));
}

Eigen::MatrixXcd BandedOperator::section(index_t rows, index_t cols) const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(rows, cols);
  CVec buf(cols);
  for (index_t i = 0; i < rows; ++i) {
    row(i, 0, cols, buf.data());
    for (index_t j = 0; j < cols; ++j) m(i, j) = buf[j];
  }
  return m;
}

CVec BandedOperator::apply(const CVec& u) const {
  index_t n = index_t(u.size());
  index_t rows = n + std::max<index_t>(lower_bw(), 0);
  CVec out(rows, 0.0);
  CVec buf(n);
  for (index_t i = 0; i < rows; ++i) {
    row(i, 0, n, buf.data());
    cplx s = 0.0;
    for (index_t j = 0; j < n; ++j) s += buf[j] * u[j];
    out[i] = s;
  }
  return out;
}

// ---------------------------------------------------------------- functionals

RowFunctional::RowFunctional(std::function<cplx(index_t)> f, Decay d, index_t supp)
    : fn(std::move(f)), decay(d), support(supp), id(next_id()) {}

RowFunctional RowFunctional::dense(const CVec& row) {
  auto data = std::make_shared<CVec>(row);
  return RowFunctional([data](index_t j) { return j < index_t(data->size()) ? (*data)[j] : cplx(0.0); },
                       Decay::finite_support, index_t(row.size()));
}

CVec RowFunctional::values(index_t n) const {
  CVec v(n);
  for (index_t j = 0; j < n; ++j) v[j] = entry(j);
  return v;
}

std::uint64_t AlmostBandedSystem::fingerprint() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  mix(op ? op.id() : 0);
  for (const auto& f : functionals) mix(f.id);
  mix(functionals.size());
  return h;
}

CVec AlmostBandedSystem::stacked_rhs() const {
  CVec b(constraints);
  b.insert(b.end(), rhs.coeffs.begin(), rhs.coeffs.end());
  return b;
}

Eigen::MatrixXcd AlmostBandedSystem::section(index_t rows, index_t cols) const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(rows, cols);
  index_t nf = index_t(functionals.size());
  for (index_t i = 0; i < std::min(rows, nf); ++i)
    for (index_t j = 0; j < cols; ++j) m(i, j) = functionals[i].entry(j);
  if (rows > nf) m.bottomRows(rows - nf) = op.section(rows - nf, cols);
  return m;
}

// ---------------------------------------------------------------- nodes

namespace {

class LambdaNode : public OperatorNode {
 public:
  LambdaNode(index_t lo, index_t up, Basis d, Basis r, std::function<cplx(index_t, index_t)> f)
      : OperatorNode(lo, up, d, r), f_(std::move(f)) {}
  cplx entry(index_t i, index_t j) const override { return f_(i, j); }

 private:
  std::function<cplx(index_t, index_t)> f_;
};

class DerivativeNode : public OperatorNode {
 public:
  DerivativeNode(int lambda, cplx scale)
      : OperatorNode(0, lambda, Basis::T(), Basis::C(lambda)), lambda_(lambda) {
    double c = std::pow(2.0, lambda - 1);
    for (int k = 2; k < lambda; ++k) c *= k;
    factor_ = c * scale;
  }
  cplx entry(index_t i, index_t j) const override {
    return j == i + lambda_ ? factor_ * double(j) : cplx(0.0);
  }

 private:
  int lambda_;
  cplx factor_;
};

class ConversionNode : public OperatorNode {
 public:
  explicit ConversionNode(int lambda)
      : OperatorNode(0, 2, c_basis(lambda), Basis::C(lambda + 1)), lambda_(lambda) {}
  cplx entry(index_t i, index_t j) const override {
    if (lambda_ == 0) {
      if (j == i) return i == 0 ? 1.0 : 0.5;
      if (j == i + 2) return -0.5;
      return 0.0;
    }
    double lam = lambda_;
    if (j == i) return lam / (lam + double(i));
    if (j == i + 2) return -lam / (lam + double(i) + 2.0);
    return 0.0;
  }

 private:
  int lambda_;
};

// T-basis multiplication: half Toeplitz plus Hankel.
class MultiplicationTNode : public OperatorNode {
 public:
  explicit MultiplicationTNode(CVec a)
      : OperatorNode(index_t(a.size()) - 1, index_t(a.size()) - 1, Basis::T(), Basis::T()), a_(std::move(a)) {}
  cplx entry(index_t i, index_t j) const override {
    index_t d = std::abs(i - j);
    cplx v = d == 0 ? a_[0] : 0.5 * a_[d];
    index_t s = i + j;
    if (i >= 1 && s < index_t(a_.size())) v += 0.5 * a_[s];
    return v;
  }

 private:
  CVec a_;
};

// Ultraspherical multiplication. Each column is produced by running the
// three-term recurrence on the vectors M[C_k] e_j and memoized.
class MultiplicationCNode : public OperatorNode {
 public:
  MultiplicationCNode(CVec a, int lambda)
      : OperatorNode(index_t(a.size()) - 1, index_t(a.size()) - 1, Basis::C(lambda), Basis::C(lambda)),
        a_(std::move(a)),
        lambda_(lambda) {}

  cplx entry(index_t i, index_t j) const override {
    const CVec& col = column(j);
    index_t k = i - first_row(j);
    return (k >= 0 && k < index_t(col.size())) ? col[k] : cplx(0.0);
  }

 private:
  index_t first_row(index_t j) const { return std::max<index_t>(0, j - (index_t(a_.size()) - 1)); }

  const CVec& column(index_t j) const {
    std::lock_guard<std::mutex> lock(mu_);
    if (index_t(cols_.size()) <= j) cols_.resize(j + 1);
    auto& c = cols_[j];
    if (!c) c = std::make_unique<CVec>(build(j));
    return *c;
  }

  // x * v in the C(lambda) basis, v dense from index 0
  CVec times_x(const CVec& v) const {
    double lam = lambda_;
    CVec out(v.size() + 1, 0.0);
    for (std::size_t n = 0; n < v.size(); ++n) {
      if (v[n] == 0.0) continue;
      double nn = double(n);
      out[n + 1] += v[n] * ((nn + 1.0) / (2.0 * (nn + lam)));
      if (n >= 1) out[n - 1] += v[n] * ((nn + 2.0 * lam - 1.0) / (2.0 * (nn + lam)));
    }
    return out;
  }

  CVec build(index_t j) const {
    index_t m = index_t(a_.size()) - 1;
    double lam = lambda_;
    CVec acc(j + m + 1, 0.0);
    CVec prev(j + 1, 0.0), cur;
    prev[j] = 1.0;
    for (index_t i = 0; i <= j; ++i) acc[i] += a_[0] * prev[i];
    if (m >= 1) {
      cur = times_x(prev);
      for (auto& x : cur) x *= 2.0 * lam;
      for (std::size_t i = 0; i < cur.size(); ++i) acc[i] += a_[1] * cur[i];
    }
    for (index_t k = 1; k < m; ++k) {
      double kk = double(k);
      CVec next = times_x(cur);
      double alpha = 2.0 * (kk + lam) / (kk + 1.0);
      double gamma = (kk + 2.0 * lam - 1.0) / (kk + 1.0);
      for (auto& x : next) x *= alpha;
      for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= gamma * prev[i];
      for (std::size_t i = 0; i < next.size(); ++i) acc[i] += a_[k + 1] * next[i];
      prev = std::move(cur);
      cur = std::move(next);
    }
    index_t f = first_row(j);
    return CVec(acc.begin() + f, acc.end());
  }

  CVec a_;
  int lambda_;
  mutable std::mutex mu_;
  mutable std::vector<std::unique_ptr<CVec>> cols_;
};

class SumNode : public OperatorNode {
 public:
  SumNode(std::vector<BandedOperator> terms, index_t lo, index_t up)
      : OperatorNode(lo, up, terms[0].domain(), terms[0].range()), terms_(std::move(terms)) {}
  cplx entry(index_t i, index_t j) const override {
    cplx s = 0.0;
    for (const auto& t : terms_) s += t.entry(i, j);
    return s;
  }
  void fill_row(index_t i, index_t j0, index_t j1, cplx* out) const override {
    std::fill(out, out + (j1 - j0), cplx(0.0));
    CVec buf(j1 - j0);
    for (const auto& t : terms_) {
      t.row(i, j0, j1, buf.data());
      for (index_t k = 0; k < j1 - j0; ++k) out[k] += buf[k];
    }
  }

 private:
  std::vector<BandedOperator> terms_;
};

class ComposeNode : public OperatorNode {
 public:
  ComposeNode(BandedOperator l, BandedOperator r)
      : OperatorNode(l.lower_bw() + r.lower_bw(), l.upper_bw() + r.upper_bw(), r.domain(), l.range()),
        l_(std::move(l)),
        r_(std::move(r)) {}
  cplx entry(index_t i, index_t j) const override {
    index_t k0 = std::max({index_t(0), i - l_.lower_bw(), j - r_.upper_bw()});
    index_t k1 = std::min(i + l_.upper_bw(), j + r_.lower_bw());
    cplx s = 0.0;
    for (index_t k = k0; k <= k1; ++k) s += l_.entry(i, k) * r_.entry(k, j);
    return s;
  }
  void fill_row(index_t i, index_t j0, index_t j1, cplx* out) const override {
    std::fill(out, out + (j1 - j0), cplx(0.0));
    index_t k0 = std::max(index_t(0), i - l_.lower_bw());
    index_t k1 = i + l_.upper_bw();
    CVec lrow(k1 - k0 + 1);
    l_.row(i, k0, k1 + 1, lrow.data());
    CVec buf(j1 - j0);
    for (index_t k = k0; k <= k1; ++k) {
      cplx lik = lrow[k - k0];
      if (lik == 0.0) continue;
      index_t a = std::max(j0, k - r_.lower_bw());
      index_t b = std::min(j1, k + r_.upper_bw() + 1);
      if (a >= b) continue;
      r_.row(k, a, b, buf.data());
      for (index_t j = a; j < b; ++j) out[j - j0] += lik * buf[j - a];
    }
  }

 private:
  BandedOperator l_, r_;
};

class ScaleNode : public OperatorNode {
 public:
  ScaleNode(cplx s, BandedOperator a)
      : OperatorNode(a.lower_bw(), a.upper_bw(), a.domain(), a.range()), s_(s), a_(std::move(a)) {}
  cplx entry(index_t i, index_t j) const override { return s_ * a_.entry(i, j); }
  void fill_row(index_t i, index_t j0, index_t j1, cplx* out) const override {
    a_.row(i, j0, j1, out);
    for (index_t k = 0; k < j1 - j0; ++k) out[k] *= s_;
  }

 private:
  cplx s_;
  BandedOperator a_;
};

class InterlacedNode : public OperatorNode {
 public:
  InterlacedNode(std::vector<std::vector<BandedOperator>> blocks, index_t lo, index_t up, Basis d, Basis r)
      : OperatorNode(lo, up, d, r), blocks_(std::move(blocks)), d_(index_t(blocks_.size())) {}

  cplx entry(index_t i, index_t j) const override {
    const auto& b = blocks_[i % d_][j % d_];
    return b ? b.entry(i / d_, j / d_) : cplx(0.0);
  }

  void fill_row(index_t i, index_t j0, index_t j1, cplx* out) const override {
    std::fill(out, out + (j1 - j0), cplx(0.0));
    index_t p = i % d_, m = i / d_;
    CVec buf;
    for (index_t q = 0; q < d_; ++q) {
      const auto& b = blocks_[p][q];
      if (!b) continue;
      // block columns n with j = n d + q in [j0, j1)
      index_t n0 = j0 <= q ? 0 : (j0 - q + d_ - 1) / d_;
      index_t n1 = j1 <= q ? 0 : (j1 - 1 - q) / d_ + 1;
      n0 = std::max(n0, m - b.lower_bw());
      n1 = std::min(n1, m + b.upper_bw() + 1);
      if (n0 >= n1) continue;
      buf.resize(n1 - n0);
      b.row(m, n0, n1, buf.data());
      for (index_t n = n0; n < n1; ++n) out[n * d_ + q - j0] = buf[n - n0];
    }
  }

 private:
  std::vector<std::vector<BandedOperator>> blocks_;
  index_t d_;
};

class BorderedNode : public OperatorNode {
 public:
  BorderedNode(BandedOperator op, std::vector<CVec> cols, index_t lo)
      : OperatorNode(lo, op.upper_bw() + index_t(cols.size()), op.domain(), op.range()),
        op_(std::move(op)),
        cols_(std::move(cols)) {}

  cplx entry(index_t i, index_t j) const override {
    index_t k = index_t(cols_.size());
    if (j < k) return i < index_t(cols_[j].size()) ? cols_[j][i] : cplx(0.0);
    return op_.entry(i, j - k);
  }
  void fill_row(index_t i, index_t j0, index_t j1, cplx* out) const override {
    index_t k = index_t(cols_.size());
    index_t j = j0;
    for (; j < std::min(j1, k); ++j) out[j - j0] = entry(i, j);
    if (j < j1) op_.row(i, j - k, j1 - k, out + (j - j0));
  }

 private:
  BandedOperator op_;
  std::vector<CVec> cols_;
};

}  // namespace

// ---------------------------------------------------------------- factories

BandedOperator make_operator(index_t lower, index_t upper, Basis domain, Basis range,
                             std::function<cplx(index_t, index_t)> entry) {
  return BandedOperator(std::make_shared<LambdaNode>(lower, upper, domain, range, std::move(entry)));
}

BandedOperator identity_op(Basis b) {
  return make_operator(0, 0, b, b, [](index_t, index_t) { return cplx(1.0); });
}

BandedOperator diagonal_op(std::function<cplx(index_t)> d, Basis domain, Basis range) {
  return make_operator(0, 0, domain, range, [d = std::move(d)](index_t i, index_t) { return d(i); });
}

BandedOperator derivative_op(int lambda, const Segment& seg) {
  if (lambda < 1) fail(ErrorKind::invalid_argument, "derivative order must be >= 1");
  cplx scale = std::pow(2.0 / (seg.b - seg.a), lambda);
  return BandedOperator(std::make_shared<DerivativeNode>(lambda, scale));
}

BandedOperator conversion_op(int lambda) {
  if (lambda < 0) fail(ErrorKind::invalid_argument, "conversion order must be >= 0");
  return BandedOperator(std::make_shared<ConversionNode>(lambda));
}

BandedOperator conversion_chain(int from, int to) {
  if (from > to) fail(ErrorKind::invalid_argument, "conversion only raises the order");
  if (from == to) return identity_op(c_basis(from));
  BandedOperator op = conversion_op(from);
  for (int l = from + 1; l < to; ++l) op = op_compose(conversion_op(l), op);
  return op;
}

BandedOperator multiplication_op(const CoeffExpansion& a, int lambda) {
  if (lambda < 0) fail(ErrorKind::invalid_argument, "multiplication order must be >= 0");
  Basis want = c_basis(lambda);
  if (a.basis != want) fail(ErrorKind::invalid_argument, "multiplier must be in basis " + want.name());
  CVec c = a.coeffs.empty() ? CVec{0.0} : a.coeffs;
  if (lambda == 0) return BandedOperator(std::make_shared<MultiplicationTNode>(std::move(c)));
  return BandedOperator(std::make_shared<MultiplicationCNode>(std::move(c), lambda));
}

BandedOperator op_sum(const std::vector<BandedOperator>& terms) {
  if (terms.empty()) fail(ErrorKind::invalid_argument, "empty operator sum");
  if (terms.size() == 1) return terms[0];
  index_t lo = 0, up = 0;
  for (const auto& t : terms) {
    require_same(t.domain(), terms[0].domain(), "op_add");
    require_same(t.range(), terms[0].range(), "op_add");
    lo = std::max(lo, t.lower_bw());
    up = std::max(up, t.upper_bw());
  }
  return BandedOperator(std::make_shared<SumNode>(terms, lo, up));
}

BandedOperator op_add(const BandedOperator& a, const BandedOperator& b) { return op_sum({a, b}); }

BandedOperator op_compose(const BandedOperator& left, const BandedOperator& right) {
  require_same(left.domain(), right.range(), "op_compose");
  return BandedOperator(std::make_shared<ComposeNode>(left, right));
}

BandedOperator op_scale(cplx s, const BandedOperator& a) {
  return BandedOperator(std::make_shared<ScaleNode>(s, a));
}

CVec convert_coeffs(const CVec& t_coeffs, int to_lambda) {
  if (to_lambda == 0) return t_coeffs;
  CVec v = conversion_chain(0, to_lambda).apply(t_coeffs);
  v.resize(t_coeffs.size());  // conversion is upper triangular
  return v;
}

// ---------------------------------------------------------------- functionals

RowFunctional boundary_functional(FunctionalKind kind, Basis basis, cplx x) {
  using D = RowFunctional::Decay;
  if (kind == FunctionalKind::sum) {
    switch (basis.kind) {
      case BasisKind::WT: return RowFunctional([](index_t) { return cplx(1.0); }, D::finite_support, 1);
      case BasisKind::WU: return RowFunctional([](index_t) { return cplx(0.5); }, D::finite_support, 1);
      case BasisKind::T:
        return RowFunctional([](index_t n) {
          return n % 2 ? cplx(0.0) : cplx(2.0 / (1.0 - double(n) * double(n)) / pi);
        }, D::bounded);
      case BasisKind::C:
        if (basis.lambda == 1)
          return RowFunctional([](index_t n) { return n % 2 ? cplx(0.0) : cplx(2.0 / (double(n) + 1.0) / pi); },
                               D::bounded);
        break;
      case BasisKind::MT:
        return RowFunctional([](index_t n) {
          auto s = [](index_t k) { return k % 2 ? 0.0 : 2.0 / (1.0 - double(k) * double(k)) / pi; };
          return cplx(n >= 2 ? s(n) - s(n - 2) : s(n));
        }, D::bounded);
    }
    fail(ErrorKind::unsupported_basis, "sum functional not available in basis " + basis.name());
  }
  if (kind == FunctionalKind::eval_left) x = -1.0;
  if (kind == FunctionalKind::eval_right) x = 1.0;
  bool endpoint = x == cplx(1.0) || x == cplx(-1.0);
  switch (basis.kind) {
    case BasisKind::T:
      if (endpoint) {
        double s = x.real();
        return RowFunctional([s](index_t n) { return cplx(s < 0 && n % 2 ? -1.0 : 1.0); }, D::bounded);
      }
      return RowFunctional([x](index_t n) { return std::cos(double(n) * std::acos(x)); }, D::bounded);
    case BasisKind::MT:
      return RowFunctional([x](index_t n) {
        auto t = [x](index_t k) { return std::cos(double(k) * std::acos(x)); };
        return n >= 2 ? t(n) - t(n - 2) : t(n);
      }, D::bounded);
    case BasisKind::C:
      if (basis.lambda == 1) {
        if (endpoint) {
          double s = x.real();
          return RowFunctional([s](index_t n) { return cplx((s < 0 && n % 2 ? -1.0 : 1.0) * double(n + 1)); },
                               D::bounded);
        }
        return RowFunctional([x](index_t n) {
          CVec c(n + 1, 0.0);
          c[n] = 1.0;
          return clenshaw_C(c, 1, x);
        }, D::bounded);
      }
      break;
    case BasisKind::WU:
      if (endpoint) return RowFunctional([](index_t) { return cplx(0.0); }, D::finite_support, 0);
      return RowFunctional([x](index_t n) {
        cplx th = std::acos(x);
        return std::sin(double(n + 1) * th);
      }, D::bounded);
    case BasisKind::WT:
      if (endpoint) fail(ErrorKind::unsupported_basis, "point evaluation of WT at an endpoint");
      return RowFunctional([x](index_t n) { return std::cos(double(n) * std::acos(x)) / weight_sqrt(x); },
                           D::bounded);
  }
  fail(ErrorKind::unsupported_basis, "evaluation functional not available in basis " + basis.name());
}

// ---------------------------------------------------------------- ODEs

AlmostBandedSystem assemble_ode(const std::vector<CoeffExpansion>& coeff_funs,
                                const std::vector<RowFunctional>& bcs, const CVec& c,
                                const CoeffExpansion& f) {
  if (coeff_funs.empty()) fail(ErrorKind::invalid_argument, "assemble_ode needs coefficient functions");
  int order = int(coeff_funs.size()) - 1;
  if (int(bcs.size()) != order) fail(ErrorKind::invalid_argument, "need exactly one condition per order");
  if (c.size() != bcs.size()) fail(ErrorKind::invalid_argument, "condition values and functionals differ");
  if (f.basis != Basis::T()) fail(ErrorKind::invalid_argument, "right-hand side must be in basis T");
  std::vector<BandedOperator> terms;
  for (int k = 0; k <= order; ++k) {
    const auto& a = coeff_funs[k];
    if (a.basis != Basis::T()) fail(ErrorKind::invalid_argument, "coefficient functions must be in basis T");
    std::size_t len = chop(a.coeffs, 1e-300);
    if (max_abs(a.coeffs) == 0.0) continue;
    CoeffExpansion ac(c_basis(order), convert_coeffs(CVec(a.coeffs.begin(), a.coeffs.begin() + len), order));
    BandedOperator m = multiplication_op(ac, order);
    BandedOperator inner = k == 0 ? conversion_chain(0, order)
                                  : op_compose(conversion_chain(k, order), derivative_op(k, f.segment));
    terms.push_back(op_compose(m, inner));
  }
  if (terms.empty()) fail(ErrorKind::invalid_argument, "all coefficient functions vanish");
  AlmostBandedSystem sys;
  sys.functionals = bcs;
  sys.constraints = c;
  sys.op = op_sum(terms);
  sys.rhs = CoeffExpansion(sys.op.range(), convert_coeffs(f.coeffs, order), f.segment);
  sys.solution_basis = Basis::T();
  sys.segment = f.segment;
  return sys;
}

// ---------------------------------------------------------------- interlacing

BandedOperator interlace_operator(const std::vector<std::vector<BandedOperator>>& blocks) {
  index_t d = index_t(blocks.size());
  if (d == 0) fail(ErrorKind::invalid_argument, "interlace needs at least one block");
  index_t lo = 0, up = 0;
  bool any = false;
  Basis dom, ran;
  for (index_t p = 0; p < d; ++p) {
    if (index_t(blocks[p].size()) != d) fail(ErrorKind::invalid_argument, "ragged block grid");
    for (index_t q = 0; q < d; ++q) {
      const auto& b = blocks[p][q];
      if (!b) continue;
      if (!any) {
        dom = b.domain();
        ran = b.range();
        any = true;
      }
      lo = std::max(lo, d * b.lower_bw() + p - q);
      up = std::max(up, d * b.upper_bw() + q - p);
    }
  }
  if (!any) fail(ErrorKind::invalid_argument, "all blocks are empty");
  if (d == 1) return blocks[0][0];
  return BandedOperator(std::make_shared<InterlacedNode>(blocks, lo, up, dom, ran));
}

CVec interleave(const std::vector<CVec>& parts) {
  std::size_t d = parts.size(), len = 0;
  for (const auto& p : parts) len = std::max(len, p.size());
  CVec out(len * d, 0.0);
  for (std::size_t q = 0; q < d; ++q)
    for (std::size_t n = 0; n < parts[q].size(); ++n) out[n * d + q] = parts[q][n];
  // drop trailing padding zeros
  while (out.size() > 1 && out.back() == 0.0) out.pop_back();
  return out;
}

std::vector<CVec> deinterlace(const CVec& u, std::size_t d) {
  std::vector<CVec> parts(d);
  for (std::size_t q = 0; q < d; ++q)
    for (std::size_t j = q; j < u.size(); j += d) parts[q].push_back(u[j]);
  for (auto& p : parts)
    if (p.empty()) p.push_back(0.0);
  return parts;
}

AlmostBandedSystem interlace(const std::vector<std::vector<BandedOperator>>& blocks,
                             const std::vector<BlockFunctional>& functionals,
                             const std::vector<CVec>& rhs) {
  index_t d = index_t(blocks.size());
  if (index_t(rhs.size()) != d) fail(ErrorKind::invalid_argument, "one right-hand side per block row");
  AlmostBandedSystem sys;
  sys.op = interlace_operator(blocks);
  for (const auto& bf : functionals) {
    if (index_t(bf.parts.size()) != d) fail(ErrorKind::invalid_argument, "block functional needs d parts");
    auto parts = std::make_shared<std::vector<RowFunctional>>(bf.parts);
    bool finite = true;
    index_t supp = 0;
    for (index_t q = 0; q < d; ++q) {
      const auto& f = bf.parts[q];
      if (!f) continue;
      if (f.decay == RowFunctional::Decay::bounded) finite = false;
      else supp = std::max(supp, f.support * d);
    }
    sys.functionals.emplace_back(
        [parts, d](index_t j) {
          const auto& f = (*parts)[j % d];
          return f ? f.entry(j / d) : cplx(0.0);
        },
        finite ? RowFunctional::Decay::finite_support : RowFunctional::Decay::bounded, supp);
    sys.constraints.push_back(bf.value);
  }
  sys.rhs = CoeffExpansion(sys.op.range(), interleave(rhs));
  sys.solution_basis = sys.op.domain();
  return sys;
}

AlmostBandedSystem interlace(const std::vector<std::vector<BandedOperator>>& blocks,
                             const std::vector<std::vector<std::pair<RowFunctional, cplx>>>& functionals,
                             const std::vector<CVec>& rhs) {
  std::size_t d = blocks.size();
  if (functionals.size() != d) fail(ErrorKind::invalid_argument, "one functional list per block");
  std::vector<BlockFunctional> all;
  for (std::size_t q = 0; q < d; ++q) {
    for (const auto& [f, v] : functionals[q]) {
      BlockFunctional bf;
      bf.parts.resize(d);
      bf.parts[q] = f;
      bf.value = v;
      all.push_back(bf);
    }
  }
  return interlace(blocks, all, rhs);
}

BandedOperator bordered(const BandedOperator& op, const std::vector<CVec>& columns) {
  index_t k = index_t(columns.size());
  index_t lo = std::max<index_t>(0, op.lower_bw() - k);
  for (index_t c = 0; c < k; ++c) lo = std::max(lo, index_t(columns[c].size()) - 1 - c);
  return BandedOperator(std::make_shared<BorderedNode>(op, columns, lo));
}

void dump_section_csv(const BandedOperator& op, index_t rows, index_t cols, std::ostream& os) {
  os << "row,col,re,im\n";
  CVec buf(cols);
  for (index_t i = 0; i < rows; ++i) {
    op.row(i, 0, cols, buf.data());
    for (index_t j = 0; j < cols; ++j)
      if (buf[j] != 0.0) os << i << ',' << j << ',' << buf[j].real() << ',' << buf[j].imag() << '\n';
  }
}

}  // namespace sie
