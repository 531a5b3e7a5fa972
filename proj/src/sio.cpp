#include "sie/sio.hpp"

#include <cmath>

namespace sie {

namespace {

struct Nz {
  index_t k;
  cplx v;
};

// Up to two nonzeros per row/column of the canonical operators.
struct Inner {
  SingularKind kind;
  bool wu;

  index_t lower() const {
    if (!wu) return 0;
    if (kind == SingularKind::hilbert) return 1;
    if (kind == SingularKind::log) return 2;
    return 0;
  }
  index_t upper() const {
    if (!wu && kind == SingularKind::hilbert) return 1;
    if (!wu && kind == SingularKind::hadamard) return 2;
    return 0;
  }

  int row(index_t i, Nz* out) const {
    if (!wu) {
      switch (kind) {
        case SingularKind::log:
          out[0] = {i, i == 0 ? cplx(-std::log(2.0)) : cplx(-1.0 / double(i))};
          return 1;
        case SingularKind::sigma:
          if (i != 0) return 0;
          out[0] = {0, 1.0};
          return 1;
        case SingularKind::hilbert:
          out[0] = {i + 1, 1.0};
          return 1;
        case SingularKind::hadamard:
          out[0] = {i + 2, 2.0};
          return 1;
      }
    }
    switch (kind) {
      case SingularKind::log: {
        int n = 0;
        out[n++] = {i, i == 0 ? cplx(-0.5 * std::log(2.0)) : cplx(-0.5 / double(i))};
        if (i >= 2) out[n++] = {i - 2, 0.5 / double(i)};
        return n;
      }
      case SingularKind::sigma:
        if (i != 0) return 0;
        out[0] = {0, 0.5};
        return 1;
      case SingularKind::hilbert:
        if (i == 0) return 0;
        out[0] = {i - 1, -1.0};
        return 1;
      case SingularKind::hadamard:
        out[0] = {i, -double(i + 1)};
        return 1;
    }
    return 0;
  }

  cplx entry(index_t i, index_t j) const {
    Nz buf[2];
    int n = row(i, buf);
    for (int k = 0; k < n; ++k)
      if (buf[k].k == j) return buf[k].v;
    return 0.0;
  }
};

Basis range_of(SingularKind kind, bool wu) {
  if (kind == SingularKind::hilbert) return wu ? Basis::T() : Basis::U();
  if (kind == SingularKind::hadamard) return wu ? Basis::U() : Basis::C(2);
  return Basis::T();
}

bool weighted_wu(Basis b) {
  if (b.kind == BasisKind::WT) return false;
  if (b.kind == BasisKind::WU) return true;
  fail(ErrorKind::unsupported_basis, "singular integral operators need basis WT or WU, got " + b.name());
}

// T_a * P_b with P = T or U.
// targets(a, b): c with P_c in the product; find_a(c, b), find_b(c, a) invert it.
struct Term {
  index_t k;
  double w;
};

int t_targets(index_t a, index_t b, Term* out) {
  out[0] = {a + b, 0.5};
  out[1] = {std::abs(a - b), 0.5};
  return 2;
}
int t_find(index_t c, index_t other, Term* out) {  // symmetric in the two factors
  int n = 0;
  if (c - other >= 0) out[n++] = {c - other, 0.5};
  out[n++] = {other + c, 0.5};
  if (c > 0 && other - c >= 0) out[n++] = {other - c, 0.5};
  return n;
}
int u_targets(index_t a, index_t b, Term* out) {
  int n = 0;
  out[n++] = {b + a, 0.5};
  if (b >= a) out[n++] = {b - a, 0.5};
  if (a >= b + 2) out[n++] = {a - b - 2, -0.5};
  return n;
}
int u_find_a(index_t c, index_t b, Term* out) {
  int n = 0;
  if (c - b >= 0) out[n++] = {c - b, 0.5};
  if (b - c >= 0) out[n++] = {b - c, 0.5};
  out[n++] = {b + c + 2, -0.5};
  return n;
}
int u_find_b(index_t c, index_t a, Term* out) {
  int n = 0;
  if (c - a >= 0) out[n++] = {c - a, 0.5};
  out[n++] = {c + a, 0.5};
  if (a - c - 2 >= 0) out[n++] = {a - c - 2, -0.5};
  return n;
}

using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class KernelWrappedNode : public OperatorNode {
 public:
  KernelWrappedNode(SingularKind kind, bool wu, RowMat c, index_t lo, index_t up, Basis dom, Basis ran)
      : OperatorNode(lo, up, dom, ran),
        inner_{kind, wu},
        c_(std::move(c)),
        in_u_(wu),
        out_u_(ran == Basis::U()) {}

  cplx entry(index_t m, index_t n) const override {
    index_t np = c_.rows(), nq = c_.cols();
    cplx s = 0.0;
    Term in[3], outp[3];
    for (index_t q = 0; q < nq; ++q) {
      int ni = in_u_ ? u_targets(q, n, in) : t_targets(q, n, in);
      for (int a = 0; a < ni; ++a) {
        index_t j = in[a].k;
        // inner column j: rows i with Op(i, j) != 0
        for (index_t i = std::max<index_t>(0, j - inner_.upper()); i <= j + inner_.lower(); ++i) {
          cplx d = inner_.entry(i, j);
          if (d == 0.0) continue;
          int no = out_u_ ? u_find_a(m, i, outp) : t_find(m, i, outp);
          for (int b = 0; b < no; ++b)
            if (outp[b].k < np) s += c_(outp[b].k, q) * (in[a].w * d * outp[b].w);
        }
      }
    }
    return s;
  }

  void fill_row(index_t m, index_t n0, index_t n1, cplx* out) const override {
    std::fill(out, out + (n1 - n0), cplx(0.0));
    index_t np = c_.rows(), nq = c_.cols();
    index_t i0 = std::max<index_t>(0, m - np - 2), i1 = m + np + 2;
    // R2(j, :) = sum_i [row m of M_out](i) * Op(i, j) * C-rows
    index_t j0 = std::max<index_t>(0, i0 - inner_.lower()), j1 = i1 + inner_.upper();
    RowMat r2 = RowMat::Zero(j1 - j0 + 1, nq);
    Eigen::Matrix<cplx, 1, Eigen::Dynamic> r1(nq);
    Term outp[3], inb[3];
    Nz ops[2];
    bool any = false;
    for (index_t i = i0; i <= i1; ++i) {
      int nops = inner_.row(i, ops);
      if (nops == 0) continue;
      int no = out_u_ ? u_find_a(m, i, outp) : t_find(m, i, outp);
      r1.setZero();
      bool hit = false;
      for (int b = 0; b < no; ++b)
        if (outp[b].k < np) {
          r1 += outp[b].w * c_.row(outp[b].k);
          hit = true;
        }
      if (!hit) continue;
      for (int o = 0; o < nops; ++o) {
        r2.row(ops[o].k - j0) += ops[o].v * r1;
        any = true;
      }
    }
    if (!any) return;
    for (index_t j = j0; j <= j1; ++j) {
      const auto rj = r2.row(j - j0);
      for (index_t q = 0; q < nq; ++q) {
        cplx v = rj(q);
        if (v == 0.0) continue;
        int nb = in_u_ ? u_find_b(j, q, inb) : t_find(j, q, inb);
        for (int b = 0; b < nb; ++b) {
          index_t n = inb[b].k;
          if (n >= n0 && n < n1) out[n - n0] += inb[b].w * v;
        }
      }
    }
  }

 private:
  Inner inner_;
  RowMat c_;
  bool in_u_, out_u_;
};

BandedOperator canonical_op(SingularKind kind, bool wu) {
  Inner in{kind, wu};
  Basis dom = wu ? Basis::WU() : Basis::WT();
  return make_operator(in.lower(), in.upper(), dom, range_of(kind, wu),
                       [in](index_t i, index_t j) { return in.entry(i, j); });
}

BandedOperator retype(const BandedOperator& op, Basis dom, Basis ran) {
  return make_operator(op.lower_bw(), op.upper_bw(), dom, ran, [op](index_t i, index_t j) { return op.entry(i, j); });
}

}  // namespace

Basis wrapped_range(SingularKind kind, Basis basis) { return range_of(kind, weighted_wu(basis)); }

BandedOperator singular_op(SingularKind kind, Basis basis, const Segment& seg, Measure m) {
  bool wu = weighted_wu(basis);
  BandedOperator op = canonical_op(kind, wu);
  cplx H = seg.half();
  double absH = std::abs(H);
  cplx phase = m == Measure::arc ? cplx(absH) / H : cplx(1.0);
  cplx w = m == Measure::arc ? cplx(absH) : H;
  switch (kind) {
    case SingularKind::hilbert:
      return phase == 1.0 ? op : op_scale(phase, op);
    case SingularKind::hadamard:
      return op_scale(phase / H, op);
    case SingularKind::sigma:
      return w == 1.0 ? op : op_scale(w, op);
    case SingularKind::log: {
      if (seg.canonical() || absH == 1.0) return w == 1.0 ? op : op_scale(w, op);
      double shift = std::log(absH) * (wu ? 0.5 : 1.0);
      Inner in{kind, wu};
      return make_operator(in.lower(), in.upper(), basis, Basis::T(), [in, shift, w](index_t i, index_t j) {
        cplx v = in.entry(i, j);
        if (i == 0 && j == 0) v += shift;
        return w * v;
      });
    }
  }
  return op;
}

BandedOperator hilbert_op(Basis basis, const Segment& seg, Measure m) {
  return singular_op(SingularKind::hilbert, basis, seg, m);
}
BandedOperator log_op(Basis basis, const Segment& seg, Measure m) {
  return singular_op(SingularKind::log, basis, seg, m);
}
BandedOperator hadamard_op(Basis basis, const Segment& seg, Measure m) {
  return singular_op(SingularKind::hadamard, basis, seg, m);
}

RowFunctional sigma_functional(Basis basis, const Segment& seg, Measure m) {
  bool wu = weighted_wu(basis);
  cplx w = m == Measure::arc ? cplx(seg.half_length()) : seg.half();
  cplx v = w * (wu ? 0.5 : 1.0);
  return RowFunctional([v](index_t) { return v; }, RowFunctional::Decay::finite_support, 1);
}

BandedOperator kernel_wrapped_reference(SingularKind kind, const LowRankKernel& K, Basis basis) {
  if (K.rank() == 0) fail(ErrorKind::invalid_argument, "kernel of rank zero");
  bool wu = weighted_wu(basis);
  BandedOperator inner = canonical_op(kind, wu);
  Basis ran = range_of(kind, wu);
  int out_order = ran.order();
  std::vector<BandedOperator> terms;
  for (const auto& t : K.terms) {
    CVec b = wu ? convert_coeffs(t.b.coeffs, 1) : t.b.coeffs;
    BandedOperator mb = retype(multiplication_op(CoeffExpansion(wu ? Basis::U() : Basis::T(), b), wu ? 1 : 0), basis, basis);
    CVec a = convert_coeffs(t.a.coeffs, out_order);
    BandedOperator ma = multiplication_op(CoeffExpansion(ran, a), out_order);
    terms.push_back(op_compose(ma, op_compose(inner, mb)));
  }
  return op_sum(terms);
}

BandedOperator kernel_wrapped_op(SingularKind kind, const LowRankKernel& K, Basis basis) {
  if (K.rank() == 0) fail(ErrorKind::invalid_argument, "kernel of rank zero");
  bool wu = weighted_wu(basis);
  Basis ran = range_of(kind, wu);
  if (ran == Basis::C(2)) return kernel_wrapped_reference(kind, K, basis);
  Eigen::MatrixXcd c = K.coeff_matrix();
  index_t dp = c.rows() - 1, dq = c.cols() - 1;
  Inner in{kind, wu};
  index_t lo = dp + dq + in.lower(), up = dp + dq + in.upper();
  if (kind == SingularKind::sigma) {
    lo = dp;
    up = dq;
  }
  return BandedOperator(std::make_shared<KernelWrappedNode>(kind, wu, RowMat(c), lo, up, basis, ran));
}

AlmostBandedSystem assemble_sie(const SIEProblem& p) {
  bool wu = weighted_wu(p.solution_basis);
  if (p.f.coeffs.empty()) fail(ErrorKind::invalid_argument, "missing right-hand side");
  if (p.f.basis != Basis::T()) fail(ErrorKind::invalid_argument, "right-hand side must be in basis T");
  int order = wu ? 1 : 2;
  std::vector<BandedOperator> terms;
  auto lift = [&](const BandedOperator& op) {
    int from = op.range().order();
    return from == order ? op : op_compose(conversion_chain(from, order), op);
  };
  const std::optional<LowRankKernel>* ks[4] = {&p.K1, &p.K2, &p.K3, &p.K4};
  SingularKind kinds[4] = {SingularKind::hadamard, SingularKind::hilbert, SingularKind::log, SingularKind::sigma};
  for (int k = 0; k < 4; ++k)
    if (ks[k]->has_value()) terms.push_back(lift(kernel_wrapped_op(kinds[k], **ks[k], p.solution_basis)));
  if (terms.empty()) fail(ErrorKind::invalid_argument, "at least one kernel is required");
  AlmostBandedSystem sys;
  sys.op = op_sum(terms);
  for (const auto& [f, c] : p.constraints) {
    sys.functionals.push_back(f);
    sys.constraints.push_back(c);
  }
  sys.rhs = CoeffExpansion(sys.op.range(), convert_coeffs(p.f.coeffs, order), p.f.segment);
  sys.solution_basis = p.solution_basis;
  sys.segment = p.f.segment;
  return sys;
}

BandedOperator dirichlet_preconditioner() {
  return diagonal_op([](index_t n) { return cplx(n == 0 ? 2.0 / std::log(2.0) : 2.0 * double(n)); }, Basis::WT(),
                     Basis::WT());
}

BandedOperator neumann_preconditioner() {
  return diagonal_op([](index_t n) { return cplx(-2.0 / double(n + 1)); }, Basis::WU(), Basis::WU());
}

}  // namespace sie
