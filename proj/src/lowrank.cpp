#include "sie/lowrank.hpp"

#include <algorithm>
#include <cmath>

namespace sie {

index_t LowRankKernel::degree_x() const {
  index_t d = 0;
  for (const auto& t : terms) d = std::max(d, index_t(t.a.size()) - 1);
  return d;
}

index_t LowRankKernel::degree_y() const {
  index_t d = 0;
  for (const auto& t : terms) d = std::max(d, index_t(t.b.size()) - 1);
  return d;
}

cplx LowRankKernel::eval_local(cplx s, cplx t) const {
  cplx v = 0.0;
  for (const auto& term : terms) v += clenshaw_T(term.a.coeffs, s) * clenshaw_T(term.b.coeffs, t);
  return v;
}

cplx LowRankKernel::operator()(cplx x, cplx y) const {
  return eval_local(target.to_local(x), source.to_local(y));
}

Eigen::MatrixXcd LowRankKernel::coeff_matrix() const {
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(degree_x() + 1, degree_y() + 1);
  for (const auto& t : terms)
    for (std::size_t p = 0; p < t.a.size(); ++p)
      for (std::size_t q = 0; q < t.b.size(); ++q) c(p, q) += t.a.coeffs[p] * t.b.coeffs[q];
  return c;
}

LowRankKernel LowRankKernel::constant(cplx c, const Segment& target, const Segment& source) {
  LowRankKernel k;
  k.target = target;
  k.source = source;
  k.terms.push_back({CoeffExpansion(Basis::T(), {c}, target), CoeffExpansion(Basis::T(), {1.0}, source)});
  return k;
}

LowRankKernel LowRankKernel::separable(const CoeffExpansion& a, const CoeffExpansion& b) {
  LowRankKernel k;
  k.target = a.segment;
  k.source = b.segment;
  k.terms.push_back({a, b});
  return k;
}

LowRankKernel scaled(const LowRankKernel& k, cplx s) {
  LowRankKernel r = k;
  for (auto& t : r.terms)
    for (auto& c : t.a.coeffs) c *= s;
  return r;
}

Eigen::MatrixXcd skewed_grid_sample(const BivariateFunction& f, std::size_t m, std::size_t n,
                                    const Segment& target, const Segment& source, Exec exec) {
  auto xs = cheb_points(GridKind::first, m);
  auto ys = cheb_points(GridKind::second, n);
  Eigen::MatrixXcd F(m, n);
  index_t mm = index_t(m), nn = index_t(n);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (index_t i = 0; i < mm; ++i) {
      cplx x = target.to_global(xs[i]);
      for (index_t j = 0; j < nn; ++j) F(i, j) = f(x, source.to_global(ys[j]));
    }
  } else {
    for (index_t i = 0; i < mm; ++i) {
      cplx x = target.to_global(xs[i]);
      for (index_t j = 0; j < nn; ++j) F(i, j) = f(x, source.to_global(ys[j]));
    }
  }
  return F;
}

namespace {

struct Pivoted {
  std::vector<CVec> cols, rows;  // cols at x-nodes, rows at y-nodes already divided by the pivot
};

// full-pivot elimination on the sampled matrix; ties go to the smallest row, then column
Pivoted grid_elimination(Eigen::MatrixXcd R, double threshold, std::size_t max_rank) {
  Pivoted out;
  while (out.cols.size() < max_rank) {
    index_t bi = 0, bj = 0;
    double best = -1.0;
    for (index_t i = 0; i < R.rows(); ++i)
      for (index_t j = 0; j < R.cols(); ++j) {
        double v = std::abs(R(i, j));
        if (v > best) {
          best = v;
          bi = i;
          bj = j;
        }
      }
    if (best <= threshold || best == 0.0) break;
    cplx p = R(bi, bj);
    Eigen::VectorXcd col = R.col(bj);
    Eigen::RowVectorXcd row = R.row(bi) / p;
    R.noalias() -= col * row;
    out.cols.emplace_back(col.data(), col.data() + col.size());
    out.rows.emplace_back(row.data(), row.data() + row.size());
  }
  return out;
}

double tail_max(const Eigen::MatrixXcd& c, bool along_rows) {
  index_t n = along_rows ? c.rows() : c.cols();
  index_t t = std::max<index_t>(2, n / 8);
  if (along_rows) return c.bottomRows(t).cwiseAbs().maxCoeff();
  return c.rightCols(t).cwiseAbs().maxCoeff();
}

void chop_terms(LowRankKernel& k, double threshold) {
  for (auto& t : k.terms) {
    double ma = max_abs(t.a.coeffs), mb = max_abs(t.b.coeffs);
    if (ma == 0.0 || mb == 0.0) {
      t.a.coeffs = {0.0};
      t.b.coeffs = {0.0};
      continue;
    }
    t.a.coeffs.resize(chop_absolute(t.a.coeffs, threshold / mb));
    t.b.coeffs.resize(chop_absolute(t.b.coeffs, threshold / ma));
  }
}

LowRankKernel zero_kernel(const Segment& target, const Segment& source) {
  return LowRankKernel::constant(0.0, target, source);
}

}  // namespace

LowRankKernel ge_lowrank(const BivariateFunction& f, double tol, const Segment& target, const Segment& source,
                         const LowRankOptions& opt) {
  if (!(tol > 0)) fail(ErrorKind::invalid_argument, "tolerance must be positive");
  double last_tail = 0.0;
  for (std::size_t m = opt.initial_grid; m <= opt.max_grid; m *= 2) {
    std::size_t n = m + 1;
    Eigen::MatrixXcd F = skewed_grid_sample(f, m, n, target, source, opt.exec);
    double scale = F.cwiseAbs().maxCoeff();
    if (!std::isfinite(scale)) fail(ErrorKind::invalid_argument, "kernel is not finite on the sample grid");
    if (scale <= tol * opt.scale_floor) return zero_kernel(target, source);
    scale = std::max(scale, opt.scale_floor);
    Pivoted pv = grid_elimination(F, tol * scale, opt.max_rank);
    if (pv.cols.size() >= opt.max_rank) throw ResolutionFailure("ge_lowrank reached the maximal rank", tol);

    LowRankKernel k;
    k.target = target;
    k.source = source;
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(m, n);
    for (std::size_t r = 0; r < pv.cols.size(); ++r) {
      CVec a = values_to_coeffs(GridKind::first, pv.cols[r]);
      CVec b = values_to_coeffs(GridKind::second, pv.rows[r]);
      for (std::size_t p = 0; p < m; ++p)
        for (std::size_t q = 0; q < n; ++q) C(p, q) += a[p] * b[q];
      k.terms.push_back({CoeffExpansion(Basis::T(), std::move(a), target),
                         CoeffExpansion(Basis::T(), std::move(b), source)});
    }
    double thr = 8.0 * tol * scale;
    last_tail = std::max(tail_max(C, true), tail_max(C, false)) / scale;
    if (last_tail * scale <= thr) {
      chop_terms(k, 0.05 * tol * scale);
      return k;
    }
  }
  throw ResolutionFailure("ge_lowrank: slices not resolved on the largest grid", last_tail);
}

LowRankKernel cholesky_lowrank(const BivariateFunction& f, double tol, const Segment& seg,
                               const LowRankOptions& opt) {
  if (!(tol > 0)) fail(ErrorKind::invalid_argument, "tolerance must be positive");
  double last_tail = 0.0;
  for (std::size_t m = opt.initial_grid; m <= opt.max_grid; m *= 2) {
    auto xs = cheb_points(GridKind::first, m);
    Eigen::MatrixXcd R(m, m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) R(i, j) = f(seg.to_global(xs[i]), seg.to_global(xs[j]));
    double scale = R.cwiseAbs().maxCoeff();
    if (scale == 0.0) return zero_kernel(seg, seg);
    LowRankKernel k;
    k.target = k.source = seg;
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(m, m);
    while (k.terms.size() < opt.max_rank) {
      index_t bi = 0;
      double best = -1.0, most_negative = 0.0;
      for (index_t i = 0; i < index_t(m); ++i) {
        double d = R(i, i).real();
        most_negative = std::min(most_negative, d);
        if (d > best) {
          best = d;
          bi = i;
        }
      }
      if (most_negative < -10.0 * tol * scale)
        fail(ErrorKind::not_nonnegative_definite, "negative diagonal residual in cholesky_lowrank");
      if (best <= tol * scale) break;
      Eigen::VectorXcd col = R.col(bi) / std::sqrt(best);
      R.noalias() -= col * col.adjoint();
      CVec cv(col.data(), col.data() + col.size());
      CVec a = values_to_coeffs(GridKind::first, cv);
      CVec b(a.size());
      for (std::size_t p = 0; p < a.size(); ++p) b[p] = std::conj(a[p]);
      for (std::size_t p = 0; p < m; ++p)
        for (std::size_t q = 0; q < m; ++q) C(p, q) += a[p] * b[q];
      k.terms.push_back({CoeffExpansion(Basis::T(), std::move(a), seg), CoeffExpansion(Basis::T(), std::move(b), seg)});
    }
    last_tail = std::max(tail_max(C, true), tail_max(C, false)) / scale;
    if (last_tail <= 8.0 * tol) {
      chop_terms(k, 0.05 * tol * scale);
      if (k.terms.empty()) return zero_kernel(seg, seg);
      return k;
    }
  }
  throw ResolutionFailure("cholesky_lowrank: slices not resolved on the largest grid", last_tail);
}

Eigen::MatrixXcd tensor_interpolant(const BivariateFunction& f, std::size_t m, std::size_t n, const Segment& target,
                                    const Segment& source) {
  Eigen::MatrixXcd F = skewed_grid_sample(f, m, n, target, source, Exec::serial);
  Eigen::MatrixXcd C(m, n);
  for (std::size_t j = 0; j < n; ++j) {
    CVec col(F.col(j).data(), F.col(j).data() + m);
    CVec c = values_to_coeffs(GridKind::first, col);
    for (std::size_t i = 0; i < m; ++i) C(i, j) = c[i];
  }
  for (std::size_t i = 0; i < m; ++i) {
    CVec row(n);
    for (std::size_t j = 0; j < n; ++j) row[j] = C(i, j);
    CVec c = values_to_coeffs(GridKind::second, row);
    for (std::size_t j = 0; j < n; ++j) C(i, j) = c[j];
  }
  return C;
}

LowRankKernel svd_recompress(const Eigen::MatrixXcd& coeffs, double tol, const Segment& target,
                             const Segment& source) {
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(coeffs, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return zero_kernel(target, source);
  LowRankKernel k;
  k.target = target;
  k.source = source;
  for (index_t i = 0; i < s.size() && s(i) > tol * s(0); ++i) {
    CVec a(coeffs.rows()), b(coeffs.cols());
    for (index_t p = 0; p < coeffs.rows(); ++p) a[p] = s(i) * svd.matrixU()(p, i);
    for (index_t q = 0; q < coeffs.cols(); ++q) b[q] = std::conj(svd.matrixV()(q, i));
    k.terms.push_back({CoeffExpansion(Basis::T(), std::move(a), target), CoeffExpansion(Basis::T(), std::move(b), source)});
  }
  return k;
}

std::size_t numerical_rank(const BivariateFunction& f, double tol, const Segment& target, const Segment& source) {
  LowRankKernel k = ge_lowrank(f, tol, target, source);
  if (k.rank() == 1 && max_abs(k.terms[0].a.coeffs) == 0.0) return 1;
  return k.rank();
}

KernelSplitting extract_splitting(const BivariateFunction& phi, const BivariateFunction& riemann,
                                  const Segment& target, const Segment& source, double tol,
                                  const LowRankOptions& opt) {
  KernelSplitting s;
  auto A = [&riemann](cplx x, cplx y) { return -riemann(x, y) / (2.0 * pi); };
  s.A = ge_lowrank(A, tol, target, source, opt);
  auto B = [&](cplx x, cplx y) { return phi(x, y) - A(x, y) * std::log(std::abs(x - y)); };
  // B is a difference of two larger terms; measure it against their size
  LowRankOptions bopt = opt;
  bopt.scale_floor = std::max(opt.scale_floor,
                              skewed_grid_sample(phi, opt.initial_grid, opt.initial_grid + 1, target, source, opt.exec)
                                  .cwiseAbs()
                                  .maxCoeff());
  try {
    s.B = ge_lowrank(B, tol, target, source, bopt);
  } catch (const ResolutionFailure& e) {
    fail(ErrorKind::splitting_mismatch,
         std::string("smooth remainder does not resolve; the log coefficient is wrong (") + e.what() + ")");
  }
  s.diagonal_value = A(target.center(), target.center());
  return s;
}

nlohmann::json to_json(const LowRankKernel& k) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : k.terms) terms.push_back({{"a", to_json(t.a)}, {"b", to_json(t.b)}});
  return {{"rank", k.rank()}, {"terms", terms}};
}

LowRankKernel kernel_from_json(const nlohmann::json& j) {
  LowRankKernel k;
  for (const auto& t : j.at("terms")) k.terms.push_back({expansion_from_json(t.at("a")), expansion_from_json(t.at("b"))});
  if (k.terms.empty()) fail(ErrorKind::invalid_argument, "kernel without terms");
  k.target = k.terms[0].a.segment;
  k.source = k.terms[0].b.segment;
  return k;
}

}  // namespace sie
