#include "sie/infqr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

namespace sie {

std::size_t default_max_n() {
  if (const char* s = std::getenv("SIE_MAX_N")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(s, &end, 10);
    if (end != s && v > 0) return std::size_t(v);
  }
  return std::size_t(1) << 20;
}

QRFactorizationCache::QRFactorizationCache(const AlmostBandedSystem& sys, const QROptions& opt)
    : sys_(sys), opt_(opt), fingerprint_(sys.fingerprint()) {
  if (!sys_.op) fail(ErrorKind::invalid_argument, "system without operator");
  nf_ = index_t(sys_.functionals.size());
  lower_ = sys_.op.lower_bw();
  upper_ = sys_.op.upper_bw();
  if (lower_ < 0 || upper_ < 0) fail(ErrorKind::invalid_argument, "negative bandwidth");
  width_ = lower_ + upper_ + nf_ + 1;
  active_ = lower_ + nf_ + 1;
  fvals_.resize(nf_);
  w_dense_.assign(active_ * width_, 0.0);
  w_alpha_.assign(active_ * nf_, 0.0);
  for (index_t r = 0; r < active_; ++r) load_row(r, 0, &w_dense_[(r % active_) * width_], &w_alpha_[(r % active_) * nf_]);
}

void QRFactorizationCache::ensure_functional_values(index_t upto) const {
  for (index_t f = 0; f < nf_; ++f) {
    auto& v = fvals_[f];
    index_t have = index_t(v.size());
    if (have >= upto) continue;
    index_t want = std::max(upto, 2 * have);
    v.resize(want);
    for (index_t c = have; c < want; ++c) v[c] = sys_.functionals[f].entry(c);
  }
}

cplx QRFactorizationCache::functional_value(index_t f, index_t c) const {
  ensure_functional_values(c + 1);
  return fvals_[f][c];
}

// original row r restricted to columns [k, k + width)
void QRFactorizationCache::load_row(index_t r, index_t k, cplx* dense, cplx* alpha) const {
  std::fill(alpha, alpha + nf_, cplx(0.0));
  if (r < nf_) {
    ensure_functional_values(k + width_);
    for (index_t c = 0; c < width_; ++c) dense[c] = fvals_[r][k + c];
    alpha[r] = 1.0;
  } else {
    sys_.op.row(r - nf_, k, k + width_, dense);
  }
}

void QRFactorizationCache::extend(index_t new_frontier) {
  if (new_frontier <= frontier_) return;
  // headroom so that the short extensions past the rhs do not move the factor
  auto grow = [](auto& v, std::size_t need) {
    if (v.capacity() < need) v.reserve(need + need / 4);
  };
  grow(r_dense_, std::size_t(new_frontier * width_));
  grow(r_alpha_, std::size_t(new_frontier * nf_));
  grow(rot_start_, std::size_t(new_frontier + 1));
  grow(rotations_, std::size_t(new_frontier) * std::size_t(active_));
  r_dense_.resize(new_frontier * width_);
  r_alpha_.resize(new_frontier * nf_);
  ensure_functional_values(new_frontier + width_ + 1);
  const index_t W = width_, A = active_, F = nf_;
  for (index_t k = frontier_; k < new_frontier; ++k) {
    cplx* pd = &w_dense_[(k % A) * W];
    cplx* pa = &w_alpha_[(k % A) * F];
    for (index_t r = k + 1; r < k + A; ++r) {
      cplx* qd = &w_dense_[(r % A) * W];
      cplx* qa = &w_alpha_[(r % A) * F];
      cplx b = qd[0];
      if (b == 0.0) continue;
      cplx a = pd[0];
      double aa = std::abs(a), ab = std::abs(b);
      double rr = std::hypot(aa, ab);
      double c;
      cplx s;
      if (aa == 0.0) {
        c = 0.0;
        s = std::conj(b) / ab;
      } else {
        c = aa / rr;
        s = (a / aa) * std::conj(b) / rr;
      }
      cplx ms = -std::conj(s);
      for (index_t j = 0; j < W; ++j) {
        cplx x = pd[j], y = qd[j];
        pd[j] = c * x + s * y;
        qd[j] = ms * x + c * y;
      }
      for (index_t f = 0; f < F; ++f) {
        cplx x = pa[f], y = qa[f];
        pa[f] = c * x + s * y;
        qa[f] = ms * x + c * y;
      }
      qd[0] = 0.0;
      rotations_.push_back({r, c, s});
    }
    rot_start_.push_back(rotations_.size());
    if (pd[0] == 0.0) fail(ErrorKind::singular_system, "zero pivot in column " + std::to_string(k));
    std::copy(pd, pd + W, &r_dense_[k * W]);
    std::copy(pa, pa + F, &r_alpha_[k * F]);

    // shift the window by one column and bring in row k + A
    index_t cnew = k + W;
    for (index_t r = k + 1; r < k + A; ++r) {
      cplx* qd = &w_dense_[(r % A) * W];
      const cplx* qa = &w_alpha_[(r % A) * F];
      std::copy(qd + 1, qd + W, qd);
      cplx v = 0.0;
      for (index_t f = 0; f < F; ++f) v += qa[f] * fvals_[f][cnew];
      qd[W - 1] = v;
    }
    load_row(k + A, k + 1, pd, pa);  // slot of row k is reused by row k + A
  }
  frontier_ = new_frontier;
}

namespace {

// Applies the logged rotations to the rhs column by column until the tail drops
// below tol; returns n, or -1 when the frontier is reached first.
index_t forward(const QRFactorizationCache& cache, CVec& w, const std::vector<double>& suffix, double target,
                index_t start, double& tail) {
  index_t A = cache.lower() + cache.num_functionals() + 1;
  index_t len = index_t(suffix.size()) - 1;
  for (index_t k = start; k < cache.frontier(); ++k) {
    if (index_t(w.size()) < k + A + 1) w.resize(2 * (k + A + 1), 0.0);
    for (const GivensRotation* g = cache.rotations_begin(k); g != cache.rotations_end(k); ++g) {
      cplx x = w[k], y = w[g->row];
      w[k] = g->c * x + g->s * y;
      w[g->row] = -std::conj(g->s) * x + g->c * y;
    }
    double t = 0.0;
    for (index_t r = k + 1; r < k + A; ++r) t += std::norm(w[r]);
    index_t beyond = std::min(k + A, len);
    tail = std::sqrt(t + suffix[beyond]);
    if (tail <= target) return k + 1;
  }
  return -1;
}

CVec back_substitute(const QRFactorizationCache& cache, const CVec& w, index_t n) {
  index_t W = cache.width(), F = cache.num_functionals();
  CVec x(n, 0.0);
  CVec tails(F, 0.0);  // sum_{c >= k + W, c < n} F_f(c) x_c
  for (index_t k = n - 1; k >= 0; --k) {
    index_t c_in = k + W;
    if (c_in < n)
      for (index_t f = 0; f < F; ++f) tails[f] += cache.functional_value(f, c_in) * x[c_in];
    const cplx* row = cache.r_row(k);
    const cplx* alpha = cache.r_alpha(k);
    cplx s = w[k];
    index_t jmax = std::min(W, n - k);
    for (index_t j = 1; j < jmax; ++j) s -= row[j] * x[k + j];
    for (index_t f = 0; f < F; ++f) s -= alpha[f] * tails[f];
    x[k] = s / row[0];
  }
  return x;
}

std::vector<double> suffix_squares(const CVec& b) {
  std::vector<double> s(b.size() + 1, 0.0);
  for (index_t i = index_t(b.size()) - 1; i >= 0; --i) s[i] = s[i + 1] + std::norm(b[i]);
  return s;
}

CoeffExpansion finish(const QRFactorizationCache& cache, CVec x, double tol) {
  std::size_t len = chop_absolute(x, 0.0);
  (void)tol;
  x.resize(std::max<std::size_t>(len, 1));
  return CoeffExpansion(cache.system().solution_basis, std::move(x), cache.system().segment);
}

// read-only solve; false when the cache is too short
bool try_solve(const QRFactorizationCache& cache, const CVec& rhs, double tol, CoeffExpansion& out, SolveInfo* info) {
  double nb = 0.0;
  for (const auto& v : rhs) nb += std::norm(v);
  nb = std::sqrt(nb);
  if (info) info->rhs_norm = nb;
  if (nb == 0.0) {
    out = CoeffExpansion(cache.system().solution_basis, {0.0}, cache.system().segment);
    if (info) info->n = 1;
    return true;
  }
  auto suffix = suffix_squares(rhs);
  CVec w = rhs;
  double tail = 0.0;
  index_t n = forward(cache, w, suffix, tol * nb, 0, tail);
  if (info) info->tail = tail;
  if (n < 0) return false;
  if (info) info->n = n;
  out = finish(cache, back_substitute(cache, w, n), tol);
  return true;
}

}  // namespace

void qr_extend(QRFactorizationCache& cache, const AlmostBandedSystem& sys, index_t new_frontier) {
  if (sys.fingerprint() != cache.fingerprint())
    fail(ErrorKind::cache_mismatch, "system does not match the cached factorization");
  cache.extend(new_frontier);
}

CoeffExpansion cached_solve(QRFactorizationCache& cache, const CVec& rhs, double tol, SolveInfo* info) {
  if (!(tol > 0)) fail(ErrorKind::invalid_argument, "tolerance must be positive");
  double nb = 0.0;
  for (const auto& v : rhs) nb += std::norm(v);
  nb = std::sqrt(nb);
  SolveInfo local;
  local.rhs_norm = nb;
  if (nb == 0.0) {
    if (info) *info = {1, 0.0, 0.0};
    return CoeffExpansion(cache.system().solution_basis, {0.0}, cache.system().segment);
  }
  auto suffix = suffix_squares(rhs);
  CVec w = rhs;
  index_t max_n = index_t(cache.options().max_n);
  index_t done = 0;
  double tail = 0.0;
  // the tail includes the rhs beyond k + active, so no column before m - active can terminate,
  // where m is where the rhs suffix first drops below the target
  const index_t initial = index_t(cache.options().initial);
  const double target = tol * nb;
  index_t m = index_t(rhs.size());
  while (m > 0 && suffix[m - 1] <= target * target) --m;
  const index_t A = cache.lower() + cache.num_functionals() + 1;
  const index_t base = std::min(max_n, std::max(initial, m - A + 1));
  cache.extend(base);
  for (;;) {
    index_t n = forward(cache, w, suffix, tol * nb, done, tail);
    if (n >= 0) {
      local.n = n;
      local.tail = tail;
      if (info) *info = local;
      return finish(cache, back_substitute(cache, w, n), tol);
    }
    done = cache.frontier();
    if (done >= max_n)
      throw ResolutionFailure("adaptive QR: tail " + std::to_string(tail / nb) + " above tolerance at n = " +
                                  std::to_string(done),
                              tail / nb);
    // grow geometrically in the part past the rhs, at most by a factor 9/8 overall
    cache.extend(std::min(max_n, done + std::max(initial, std::min(done / 8, done - base))));
  }
}

CoeffExpansion adaptive_qr_solve(const AlmostBandedSystem& sys, double tol, SolveInfo* info, const QROptions& opt) {
  QRFactorizationCache cache(sys, opt);
  return cached_solve(cache, sys.stacked_rhs(), tol, info);
}

std::vector<CoeffExpansion> cached_solve_batch(QRFactorizationCache& cache, const std::vector<CVec>& rhs, double tol,
                                               Exec exec) {
  std::vector<CoeffExpansion> out(rhs.size());
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < rhs.size(); ++i) out[i] = cached_solve(cache, rhs[i], tol);
    return out;
  }
  std::vector<char> ok(rhs.size(), 0);
  const QRFactorizationCache& view = cache;
  index_t m = index_t(rhs.size());
#pragma omp parallel for schedule(dynamic)
  for (index_t i = 0; i < m; ++i) ok[i] = try_solve(view, rhs[i], tol, out[i], nullptr);
  for (std::size_t i = 0; i < rhs.size(); ++i)
    if (!ok[i]) out[i] = cached_solve(cache, rhs[i], tol);
  return out;
}

}  // namespace sie
