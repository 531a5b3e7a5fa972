#include "sie/chebkit.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

namespace sie {

const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::unsupported_basis: return "unsupported-basis";
    case ErrorKind::resolution_failure: return "resolution-failure";
    case ErrorKind::singular_system: return "singular-system";
    case ErrorKind::cache_mismatch: return "cache-mismatch";
    case ErrorKind::splitting_mismatch: return "splitting-mismatch";
    case ErrorKind::not_nonnegative_definite: return "not-nonnegative-definite";
    case ErrorKind::on_contour: return "on-contour";
    case ErrorKind::singular_argument: return "singular-argument";
    case ErrorKind::config_error: return "config-error";
  }
  return "error";
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

Basis Basis::C(int lam) {
  if (lam < 1) fail(ErrorKind::invalid_argument, "ultraspherical order must be >= 1");
  return {BasisKind::C, lam};
}

std::string Basis::name() const {
  switch (kind) {
    case BasisKind::T: return "T";
    case BasisKind::C: return lambda == 1 ? "U" : "C" + std::to_string(lambda);
    case BasisKind::WT: return "WT";
    case BasisKind::WU: return "WU";
    case BasisKind::MT: return "MT";
  }
  return "?";
}

Basis Basis::parse(const std::string& s) {
  if (s == "T") return T();
  if (s == "U") return U();
  if (s == "WT") return WT();
  if (s == "WU") return WU();
  if (s == "MT") return MT();
  if (s.size() > 1 && s[0] == 'C') return C(std::stoi(s.substr(1)));
  fail(ErrorKind::invalid_argument, "unknown basis '" + s + "'");
}

Segment::Segment(cplx a_, cplx b_) : a(a_), b(b_) {
  if (a == b) fail(ErrorKind::invalid_argument, "degenerate segment");
}

// ---------------------------------------------------------------- grids

std::vector<double> cheb_points(GridKind kind, std::size_t n) {
  if (n == 0) fail(ErrorKind::invalid_argument, "cheb_points needs n >= 1");
  std::vector<double> x(n);
  if (kind == GridKind::first) {
    for (std::size_t k = 0; k < n; ++k) {
      // sin form keeps the symmetric nodes exactly antisymmetric
      x[k] = std::sin(pi * (double(n) - 1.0 - 2.0 * double(k)) / (2.0 * double(n)));
    }
  } else {
    if (n < 2) fail(ErrorKind::invalid_argument, "second-kind grid needs n >= 2");
    for (std::size_t k = 0; k < n; ++k) {
      x[k] = std::sin(pi * (double(n) - 1.0 - 2.0 * double(k)) / (2.0 * double(n - 1)));
    }
  }
  return x;
}

// ---------------------------------------------------------------- DCTs

namespace {

struct PlanCache {
  std::mutex mu;
  std::map<std::pair<int, std::size_t>, fftw_plan> plans;

  fftw_plan get(fftw_r2r_kind kind, std::size_t n) {
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(int(kind), n);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    double* in = fftw_alloc_real(n);
    double* out = fftw_alloc_real(n);
    fftw_plan p = fftw_plan_r2r_1d(int(n), in, out, kind, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
    plans.emplace(key, p);
    return p;
  }
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

// Applies a real r2r transform to the real and imaginary parts separately.
CVec r2r(fftw_r2r_kind kind, const CVec& v) {
  std::size_t n = v.size();
  fftw_plan p = plan_cache().get(kind, n);
  double* in = fftw_alloc_real(n);
  double* out = fftw_alloc_real(n);
  CVec res(n);
  for (std::size_t k = 0; k < n; ++k) in[k] = v[k].real();
  fftw_execute_r2r(p, in, out);
  for (std::size_t k = 0; k < n; ++k) res[k] = out[k];
  for (std::size_t k = 0; k < n; ++k) in[k] = v[k].imag();
  fftw_execute_r2r(p, in, out);
  for (std::size_t k = 0; k < n; ++k) res[k] += cplx(0.0, out[k]);
  fftw_free(in);
  fftw_free(out);
  return res;
}

}  // namespace

CVec values_to_coeffs(GridKind kind, const CVec& values) {
  std::size_t n = values.size();
  if (n == 0) fail(ErrorKind::invalid_argument, "empty sample");
  if (kind == GridKind::first) {
    if (n == 1) return values;
    CVec c = r2r(FFTW_REDFT10, values);
    for (auto& x : c) x /= double(n);
    c[0] *= 0.5;
    return c;
  }
  if (n < 2) fail(ErrorKind::invalid_argument, "second-kind sample needs n >= 2");
  CVec c = r2r(FFTW_REDFT00, values);
  for (auto& x : c) x /= double(n - 1);
  c[0] *= 0.5;
  c[n - 1] *= 0.5;
  return c;
}

CVec coeffs_to_values(GridKind kind, const CVec& coeffs, std::size_t n) {
  if (n == 0) fail(ErrorKind::invalid_argument, "coeffs_to_values needs n >= 1");
  if (coeffs.size() > n) {
    auto x = cheb_points(kind, n);
    CVec v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = clenshaw_T(coeffs, x[k]);
    return v;
  }
  CVec c(n, 0.0);
  std::copy(coeffs.begin(), coeffs.end(), c.begin());
  if (kind == GridKind::first) {
    if (n == 1) return c;
    for (std::size_t k = 1; k < n; ++k) c[k] *= 0.5;
    return r2r(FFTW_REDFT01, c);
  }
  if (n < 2) fail(ErrorKind::invalid_argument, "second-kind grid needs n >= 2");
  for (std::size_t k = 1; k + 1 < n; ++k) c[k] *= 0.5;
  return r2r(FFTW_REDFT00, c);
}

CoeffExpansion values_to_coeffs(const GridSample& sample) {
  if (sample.values.empty()) fail(ErrorKind::invalid_argument, "empty sample");
  if (sample.nodes.size() != sample.values.size())
    fail(ErrorKind::invalid_argument, "nodes and values differ in length");
  return CoeffExpansion(Basis::T(), values_to_coeffs(sample.kind, sample.values));
}

GridSample coeffs_to_values(const CoeffExpansion& e, GridKind kind, std::size_t n) {
  if (e.basis != Basis::T()) fail(ErrorKind::unsupported_basis, "coeffs_to_values needs basis T");
  GridSample s;
  s.kind = kind;
  s.nodes = cheb_points(kind, n);
  s.values = coeffs_to_values(kind, e.coeffs, n);
  return s;
}

// ---------------------------------------------------------------- evaluation

cplx clenshaw_T(const CVec& c, cplx t) {
  cplx b1 = 0.0, b2 = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) {
    cplx b0 = c[k] + 2.0 * t * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  if (c.empty()) return 0.0;
  return c[0] + t * b1 - b2;
}

cplx clenshaw_C(const CVec& c, int lambda, cplx t) {
  // C_{n+1} = alpha_n t C_n - gamma_n C_{n-1}
  double lam = lambda;
  cplx b1 = 0.0, b2 = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) {
    double n = double(k);
    double alpha = 2.0 * (n + lam) / (n + 1.0);
    double gamma_next = (n + 1.0 + 2.0 * lam - 1.0) / (n + 2.0);
    cplx b0 = c[k] + alpha * t * b1 - gamma_next * b2;
    b2 = b1;
    b1 = b0;
  }
  return b1;
}

cplx weight_sqrt(cplx t) { return std::sqrt(1.0 - t) * std::sqrt(1.0 + t); }

CVec from_modified(const CVec& mt) {
  CVec u(mt);
  for (std::size_t n = 0; n + 2 < mt.size(); ++n) u[n] -= mt[n + 2];
  return u;
}

CVec to_modified(const CVec& t) {
  CVec m(t);
  for (std::size_t n = t.size(); n-- > 0;) {
    if (n + 2 < t.size()) m[n] += m[n + 2];
  }
  return m;
}

cplx eval_local(const CoeffExpansion& e, cplx t) {
  switch (e.basis.kind) {
    case BasisKind::T: return clenshaw_T(e.coeffs, t);
    case BasisKind::C: return clenshaw_C(e.coeffs, e.basis.lambda, t);
    case BasisKind::MT: return clenshaw_T(from_modified(e.coeffs), t);
    case BasisKind::WU: return clenshaw_C(e.coeffs, 1, t) * weight_sqrt(t);
    case BasisKind::WT: {
      cplx w = weight_sqrt(t);
      if (w == 0.0) {
        double nan = std::numeric_limits<double>::quiet_NaN();
        return {nan, nan};
      }
      return clenshaw_T(e.coeffs, t) / w;
    }
  }
  return 0.0;
}

cplx eval(const CoeffExpansion& e, cplx x) {
  if (e.segment.canonical()) return eval_local(e, x);
  return eval_local(e, e.segment.to_local(x));
}

bool endpoint_singular(const CoeffExpansion& e, cplx x) {
  if (e.basis != Basis::WT()) return false;
  cplx t = e.segment.canonical() ? x : e.segment.to_local(x);
  return t == cplx(1.0) || t == cplx(-1.0);
}

cplx CoeffExpansion::operator()(cplx x) const { return eval(*this, x); }

// ---------------------------------------------------------------- chop / fit

double max_abs(const CVec& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, std::abs(x));
  return m;
}

std::size_t chop_absolute(const CVec& coeffs, double threshold) {
  for (std::size_t k = coeffs.size(); k-- > 0;) {
    if (std::abs(coeffs[k]) > threshold) return k + 1;
  }
  return 1;
}

std::size_t chop(const CVec& coeffs, double tol) {
  double m = max_abs(coeffs);
  if (m == 0.0) return 1;
  return chop_absolute(coeffs, tol * m);
}

CoeffExpansion chopped(const CoeffExpansion& e, double tol) {
  CoeffExpansion r = e;
  if (r.coeffs.empty()) {
    r.coeffs.assign(1, 0.0);
    return r;
  }
  r.coeffs.resize(chop(r.coeffs, tol));
  return r;
}

namespace {

CVec sample_fit(const ScalarFunction& f, const Segment& seg, std::size_t n) {
  auto x = cheb_points(GridKind::first, n);
  CVec v(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = f(seg.to_global(x[k]));
  return values_to_coeffs(GridKind::first, v);
}

}  // namespace

CoeffExpansion adaptive_fit(const ScalarFunction& f, double tol, const Segment& seg,
                            const FitOptions& opt) {
  if (!(tol > 0.0)) fail(ErrorKind::invalid_argument, "adaptive_fit needs tol > 0");
  // below roundoff the tail never settles; clamp the working tolerance
  double wtol = std::max(tol, 4.0 * std::numeric_limits<double>::epsilon());
  std::size_t n = std::max<std::size_t>(opt.initial, 2);
  CVec prev = sample_fit(f, seg, n);
  double tail = 1.0;
  while (2 * n <= opt.max_length) {
    CVec next = sample_fit(f, seg, 2 * n);
    double scale = std::max(max_abs(prev), max_abs(next));
    if (scale == 0.0) return CoeffExpansion(Basis::T(), CVec{0.0}, seg);
    std::size_t l1 = chop(prev, wtol), l2 = chop(next, wtol);
    double diff = 0.0;
    for (std::size_t k = 0; k < n; ++k) diff = std::max(diff, std::abs(prev[k] - next[k]));
    if (l1 < n && l2 <= n && diff <= 10.0 * wtol * scale) {
      next.resize(l2);
      return CoeffExpansion(Basis::T(), std::move(next), seg);
    }
    double prev_tail = tail;
    tail = 0.0;
    for (std::size_t k = next.size() / 2; k < next.size(); ++k) tail = std::max(tail, std::abs(next[k]));
    tail /= scale;
    // evaluation noise: the tail stopped decaying at a small level
    if (tail < 1e-10 && tail > 0.25 * prev_tail) {
      next.resize(chop_absolute(next, 4.0 * tail * scale));
      return CoeffExpansion(Basis::T(), std::move(next), seg);
    }
    prev = std::move(next);
    n *= 2;
  }
  throw ResolutionFailure("adaptive_fit did not converge by length " + std::to_string(opt.max_length), tail);
}

// ---------------------------------------------------------------- json

nlohmann::json to_json(const CoeffExpansion& e) {
  nlohmann::json j;
  j["basis"] = e.basis.name();
  j["segment"] = {e.segment.a.real(), e.segment.a.imag(), e.segment.b.real(), e.segment.b.imag()};
  nlohmann::json c = nlohmann::json::array();
  for (const auto& x : e.coeffs) c.push_back({x.real(), x.imag()});
  j["coeffs"] = c;
  return j;
}

CoeffExpansion expansion_from_json(const nlohmann::json& j) {
  CoeffExpansion e;
  e.basis = Basis::parse(j.at("basis").get<std::string>());
  const auto& s = j.at("segment");
  e.segment = Segment({s.at(0).get<double>(), s.at(1).get<double>()}, {s.at(2).get<double>(), s.at(3).get<double>()});
  for (const auto& c : j.at("coeffs")) e.coeffs.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
  return e;
}

}  // namespace sie
