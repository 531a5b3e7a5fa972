#include <boost/math/special_functions/bessel.hpp>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "sie/infqr.hpp"

using namespace sie;

namespace {

// deterministic pseudo-random banded operator, diagonally dominant
BandedOperator random_banded(index_t lower, index_t upper, std::uint64_t seed) {
  return make_operator(lower, upper, Basis::T(), Basis::T(), [=](index_t i, index_t j) {
    if (i == j) return cplx(4.0 + 0.5 * std::sin(double(i)));
    std::uint64_t h = seed ^ (std::uint64_t(i) * 0x9E3779B97F4A7C15ull) ^ (std::uint64_t(j) * 0xC2B2AE3D27D4EB4Full);
    h ^= h >> 29;
    h *= 0xBF58476D1CE4E5B9ull;
    h ^= h >> 32;
    double v = double(h % 2001) / 1000.0 - 1.0;
    return cplx(v, 0.5 * v) / double(lower + upper);
  });
}

AlmostBandedSystem make_system(const BandedOperator& op, CVec rhs) {
  AlmostBandedSystem s;
  s.op = op;
  s.rhs = CoeffExpansion(op.range(), std::move(rhs));
  s.solution_basis = op.domain();
  return s;
}

double residual(const AlmostBandedSystem& sys, const CoeffExpansion& u) {
  index_t n = index_t(u.size());
  index_t rows = n + sys.op.lower_bw() + index_t(sys.num_functionals());
  Eigen::MatrixXcd A = sys.section(rows, n);
  Eigen::VectorXcd x = Eigen::Map<const Eigen::VectorXcd>(u.coeffs.data(), n);
  CVec b = sys.stacked_rhs();
  b.resize(std::max<std::size_t>(b.size(), rows), 0.0);
  Eigen::VectorXcd r = A * x - Eigen::Map<const Eigen::VectorXcd>(b.data(), rows);
  return r.norm();
}

}  // namespace

TEST_CASE("identity system") {
  auto sys = make_system(identity_op(Basis::T()), {1.0});
  auto u = adaptive_qr_solve(sys, 1e-14);
  REQUIRE(u.size() == 1);
  CHECK(std::abs(u.coeffs[0] - 1.0) < 1e-15);
}

TEST_CASE("property: residual of returned solutions") {
  std::mt19937_64 rng(51);
  for (index_t bw : {2, 8, 20}) {
    auto op = random_banded(bw, bw, 100 + bw);
    auto rhs = oracle::random_coeffs(rng, 300);
    auto sys = make_system(op, rhs);
    double tol = 1e-13;
    SolveInfo info;
    auto u = adaptive_qr_solve(sys, tol, &info);
    double nb = 0.0;
    for (auto v : rhs) nb += std::norm(v);
    CHECK(residual(sys, u) <= 10 * tol * std::sqrt(nb));
    CHECK(info.n >= 300);
  }
}

TEST_CASE("functional rows participate") {
  // u(-1) = 1, u(1) = 0 as dense rows over an operator with two rows fewer
  auto l = boundary_functional(FunctionalKind::eval_left, Basis::T());
  auto r = boundary_functional(FunctionalKind::eval_right, Basis::T());
  CoeffExpansion zero(Basis::T(), {0.0}), one(Basis::T(), {1.0});
  auto sys = assemble_ode({CoeffExpansion(Basis::T(), {-4.0}), zero, one}, {l, r}, {1.0, 0.0}, zero);
  double tol = 1e-14;
  auto u = adaptive_qr_solve(sys, tol);
  // u'' = 4u: u = sinh(2(1 - x)) / sinh(4)
  for (double x : {-0.7, 0.0, 0.5})
    CHECK(std::abs(u(x) - std::sinh(2 * (1 - x)) / std::sinh(4.0)) < 1e-13);
  CHECK(residual(sys, u) <= 10 * tol * 1.0);
}

TEST_CASE("minimal solution of the Bessel recurrence") {
  // J_{n-1} - (2n/x) J_n + J_{n+1} = 0 with J_0 fixed
  const double x = 1.0;
  auto op = make_operator(0, 2, Basis::T(), Basis::T(), [x](index_t i, index_t j) {
    if (j == i) return cplx(1.0);
    if (j == i + 1) return cplx(-2.0 * double(i + 1) / x);
    return cplx(1.0);
  });
  AlmostBandedSystem sys = make_system(op, {0.0});
  sys.functionals = {RowFunctional::dense({1.0})};
  // oracle value of J_0 from backward recurrence with the sum normalization
  std::vector<double> b(61, 0.0);
  b[60] = 0.0;
  b[59] = 1e-300;
  for (int n = 59; n > 0; --n) b[n - 1] = 2.0 * n / x * b[n] - b[n + 1];
  double norm = b[0];
  for (int n = 2; n < 60; n += 2) norm += 2 * b[n];
  for (auto& v : b) v /= norm;
  sys.constraints = {b[0]};
  auto u = adaptive_qr_solve(sys, 1e-15);
  for (int n = 0; n < 12; ++n) {
    CHECK(std::abs(u.coeff(n) - b[n]) <= 1e-10 * std::abs(b[n]));
    CHECK(std::abs(b[n] - boost::math::cyl_bessel_j(n, x)) <= 1e-12 * std::abs(b[n]));
  }
}

TEST_CASE("cache extension and reuse") {
  auto op = random_banded(3, 4, 7);
  std::mt19937_64 rng(52);
  auto sys = make_system(op, oracle::random_coeffs(rng, 120));
  QRFactorizationCache cache(sys);
  qr_extend(cache, sys, 100);
  CHECK(cache.frontier() == 100);
  std::size_t rots = cache.num_rotations();
  qr_extend(cache, sys, 50);
  CHECK(cache.frontier() == 100);
  CHECK(cache.num_rotations() == rots);

  auto u1 = cached_solve(cache, sys.stacked_rhs(), 1e-14);
  auto u2 = cached_solve(cache, sys.stacked_rhs(), 1e-14);
  CHECK(u1.coeffs == u2.coeffs);
  qr_extend(cache, sys, 400);
  auto u3 = cached_solve(cache, sys.stacked_rhs(), 1e-14);
  CHECK(u1.coeffs == u3.coeffs);

  auto other = make_system(random_banded(3, 4, 8), {1.0});
  try {
    qr_extend(cache, other, 500);
    FAIL("expected cache mismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::cache_mismatch);
  }

  // diagonal operator: one more column costs at most one rotation
  auto dsys = make_system(diagonal_op([](index_t i) { return cplx(1.0 + double(i)); }, Basis::T(), Basis::T()), {1.0});
  QRFactorizationCache dc(dsys);
  qr_extend(dc, dsys, 10);
  std::size_t before = dc.num_rotations();
  qr_extend(dc, dsys, 11);
  CHECK(dc.num_rotations() - before <= 1);
}

TEST_CASE("cached and fresh solves agree") {
  auto op = random_banded(6, 6, 9);
  std::mt19937_64 rng(53);
  auto base = make_system(op, oracle::random_coeffs(rng, 50));
  QRFactorizationCache cache(base);
  for (int t = 0; t < 4; ++t) {
    auto rhs = oracle::random_coeffs(rng, 200);
    auto fresh = adaptive_qr_solve(make_system(op, rhs), 1e-14);
    auto cached = cached_solve(cache, rhs, 1e-14);
    CHECK(oracle::rel_diff(cached.coeffs, fresh.coeffs) < 1e-13);
  }
}

TEST_CASE("property: logged rotations are unitary") {
  auto op = random_banded(5, 3, 10);
  auto sys = make_system(op, {1.0});
  QRFactorizationCache cache(sys);
  qr_extend(cache, sys, 200);
  std::mt19937_64 rng(54);
  CVec w = oracle::random_coeffs(rng, 220);
  double n0 = 0.0;
  for (auto v : w) n0 += std::norm(v);
  for (index_t k = 0; k < 200; ++k)
    for (auto g = cache.rotations_begin(k); g != cache.rotations_end(k); ++g) {
      CHECK(std::abs(g->c * g->c + std::norm(g->s) - 1.0) < 1e-15);
      cplx x = w[k], y = w[g->row];
      w[k] = g->c * x + g->s * y;
      w[g->row] = -std::conj(g->s) * x + g->c * y;
    }
  double n1 = 0.0;
  for (auto v : w) n1 += std::norm(v);
  CHECK(std::abs(std::sqrt(n1) - std::sqrt(n0)) <= 1e-13 * std::sqrt(n0));
}

TEST_CASE("batched cached solves: serial and parallel agree") {
  auto op = random_banded(4, 4, 11);
  std::mt19937_64 rng(55);
  auto sys = make_system(op, {1.0});
  std::vector<CVec> rhs;
  for (int i = 0; i < 6; ++i) rhs.push_back(oracle::random_coeffs(rng, 150 + 20 * i));
  QRFactorizationCache c1(sys), c2(sys);
  auto a = cached_solve_batch(c1, rhs, 1e-14, Exec::serial);
  auto b = cached_solve_batch(c2, rhs, 1e-14, Exec::parallel);
  for (std::size_t i = 0; i < rhs.size(); ++i) CHECK(a[i].coeffs == b[i].coeffs);
}

TEST_CASE("solver failures") {
  auto op = random_banded(2, 2, 12);
  std::mt19937_64 rng(56);
  QROptions opt;
  opt.max_n = 128;
  opt.initial = 64;
  try {
    adaptive_qr_solve(make_system(op, oracle::random_coeffs(rng, 1000)), 1e-14, nullptr, opt);
    FAIL("expected resolution failure");
  } catch (const ResolutionFailure& e) {
    CHECK(e.tail_estimate() > 1e-14);
  }
  try {
    adaptive_qr_solve(make_system(op_scale(0.0, identity_op(Basis::T())), {1.0}), 1e-14);
    FAIL("expected singular system");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::singular_system);
  }
  CHECK_THROWS_AS(adaptive_qr_solve(make_system(op, {1.0}), 0.0), Error);
}
