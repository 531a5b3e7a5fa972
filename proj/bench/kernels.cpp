#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "sie/fieldeval.hpp"
#include "sie/infqr.hpp"
#include "sie/lowrank.hpp"
#include "sie/opalg.hpp"
#include "sie/physics.hpp"

using namespace sie;

namespace {

Exec exec_of(const benchmark::State& st) { return st.range(1) ? Exec::parallel : Exec::serial; }

void BM_skewed_grid_sample(benchmark::State& st) {
  auto K = helmholtz_kernel(20.0);
  auto phi = K.phi_fn();
  Segment t({-1.0, 0.0}, {1.0, 0.3}), s({-0.5, 1.0}, {0.7, 1.6});
  auto n = std::size_t(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(skewed_grid_sample(phi, n, n + 1, t, s, exec_of(st)));
  st.SetItemsProcessed(st.iterations() * n * (n + 1));
}

void BM_layer_potential(benchmark::State& st) {
  auto K = helmholtz_kernel(10.0);
  auto phi = K.phi_fn();
  auto split = K.point_splitting();
  std::vector<cplx> c(64);
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = 1.0 / double(1 + j * j);
  CoeffExpansion density(Basis::WT(), c);
  auto m = int(st.range(0));
  CVec targets;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) targets.push_back(cplx(-2.0 + 4.0 * (i + 0.5) / m, -2.0 + 4.0 * (j + 0.37) / m));
  for (auto _ : st) benchmark::DoNotOptimize(layer_potential(phi, split, density, targets, 1.2, exec_of(st)));
  st.SetItemsProcessed(st.iterations() * targets.size());
}

void BM_cached_solve_batch(benchmark::State& st) {
  const index_t bw = 8;
  auto op = make_operator(bw, bw, Basis::T(), Basis::T(), [](index_t i, index_t j) {
    if (i == j) return cplx(4.0 + 0.5 * std::sin(double(i)));
    return cplx(std::cos(0.7 * double(i) + 1.3 * double(j)), 0.5 * std::sin(double(i - j))) / double(2 * bw);
  });
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  std::vector<CVec> rhs(16, CVec(std::size_t(st.range(0))));
  for (auto& r : rhs)
    for (auto& v : r) v = {g(rng), g(rng)};
  AlmostBandedSystem sys;
  sys.op = op;
  sys.rhs = CoeffExpansion(op.range(), rhs[0]);
  sys.solution_basis = op.domain();
  QRFactorizationCache cache(sys);
  cached_solve_batch(cache, rhs, 1e-14, Exec::serial);
  for (auto _ : st) benchmark::DoNotOptimize(cached_solve_batch(cache, rhs, 1e-14, exec_of(st)));
  st.SetItemsProcessed(st.iterations() * rhs.size());
}

}  // namespace

BENCHMARK(BM_skewed_grid_sample)->ArgsProduct({{64, 256}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_layer_potential)->ArgsProduct({{20, 60}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_cached_solve_batch)->ArgsProduct({{1000, 4000}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
