// Serial reference kernels against their OpenMP versions on the square
// benchmark. Set HPDG_NUM_THREADS (or OMP_NUM_THREADS) to choose the team
// size of the parallel runs.

#include "hpdg/benchmarks.hpp"
#include "hpdg/dg.hpp"
#include "hpdg/estimator.hpp"
#include "hpdg/reconstruction.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <memory>

namespace
{

struct Fixture
{
  hpdg::BenchmarkCase bc;
  hpdg::Mesh mesh;
  std::unique_ptr<hpdg::Discretization> d;
  hpdg::DGSolution sol;
  hpdg::DGGradient grad;
  hpdg::Reconstruction rec;

  explicit Fixture(int p)
  {
    bc = hpdg::make_benchmark(hpdg::BenchmarkId::square_hankel, 20.0);
    mesh = hpdg::build_structured_mesh(bc.domain, 1.0 / 12.0);
    hpdg::DGParams prm;
    prm.k = 20.0;
    d = std::make_unique<hpdg::Discretization>(
        mesh, std::vector<int>(mesh.num_triangles(), p), prm, bc.data);
    sol = hpdg::solve(*d, hpdg::Exec::serial);
    grad = hpdg::dg_gradient(*d, sol.u, hpdg::Exec::serial);
    rec = hpdg::reconstruct(*d, sol.u, grad, {}, hpdg::Exec::serial);
  }
};

Fixture& fixture(int p)
{
  static std::unique_ptr<Fixture> f[8];
  if (!f[p])
    f[p] = std::make_unique<Fixture>(p);
  return *f[p];
}

hpdg::Exec exec_of(const benchmark::State& state)
{
  return state.range(1) ? hpdg::Exec::parallel : hpdg::Exec::serial;
}

void BM_Assemble(benchmark::State& state)
{
  auto& f = fixture(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(hpdg::assemble(*f.d, exec_of(state)));
  state.counters["dofs"] = f.d->num_dofs();
}

void BM_Reconstruct(benchmark::State& state)
{
  auto& f = fixture(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(hpdg::reconstruct(*f.d, f.sol.u, f.grad, {}, exec_of(state)));
  state.counters["patches"] = f.mesh.num_nodes();
}

void BM_Estimate(benchmark::State& state)
{
  auto& f = fixture(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(hpdg::estimate(*f.d, f.sol.u, f.grad, f.rec, exec_of(state)));
}

void BM_ResidualEstimate(benchmark::State& state)
{
  auto& f = fixture(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(hpdg::estimate_residual(*f.d, f.sol.u, exec_of(state)));
}

// arguments: polynomial degree, parallel flag
BENCHMARK(BM_Assemble)->ArgsProduct({{2, 4}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Reconstruct)->ArgsProduct({{2, 4}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Estimate)->ArgsProduct({{2, 4}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ResidualEstimate)->ArgsProduct({{2, 4}, {0, 1}})->Unit(benchmark::kMillisecond);

} // namespace

int main(int argc, char** argv)
{
  if (const char* env = std::getenv("HPDG_NUM_THREADS"))
    omp_set_num_threads(std::max(1, std::atoi(env)));
  benchmark::Initialize(&argc, argv);
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
