#include <benchmark/benchmark.h>

#include <vector>

#include "toda/equilibrium.hpp"
#include "toda/grid.hpp"
#include "toda/jacobi.hpp"
#include "toda/potential.hpp"
#include "toda/rng.hpp"
#include "toda/samplers.hpp"

namespace {

toda::JacobiMatrix lax_matrix(std::size_t n, bool periodic) {
  toda::SeededStream stream(1, 0);
  const auto m = toda::sample_toda_matrix(stream, n, 1.0);
  if (periodic) return m;
  std::vector<double> diag(m.diag().begin(), m.diag().end());
  std::vector<double> off(m.offdiag().begin(), m.offdiag().end() - 1);
  return toda::JacobiMatrix(std::move(diag), std::move(off), false);
}

void BM_EigenvaluesOpen(benchmark::State& state) {
  const auto m = lax_matrix(static_cast<std::size_t>(state.range(0)), false);
  for (auto _ : state) benchmark::DoNotOptimize(toda::eigenvalues(m));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EigenvaluesOpen)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_EigenvaluesPeriodic(benchmark::State& state) {
  const auto m = lax_matrix(static_cast<std::size_t>(state.range(0)), true);
  for (auto _ : state) benchmark::DoNotOptimize(toda::eigenvalues(m));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EigenvaluesPeriodic)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_SampleToda(benchmark::State& state) {
  toda::SeededStream stream(2, 0);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(toda::sample_toda_matrix(stream, n, 1.0));
}
BENCHMARK(BM_SampleToda)->Arg(1000)->Arg(10000);

void BM_LogPotential(benchmark::State& state) {
  const toda::LogKernel kernel(toda::Grid(6.0, static_cast<std::size_t>(state.range(0))));
  std::vector<double> rho(kernel.grid().size(), 1.0 / 12.0), out(rho.size());
  for (auto _ : state) {
    kernel.log_potential(rho, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LogPotential)->RangeMultiplier(2)->Range(500, 8000)->Complexity();

void BM_LocalTraceDelta(benchmark::State& state) {
  const auto m = lax_matrix(1000, true);
  std::vector<double> coefficients(static_cast<std::size_t>(state.range(0)) + 1, 0.0);
  coefficients.back() = 0.1;
  const auto v = toda::Potential::polynomial(coefficients);
  std::size_t site = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(toda::local_trace_delta(m, site, toda::EntryKind::offdiag, 0.9, v));
    site = (site + 37) % m.size();
  }
}
BENCHMARK(BM_LocalTraceDelta)->Arg(2)->Arg(4)->Arg(8)->Arg(12);

void BM_SolveEquilibrium(benchmark::State& state) {
  const toda::Grid grid(8.0, static_cast<std::size_t>(state.range(0)));
  const toda::LogKernel kernel(grid);
  const auto v = toda::Potential::polynomial({0.0, 0.0, 0.0, 0.0, 0.1});
  for (auto _ : state) benchmark::DoNotOptimize(toda::solve_equilibrium(1.0, v, kernel));
}
BENCHMARK(BM_SolveEquilibrium)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
