#include <cstdint>
#include <vector>

#include <benchmark/benchmark.h>

#include "sdae/rng.hpp"
#include "sdae/simulate.hpp"

#include "cutset_problem.hpp"

using namespace sdae;

namespace {

void BM_FillNormals(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<double> out(n);
  std::uint32_t sample = 0;
  for (auto _ : state) {
    fill_normals(2024, sample++, 0, out.data(), n);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_FillNormals)->Arg(1024)->Arg(65536);

// Steady-state cost of one derivative-pairing draw: the weight tables are
// cached after the first call, so the loop measures the per-sample path.
void BM_WienerVector(benchmark::State& state) {
  const auto phi = make_bump(1.0, 0.9, {1.0});
  const SimGrid grid{2.0, static_cast<long>(state.range(0))};
  long index = 0;
  benchmark::DoNotOptimize(sample_wiener_vector(phi, 4, 3, grid, 42, index++));
  for (auto _ : state)
    benchmark::DoNotOptimize(sample_wiener_vector(phi, 4, 3, grid, 42, index++));
}
BENCHMARK(BM_WienerVector)->Arg(4000)->Arg(20000);

void BM_SolutionSample(benchmark::State& state) {
  const SdaeProblem problem = cutset_problem();
  const KcfDecomposition kcf = compute_kcf(problem.pencil);
  const auto phi = make_bump(1.0, 0.45, {1.0});
  const SolutionSampler sampler(problem, kcf, phi,
                                {4.0, static_cast<long>(state.range(0))}, 99);
  long index = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(index++));
}
BENCHMARK(BM_SolutionSample)->Arg(2000)->Arg(20000);

} // namespace
