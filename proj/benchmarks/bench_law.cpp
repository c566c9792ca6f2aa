#include <benchmark/benchmark.h>

#include "sdae/law.hpp"

#include "cutset_problem.hpp"

using namespace sdae;

namespace {

void BM_WhiteNoiseDerivCov(benchmark::State& state) {
  const auto phi = make_bump(1.0, 0.45, {1.0});
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(white_noise_deriv_cov(phi, 4, m));
}
BENCHMARK(BM_WhiteNoiseDerivCov)->Arg(1)->Arg(3);

// Dominated by the adaptive quadrature behind the mean and covariance
// integrals of the differential part.
void BM_FullLaw(benchmark::State& state) {
  const SdaeProblem problem = cutset_problem();
  const auto phi = make_bump(1.0, 0.45, {1.0});
  for (auto _ : state) benchmark::DoNotOptimize(full_law(problem, phi));
}
BENCHMARK(BM_FullLaw);

void BM_AbsContinuity(benchmark::State& state) {
  const SdaeProblem problem = cutset_problem();
  const auto phi = make_bump(1.0, 0.45, {1.0});
  for (auto _ : state) benchmark::DoNotOptimize(abs_continuity(problem, phi));
}
BENCHMARK(BM_AbsContinuity);

} // namespace
