#include <random>

#include <benchmark/benchmark.h>

#include "sdae/law.hpp"
#include "sdae/pencil.hpp"

using namespace sdae;

namespace {

// Regular pencil of size n with an n/2-dimensional differential part and
// index-2 nilpotent chains, hidden behind random rotations. The differential
// spectrum is kept mild so the decomposition is well conditioned at any size.
MatrixPencil hidden_pencil(int n) {
  const int d = n / 2;
  const int q = n - d;
  std::mt19937 gen(1234 + n);
  std::normal_distribution<double> normal;

  Matrix canonA = Matrix::Zero(n, n);
  canonA.topLeftCorner(d, d).setIdentity();
  for (int i = 0; i + 1 < q; i += 2) canonA(d + i, d + i + 1) = 1.0;
  Matrix canonB = Matrix::Identity(n, n);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) canonB(r, c) = (r == c ? 0.5 : 0.0) + 0.2 * normal(gen);

  const auto rotation = [&] {
    Matrix G(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) G(r, c) = normal(gen);
    return Matrix(Eigen::HouseholderQR<Matrix>(G).householderQ());
  };
  const Matrix pinv = rotation();
  const Matrix qinv = rotation();
  return {pinv * canonA * qinv, pinv * canonB * qinv};
}

void BM_ComputeKcf(benchmark::State& state) {
  const MatrixPencil pencil = hidden_pencil(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(compute_kcf(pencil));
}
BENCHMARK(BM_ComputeKcf)->Arg(4)->Arg(8)->Arg(12);

void BM_ValidateKcf(benchmark::State& state) {
  const MatrixPencil pencil = hidden_pencil(static_cast<int>(state.range(0)));
  const KcfDecomposition kcf = compute_kcf(pencil);
  for (auto _ : state) benchmark::DoNotOptimize(validate_kcf(pencil, kcf));
}
BENCHMARK(BM_ValidateKcf)->Arg(8);

void BM_SchurComplement(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937 gen(77);
  std::normal_distribution<double> normal;
  Matrix M(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) M(r, c) = normal(gen) + (r == c ? 3.0 : 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(schur_complement(M, n / 2));
}
BENCHMARK(BM_SchurComplement)->Arg(4)->Arg(8);

} // namespace
