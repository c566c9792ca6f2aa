#pragma once

#include <cstdint>
#include <vector>

#include "sdae/law.hpp"
#include "sdae/pencil.hpp"
#include "sdae/testfn.hpp"
#include "sdae/types.hpp"

namespace sdae {

// Uniform time grid on [0, horizon] with the given number of increments.
struct SimGrid {
  double horizon = 4.0;
  long steps = 20000;
  double dt() const { return horizon / static_cast<double>(steps); }
};

// Pairings of one white-noise realization against phi and its derivatives,
// order-major: entry (a*m + l) approximates the pairing of component l of the
// noise with the a-th derivative of phi. Throws GridTooCoarse when a single
// node dominates the discrete L2 mass of some required derivative. Repeated
// calls with the same phi, k, and grid reuse cached weight tables, so calling
// this once per Monte Carlo sample is cheap.
Vector sample_wiener_vector(const BumpTestFunction& phi, int k, int m, const SimGrid& grid,
                            std::uint64_t seed, long sampleIndex);

// Monte Carlo sampler for the solution pairings of a problem in decomposed
// coordinates. All grid tabulations are shared across samples; each sample
// draws its own counter-based noise streams, so results do not depend on the
// order in which sample indices are visited.
class SolutionSampler {
public:
  SolutionSampler(const SdaeProblem& problem, const KcfDecomposition& kcf, BumpTestFunction phi,
                  SimGrid grid, std::uint64_t seed, const QuadratureConfig& quad = {});

  // Pairing of the decomposed solution (u, v) with phi.
  Vector sample_y(long sampleIndex) const;
  // Pairing of the original solution x = Q (u, v) with phi.
  Vector sample(long sampleIndex) const;

  int dimension() const { return n_; }
  int noiseDimension() const { return m_; }
  const SimGrid& grid() const { return grid_; }

private:
  int n_ = 0, d_ = 0, q_ = 0, m_ = 0, orderCount_ = 0;
  SimGrid grid_;
  std::uint64_t seed_ = 0;
  Matrix Q_;
  std::vector<int> blockSizes_;
  Matrix R_;
  Vector u0_;
  Vector detAlgebraic_;              // deterministic part of each v row
  Matrix lambdaMat_;                 // pairing of the fundamental matrix with phi
  std::vector<double> stepMat_;      // exp(-J dt), row-major d x d
  std::vector<double> noiseMat_;     // exp(-J dt/2) S, row-major d x m
  std::vector<double> driftVec_;     // per-step forcing kick, steps x d
  std::vector<double> nodePhiW_;     // trapezoid node weights of phi, steps+1
  std::vector<double> nodePhi0W_;    // trapezoid node weights of phi0, steps+1
  std::vector<std::vector<double>>
      incPhiW_;                      // per derivative order, per-increment weights, steps
  mutable std::vector<double> noiseBuf_;
  mutable std::vector<double> work_;
};

// Columns are independent draws with sample indices firstIndex, firstIndex+1, ...
Matrix sample_batch(const SolutionSampler& sampler, long count, long firstIndex = 0);
Matrix sample_batch_y(const SolutionSampler& sampler, long count, long firstIndex = 0);

struct EmpiricalLaw {
  Vector mean;
  Matrix cov;            // unbiased estimate
  long samples = 0;
  Vector stdErrMean;     // per component
  Vector stdErrCovDiag;  // per diagonal entry
};

// Mean and covariance of the columns, summed over a fixed pairwise tree so the
// result is independent of chunking. Throws TooFewSamples below two columns.
EmpiricalLaw empirical_law(const Matrix& samples);

struct LawComparison {
  Vector meanZ;
  Matrix covZ;
  double maxZ = 0.0;
  bool pass = false;
};

// Standard-error-scaled deviations between an analytic law and an empirical
// one. Standard errors come from the analytic covariance under a Gaussian
// null; exactly degenerate components get a floor instead of a zero divisor.
LawComparison compare_laws(const GaussianLaw& law, const EmpiricalLaw& empirical,
                           double zThreshold = 4.0);

} // namespace sdae
