#include "sdae/simulate.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include "sdae/rng.hpp"

#include <algorithm>
#include <cmath>

namespace sdae {

namespace {

constexpr int kResync = 256; // steps between exact re-anchoring of exp(-J t)

std::uint32_t checked_sample_index(long sampleIndex) {
  if (sampleIndex < 0 || sampleIndex > 0xFFFFFFFFL)
    fail(ErrorCode::DimensionMismatch, "sample index must lie in [0, 2^32)");
  return static_cast<std::uint32_t>(sampleIndex);
}

void validate_grid(const SimGrid& grid) {
  if (!(grid.horizon > 0.0) || grid.steps < 2)
    fail(ErrorCode::GridTooCoarse, "simulation grid needs a positive horizon and >= 2 steps");
}

void require_support_covered(const BumpTestFunction& phi, const SimGrid& grid,
                             const char* name) {
  if (phi.supportLo() < 0.0 || phi.supportHi() > grid.horizon)
    fail(ErrorCode::GridTooCoarse, std::string("support of ") + name +
                                       " extends beyond the simulation window [0, horizon]");
}

// A derivative is resolved when no single node carries more than 1% of its
// discrete L2 mass; otherwise the Wiener pairings would be dominated by a
// handful of increments.
void require_resolved(const std::vector<double>& nodeValues, double dt, const std::string& what) {
  double maxSq = 0.0, sumSq = 0.0;
  for (double v : nodeValues) {
    maxSq = std::max(maxSq, v * v);
    sumSq += v * v;
  }
  if (sumSq == 0.0) return;
  if (dt * maxSq > 0.01 * dt * sumSq)
    fail(ErrorCode::GridTooCoarse, "grid does not resolve " + what);
}

std::vector<double> tabulate(const BumpTestFunction& phi, int order, const SimGrid& grid) {
  std::vector<double> vals(grid.steps + 1);
  const double dt = grid.dt();
  for (long i = 0; i <= grid.steps; ++i) vals[i] = eval_deriv(phi, order, dt * i);
  return vals;
}

// Deterministic pairwise reduction over columns of a matrix expression.
template <class Emit>
Matrix pairwise_sum(long lo, long hi, int rows, int cols, const Emit& emit) {
  if (hi - lo <= 64) {
    Matrix acc = Matrix::Zero(rows, cols);
    for (long i = lo; i < hi; ++i) acc += emit(i);
    return acc;
  }
  const long mid = lo + (hi - lo) / 2;
  return pairwise_sum(lo, mid, rows, cols, emit) + pairwise_sum(mid, hi, rows, cols, emit);
}

} // namespace

// The increment weights depend only on (phi, k, grid), while Monte Carlo
// loops call sample_wiener_vector many times with those fixed; tabulating the
// derivative tables per call would dominate the runtime, so the last set of
// weights is kept per thread.
struct WienerWeightTables {
  double center = 0.0, radius = 0.0, horizon = 0.0;
  long steps = -1;
  int k = -1, maxOrder = -1;
  std::vector<double> poly;
  std::vector<std::vector<double>> weights;

  bool matches(const BumpTestFunction& phi, int wantK, const SimGrid& grid) const {
    return wantK == k && grid.steps == steps && grid.horizon == horizon &&
           phi.center == center && phi.radius == radius && phi.maxDerivOrder == maxOrder &&
           phi.poly == poly;
  }

  void rebuild(const BumpTestFunction& phi, int wantK, const SimGrid& grid) {
    const double dt = grid.dt();
    const double sqrtDt = std::sqrt(dt);
    std::vector<std::vector<double>> next(wantK);
    for (int a = 0; a < wantK; ++a) {
      const std::vector<double> vals = tabulate(phi, a, grid);
      require_resolved(vals, dt, "derivative order " + std::to_string(a) + " of phi");
      next[a].resize(grid.steps);
      for (long i = 0; i < grid.steps; ++i)
        next[a][i] = 0.5 * (vals[i] + vals[i + 1]) * sqrtDt;
    }
    weights = std::move(next);
    center = phi.center;
    radius = phi.radius;
    maxOrder = phi.maxDerivOrder;
    poly = phi.poly;
    horizon = grid.horizon;
    steps = grid.steps;
    k = wantK;
  }
};

Vector sample_wiener_vector(const BumpTestFunction& phi, int k, int m, const SimGrid& grid,
                            std::uint64_t seed, long sampleIndex) {
  validate_grid(grid);
  if (k < 0 || m < 0) fail(ErrorCode::DimensionMismatch, "orders and components must be >= 0");
  const std::uint32_t sample = checked_sample_index(sampleIndex);
  if (k == 0 || m == 0) return Vector::Zero(m * k);
  if (k - 1 > phi.maxDerivOrder)
    fail(ErrorCode::OrderTooHigh, "Wiener pairing needs derivative order " + std::to_string(k - 1));
  require_support_covered(phi, grid, "phi");

  thread_local WienerWeightTables tables;
  if (!tables.matches(phi, k, grid)) tables.rebuild(phi, k, grid);

  std::vector<double> buf(grid.steps);
  Vector out = Vector::Zero(m * k);
  for (int l = 0; l < m; ++l) {
    fill_normals(seed, sample, static_cast<std::uint32_t>(l), buf.data(), grid.steps);
    for (int a = 0; a < k; ++a) {
      const double* w = tables.weights[a].data();
      double acc = 0.0;
      for (long i = 0; i < grid.steps; ++i) acc += w[i] * buf[i];
      out(a * m + l) = acc;
    }
  }
  return out;
}

SolutionSampler::SolutionSampler(const SdaeProblem& problem, const KcfDecomposition& kcf,
                                 BumpTestFunction phi, SimGrid grid, std::uint64_t seed,
                                 const QuadratureConfig& quad)
    : grid_(grid), seed_(seed) {
  validate_grid(grid_);
  if (kcf.n != problem.n())
    fail(ErrorCode::DimensionMismatch, "decomposition size does not match the problem");
  n_ = kcf.n;
  d_ = kcf.d;
  q_ = kcf.q;
  m_ = problem.m();
  Q_ = kcf.Q;
  blockSizes_ = kcf.blockSizes;
  orderCount_ = blockSizes_.empty()
                    ? 0
                    : *std::max_element(blockSizes_.begin(), blockSizes_.end());
  if (orderCount_ > 0 && orderCount_ - 1 > phi.maxDerivOrder)
    fail(ErrorCode::OrderTooHigh, "algebraic part needs derivative order " +
                                      std::to_string(orderCount_ - 1));
  require_support_covered(phi, grid_, "phi");

  const TransformedProblem tp = transform_problem(problem, kcf);
  R_ = tp.R;

  const double dt = grid_.dt();
  const double sqrtDt = std::sqrt(dt);
  const long steps = grid_.steps;

  // Node weights and increment weights of phi; increments fold in sqrt(dt) so
  // they multiply raw standard normals directly.
  const std::vector<double> phiVals = tabulate(phi, 0, grid_);
  require_resolved(phiVals, dt, "phi");
  nodePhiW_.resize(steps + 1);
  for (long i = 0; i <= steps; ++i)
    nodePhiW_[i] = phiVals[i] * dt * ((i == 0 || i == steps) ? 0.5 : 1.0);
  incPhiW_.resize(orderCount_);
  for (int a = 0; a < orderCount_; ++a) {
    const std::vector<double> vals = a == 0 ? phiVals : tabulate(phi, a, grid_);
    require_resolved(vals, dt, "derivative order " + std::to_string(a) + " of phi");
    incPhiW_[a].resize(steps);
    for (long i = 0; i < steps; ++i) incPhiW_[a][i] = 0.5 * (vals[i] + vals[i + 1]) * sqrtDt;
  }

  // Deterministic part of the algebraic rows.
  detAlgebraic_ = Vector::Zero(q_);
  if (q_ > 0 && !problem.forcing.all_zero()) {
    int off = 0;
    for (int size : blockSizes_) {
      std::vector<std::function<double(double)>> sub(tp.c.begin() + off,
                                                     tp.c.begin() + off + size);
      detAlgebraic_.segment(off, size) = solve_algebraic_deterministic(size, sub, phi, quad);
      off += size;
    }
  }

  if (d_ > 0) {
    require_support_covered(problem.phi0, grid_, "phi0");
    if (std::abs(total_mass(problem.phi0, quad) - 1.0) > 1e-6)
      fail(ErrorCode::NotNormalized, "phi0 must integrate to 1");
    const std::vector<double> phi0Vals = tabulate(problem.phi0, 0, grid_);
    require_resolved(phi0Vals, dt, "phi0");
    nodePhi0W_.resize(steps + 1);
    for (long i = 0; i <= steps; ++i)
      nodePhi0W_[i] = phi0Vals[i] * dt * ((i == 0 || i == steps) ? 0.5 : 1.0);

    const FundamentalMatrix fm = fundamental_matrix(kcf.J, problem.phi0, quad);
    const Matrix stepBack = Matrix((-kcf.J * dt).exp());
    const Matrix half = Matrix((-kcf.J * (0.5 * dt)).exp());

    // Pairing of the fundamental matrix with phi by the trapezoid rule on the
    // simulation grid, re-anchored periodically against the exact exponential.
    lambdaMat_ = Matrix::Zero(d_, d_);
    Matrix expBack;
    for (long i = 0; i <= steps; ++i) {
      if (i % kResync == 0)
        expBack = Matrix((-kcf.J * (dt * i)).exp());
      else
        expBack = stepBack * expBack;
      lambdaMat_ += nodePhiW_[i] * expBack;
    }
    lambdaMat_ *= fm.C;

    const Matrix stepRow = stepBack;
    stepMat_.resize(d_ * d_);
    for (int r = 0; r < d_; ++r)
      for (int c = 0; c < d_; ++c) stepMat_[r * d_ + c] = stepRow(r, c);
    const Matrix kick = half * tp.S * sqrtDt;
    noiseMat_.resize(d_ * m_);
    for (int r = 0; r < d_; ++r)
      for (int l = 0; l < m_; ++l) noiseMat_[r * m_ + l] = kick(r, l);

    if (!problem.forcing.all_zero()) {
      driftVec_.resize(steps * d_);
      for (long i = 0; i < steps; ++i) {
        Vector b(d_);
        const double tm = dt * i + 0.5 * dt;
        for (int r = 0; r < d_; ++r) b(r) = tp.b[r](tm);
        const Vector kickB = half * b * dt;
        for (int r = 0; r < d_; ++r) driftVec_[i * d_ + r] = kickB(r);
      }
    }

    u0_ = problem.u0.size() == d_ ? problem.u0 : Vector::Zero(d_);
  }

  noiseBuf_.resize(static_cast<std::size_t>(m_) * steps);
  work_.resize(static_cast<std::size_t>(4) * std::max(d_, 1));
}

Vector SolutionSampler::sample_y(long sampleIndex) const {
  const long steps = grid_.steps;
  const std::uint32_t sample = checked_sample_index(sampleIndex);
  for (int l = 0; l < m_; ++l)
    fill_normals(seed_, sample, static_cast<std::uint32_t>(l),
                 noiseBuf_.data() + static_cast<std::size_t>(l) * steps, steps);

  // Wiener pairings per derivative order and component.
  std::vector<double> wv(static_cast<std::size_t>(orderCount_) * m_, 0.0);
  for (int l = 0; l < m_; ++l) {
    const double* noise = noiseBuf_.data() + static_cast<std::size_t>(l) * steps;
    for (int a = 0; a < orderCount_; ++a) {
      const double* w = incPhiW_[a].data();
      double acc = 0.0;
      for (long i = 0; i < steps; ++i) acc += w[i] * noise[i];
      wv[static_cast<std::size_t>(a) * m_ + l] = acc;
    }
  }

  Vector y = Vector::Zero(n_);

  if (d_ > 0) {
    double* u = work_.data();
    double* uNext = u + d_;
    double* accU = uNext + d_;
    double* acc0 = accU + d_;
    std::fill(work_.begin(), work_.end(), 0.0);
    const bool haveDrift = !driftVec_.empty();
    for (long i = 0; i < steps; ++i) {
      const double w1 = nodePhiW_[i];
      const double w0 = nodePhi0W_[i];
      for (int r = 0; r < d_; ++r) {
        accU[r] += w1 * u[r];
        acc0[r] += w0 * u[r];
      }
      for (int r = 0; r < d_; ++r) {
        double t = 0.0;
        for (int c = 0; c < d_; ++c) t += stepMat_[r * d_ + c] * u[c];
        const double* nm = noiseMat_.data() + static_cast<std::size_t>(r) * m_;
        for (int l = 0; l < m_; ++l)
          t += nm[l] * noiseBuf_[static_cast<std::size_t>(l) * steps + i];
        if (haveDrift) t += driftVec_[static_cast<std::size_t>(i) * d_ + r];
        uNext[r] = t;
      }
      std::swap(u, uNext);
    }
    for (int r = 0; r < d_; ++r) {
      accU[r] += nodePhiW_[steps] * u[r];
      acc0[r] += nodePhi0W_[steps] * u[r];
    }
    Vector rawPhi(d_), rawPhi0(d_);
    for (int r = 0; r < d_; ++r) {
      rawPhi(r) = accU[r];
      rawPhi0(r) = acc0[r];
    }
    // The raw path starts from zero at t = 0; correct by the homogeneous
    // solution so the phi0 pairing matches u0.
    y.head(d_) = rawPhi + lambdaMat_ * (u0_ - rawPhi0);
  }

  int off = 0;
  for (int size : blockSizes_) {
    for (int j = 0; j < size; ++j) {
      double acc = detAlgebraic_(off + j);
      for (int a = 0; j + a < size; ++a) {
        const auto row = R_.row(off + j + a);
        for (int l = 0; l < m_; ++l)
          acc += row(l) * wv[static_cast<std::size_t>(a) * m_ + l];
      }
      y(d_ + off + j) = acc;
    }
    off += size;
  }
  return y;
}

Vector SolutionSampler::sample(long sampleIndex) const { return Q_ * sample_y(sampleIndex); }

Matrix sample_batch(const SolutionSampler& sampler, long count, long firstIndex) {
  Matrix out(sampler.dimension(), count);
  for (long i = 0; i < count; ++i) out.col(i) = sampler.sample(firstIndex + i);
  return out;
}

Matrix sample_batch_y(const SolutionSampler& sampler, long count, long firstIndex) {
  Matrix out(sampler.dimension(), count);
  for (long i = 0; i < count; ++i) out.col(i) = sampler.sample_y(firstIndex + i);
  return out;
}

EmpiricalLaw empirical_law(const Matrix& samples) {
  const long n = samples.rows();
  const long count = samples.cols();
  if (count < 2) fail(ErrorCode::TooFewSamples, "need at least two samples");
  EmpiricalLaw out;
  out.samples = count;
  out.mean = pairwise_sum(0, count, static_cast<int>(n), 1,
                          [&](long i) { return Matrix(samples.col(i)); }) /
             static_cast<double>(count);
  const Vector mean = out.mean;
  out.cov = pairwise_sum(0, count, static_cast<int>(n), static_cast<int>(n),
                         [&](long i) {
                           const Vector c = samples.col(i) - mean;
                           return Matrix(c * c.transpose());
                         }) /
            static_cast<double>(count - 1);
  out.stdErrMean = (out.cov.diagonal() / static_cast<double>(count)).cwiseMax(0.0).cwiseSqrt();
  out.stdErrCovDiag =
      out.cov.diagonal() * std::sqrt(2.0 / static_cast<double>(count - 1));
  return out;
}

LawComparison compare_laws(const GaussianLaw& law, const EmpiricalLaw& empirical,
                           double zThreshold) {
  const long n = law.mean.size();
  if (empirical.mean.size() != n || empirical.cov.rows() != n)
    fail(ErrorCode::DimensionMismatch, "law and empirical law have different sizes");
  if (empirical.samples < 2) fail(ErrorCode::TooFewSamples, "need at least two samples");

  const double N = static_cast<double>(empirical.samples);
  const double diagMax = n > 0 ? std::max(law.cov.diagonal().maxCoeff(), 0.0) : 0.0;
  const double floor = 1e-12 * std::max(1.0, diagMax);

  LawComparison out;
  out.meanZ = Vector::Zero(n);
  out.covZ = Matrix::Zero(n, n);
  for (long i = 0; i < n; ++i) {
    const double se = std::max(std::sqrt(std::max(law.cov(i, i), 0.0) / N), floor);
    out.meanZ(i) = std::abs(empirical.mean(i) - law.mean(i)) / se;
  }
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) {
      const double var =
          (law.cov(i, i) * law.cov(j, j) + law.cov(i, j) * law.cov(i, j)) / (N - 1.0);
      const double se = std::max(std::sqrt(std::max(var, 0.0)), floor);
      out.covZ(i, j) = std::abs(empirical.cov(i, j) - law.cov(i, j)) / se;
    }
  out.maxZ = std::max(out.meanZ.size() > 0 ? out.meanZ.maxCoeff() : 0.0,
                      out.covZ.size() > 0 ? out.covZ.maxCoeff() : 0.0);
  out.pass = std::isfinite(out.maxZ) && out.maxZ <= zThreshold;
  return out;
}

} // namespace sdae
