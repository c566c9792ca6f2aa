#include "sdae/pencil.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace sdae {

namespace {

void require_pencil(const MatrixPencil& pencil) {
  if (pencil.A.rows() != pencil.A.cols() || pencil.B.rows() != pencil.B.cols() ||
      pencil.A.rows() != pencil.B.rows())
    fail(ErrorCode::DimensionMismatch, "pencil matrices must be square and equally sized");
  require_finite(pencil.A, "A");
  require_finite(pencil.B, "B");
}

Eigen::JacobiSVD<Matrix> svd_of(const Matrix& m, unsigned options = 0) {
  return Eigen::JacobiSVD<Matrix>(m, options);
}

void check_cond(const Matrix& m, double bound, const char* step) {
  const auto svd = svd_of(m);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (!(smin > 0.0) || smax / smin > bound)
    fail(ErrorCode::IllConditioned, std::string("condition bound exceeded at step: ") + step);
}

// Orthonormal kernel basis (columns) of m. The cutoff is rankTol times the
// larger of m's own top singular value and `scale`; passing the native
// magnitude of a matrix power as scale keeps powers that are pure roundoff
// noise from looking full-rank under a cutoff relative to themselves.
Matrix kernel_basis(const Matrix& m, double rankTol, double scale = 0.0) {
  const auto svd = svd_of(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  const double cutoff = rankTol * std::max(smax, scale);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  if (smax == 0.0) rank = 0;
  return svd.matrixV().rightCols(m.cols() - rank);
}

// Rank of a matrix power against the native magnitude scale, with the
// ambiguity window of numeric_rank.
int rank_with_scale(const Matrix& m, double rankTol, double scale) {
  const auto svd = svd_of(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double cutoff = rankTol * std::max(sv(0), scale);
  if (cutoff == 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++rank;
    if (sv(i) > cutoff / 10.0 && sv(i) < cutoff * 10.0)
      fail(ErrorCode::IllConditioned, "singular value falls inside the rank-cutoff window");
  }
  return rank;
}

// Jordan-chain staircase for a (numerically) nilpotent matrix. Returns the
// block sizes (descending), the nilpotency index, and the basis T with
// T^{-1} M T equal to the exact shift matrix.
struct Staircase {
  std::vector<int> blockSizes;
  int index = 0;
  Matrix T;
};

Staircase nilpotent_structure(const Matrix& M, double ambient, const ToleranceConfig& tol) {
  const int q = static_cast<int>(M.rows());
  Staircase out;
  out.T = Matrix::Identity(q, q);
  if (q == 0) return out;

  // Kernels of successive powers; dims[p-1] = dim ker(M^p). Cutoffs scale
  // with ||M||^p so a power that collapsed to roundoff reads as zero. The
  // scale is floored at a fraction of `ambient`, the magnitude of the matrix
  // M was cut out of: when M itself is nothing but roundoff (index-one
  // structure), judging it against its own top singular value would be
  // circular and read noise as full rank.
  const double smaxM =
      std::max({svd_of(M).singularValues()(0), 1e-3 * ambient, 1e-300});
  std::vector<Matrix> kernels;
  std::vector<int> dims;
  Matrix power = M;
  double scale = smaxM;
  for (int p = 1; p <= q; ++p) {
    kernels.push_back(kernel_basis(power, tol.rankTol, scale));
    dims.push_back(static_cast<int>(kernels.back().cols()));
    if (dims.back() == q) break;
    power = power * M;
    scale *= smaxM;
  }
  if (dims.empty() || dims.back() != q)
    fail(ErrorCode::IllConditioned, "algebraic part is not numerically nilpotent");
  const int nu = static_cast<int>(dims.size());
  out.index = nu;

  // Weyr characteristic: weyr[p] = #blocks of size >= p (1-based).
  std::vector<int> weyr(nu + 2, 0);
  for (int p = 1; p <= nu; ++p) weyr[p] = dims[p - 1] - (p >= 2 ? dims[p - 2] : 0);
  for (int p = 1; p <= nu; ++p)
    if (weyr[p] <= 0 || (p >= 2 && weyr[p] > weyr[p - 1]))
      fail(ErrorCode::IllConditioned, "nilpotent structure not resolved at rank cutoff");

  // Chains, top level down. A chain of length L stores x, Mx, ..., M^{L-1}x.
  std::vector<std::vector<Vector>> chains;
  for (int level = nu; level >= 1; --level) {
    const int need = weyr[level] - weyr[level + 1];
    // Subspace already accounted for inside ker(M^level): the kernel one
    // level down plus the image under M of chains that continue past here.
    std::vector<Vector> claimedCols;
    if (level >= 2)
      for (int c = 0; c < kernels[level - 2].cols(); ++c)
        claimedCols.push_back(kernels[level - 2].col(c));
    for (const auto& chain : chains) {
      const int len = static_cast<int>(chain.size());
      claimedCols.push_back(chain[len - level]); // element living at this level
    }
    if (need > 0) {
      Matrix claimed(q, static_cast<int>(claimedCols.size()));
      for (std::size_t c = 0; c < claimedCols.size(); ++c) claimed.col(c) = claimedCols[c];
      Matrix candidates = kernels[level - 1];
      if (claimed.cols() > 0) {
        const Eigen::HouseholderQR<Matrix> qr(claimed);
        const Matrix orth =
            qr.householderQ() * Matrix::Identity(q, std::min<int>(q, claimed.cols()));
        candidates -= orth * (orth.transpose() * candidates);
      }
      const auto svd = svd_of(candidates, Eigen::ComputeFullU);
      for (int h = 0; h < need; ++h) {
        std::vector<Vector> chain{svd.matrixU().col(h)};
        for (int s = 1; s < level; ++s) chain.push_back(M * chain.back());
        chains.push_back(std::move(chain));
      }
    }
  }

  std::stable_sort(chains.begin(), chains.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });
  int col = 0;
  for (const auto& chain : chains) {
    out.blockSizes.push_back(static_cast<int>(chain.size()));
    // Basis order M^{L-1}x, ..., Mx, x puts the restriction in upper-shift form.
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) out.T.col(col++) = *it;
  }
  if (col != q) fail(ErrorCode::IllConditioned, "chain count mismatch in staircase");
  return out;
}

} // namespace

Matrix KcfDecomposition::nilpotent() const {
  Matrix N = Matrix::Zero(q, q);
  int offset = 0;
  for (int size : blockSizes) {
    for (int r = 0; r + 1 < size; ++r) N(offset + r, offset + r + 1) = 1.0;
    offset += size;
  }
  return N;
}

RegularityReport is_regular(const MatrixPencil& pencil, const ToleranceConfig& tol) {
  require_pencil(pencil);
  const int n = pencil.size();
  std::vector<double> candidates{0.0};
  for (int k = 1; k <= n; ++k) {
    candidates.push_back(k);
    candidates.push_back(-k);
  }
  candidates.push_back(n + 1.0);

  RegularityReport report;
  for (double lambda : candidates) {
    const Matrix m = lambda * pencil.A + pencil.B;
    const double det = m.partialPivLu().determinant();
    double scale = 1.0;
    for (int i = 0; i < n; ++i) scale *= m.row(i).norm();
    if (std::isfinite(det) && std::abs(det) > tol.detTol * scale) {
      report.regular = true;
      report.witnessLambda = lambda;
      report.detValue = det;
      report.rowNormScale = scale;
      return report;
    }
  }
  return report;
}

KcfDecomposition compute_kcf(const MatrixPencil& pencil, const ToleranceConfig& tol) {
  require_pencil(pencil);
  const int n = pencil.size();
  const RegularityReport reg = is_regular(pencil, tol);
  if (!reg.regular)
    fail(ErrorCode::NotRegular, "det(lambda*A + B) vanished across the whole witness scan");
  const double lambda0 = reg.witnessLambda;

  const Matrix W = lambda0 * pencil.A + pencil.B;
  check_cond(W, tol.condBound, "invert(lambda0*A + B)");
  const Eigen::PartialPivLU<Matrix> luW(W);
  const Matrix Atil = luW.solve(pencil.A);

  // Power up until the rank stalls; the stalled power separates the
  // invertible invariant subspace (image) from the nilpotent one (kernel).
  // Ranks are judged against ||Atil||^p, the native magnitude of the power.
  const double smaxA = std::max(svd_of(Atil).singularValues()(0), 1e-300);
  int d = -1;
  Matrix stabilized;
  {
    int prevRank = n;
    Matrix prevPow = Matrix::Identity(n, n);
    double scale = smaxA;
    for (int p = 1; p <= n + 1; ++p) {
      const Matrix pow = prevPow * Atil;
      const int r = rank_with_scale(pow, tol.rankTol, scale);
      if (r == prevRank) {
        d = r;
        stabilized = prevPow;
        break;
      }
      prevRank = r;
      prevPow = pow;
      scale *= smaxA;
    }
  }
  if (d < 0) fail(ErrorCode::IllConditioned, "rank of Atil powers never stabilized");
  const int q = n - d;

  KcfDecomposition kcf;
  kcf.n = n;
  kcf.d = d;
  kcf.q = q;

  if (q == 0) {
    kcf.index = 0;
    kcf.Q = Matrix::Identity(n, n);
    check_cond(Atil, tol.condBound, "invert(G)");
    const Eigen::PartialPivLU<Matrix> luG(Atil);
    kcf.J = luG.solve(Matrix::Identity(n, n)) - lambda0 * Matrix::Identity(n, n);
    kcf.P = luG.solve(luW.solve(Matrix::Identity(n, n)));
  } else {
    const auto svd = svd_of(stabilized, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Matrix Qd = svd.matrixU().leftCols(d);
    const Matrix K = svd.matrixV().rightCols(q);

    const Matrix G = Qd.transpose() * Atil * Qd;
    const Matrix M = K.transpose() * Atil * K;
    const Matrix Iq = Matrix::Identity(q, q);
    const Matrix X = Iq - lambda0 * M;
    check_cond(X, tol.condBound, "invert(I - lambda0*M)");
    const Matrix Np = X.partialPivLu().solve(M);

    const Staircase stair = nilpotent_structure(Np, smaxA, tol);
    kcf.index = stair.index;
    kcf.blockSizes = stair.blockSizes;
    check_cond(stair.T, tol.condBound, "invert(T)");

    kcf.Q = Matrix(n, n);
    kcf.Q.leftCols(d) = Qd;
    kcf.Q.rightCols(q) = K * stair.T;
    check_cond(kcf.Q, tol.condBound, "invert(Q)");

    const Matrix P0 = (W * kcf.Q).partialPivLu().solve(Matrix::Identity(n, n));
    kcf.P = Matrix(n, n);
    if (d > 0) {
      check_cond(G, tol.condBound, "invert(G)");
      const Eigen::PartialPivLU<Matrix> luG(G);
      kcf.P.topRows(d) = luG.solve(P0.topRows(d));
      kcf.J = luG.solve(Matrix::Identity(d, d)) - lambda0 * Matrix::Identity(d, d);
    } else {
      kcf.J = Matrix(0, 0);
    }
    const Eigen::PartialPivLU<Matrix> luT(stair.T);
    kcf.P.bottomRows(q) =
        luT.solve(X.partialPivLu().solve(stair.T * P0.bottomRows(q)));
  }

  const KcfValidation check = validate_kcf(pencil, kcf, tol);
  if (!check.pass)
    fail(ErrorCode::IllConditioned,
         "computed decomposition misses the residual tolerance (residualA=" +
             std::to_string(check.residualA) + ", residualB=" +
             std::to_string(check.residualB) + ")");
  return kcf;
}

KcfValidation validate_kcf(const MatrixPencil& pencil, const KcfDecomposition& kcf,
                           const ToleranceConfig& tol) {
  require_pencil(pencil);
  const int n = pencil.size();
  if (kcf.n != n || kcf.P.rows() != n || kcf.P.cols() != n || kcf.Q.rows() != n ||
      kcf.Q.cols() != n || kcf.d + kcf.q != n || kcf.J.rows() != kcf.d)
    fail(ErrorCode::DimensionMismatch, "decomposition does not match the pencil size");

  Matrix targetA = Matrix::Zero(n, n);
  targetA.topLeftCorner(kcf.d, kcf.d) = Matrix::Identity(kcf.d, kcf.d);
  targetA.bottomRightCorner(kcf.q, kcf.q) = kcf.nilpotent();
  Matrix targetB = Matrix::Zero(n, n);
  targetB.topLeftCorner(kcf.d, kcf.d) = kcf.J;
  targetB.bottomRightCorner(kcf.q, kcf.q) = Matrix::Identity(kcf.q, kcf.q);

  KcfValidation out;
  out.residualA = (kcf.P * pencil.A * kcf.Q - targetA).cwiseAbs().maxCoeff();
  out.residualB = (kcf.P * pencil.B * kcf.Q - targetB).cwiseAbs().maxCoeff();
  out.pass = out.residualA <= tol.residualTol && out.residualB <= tol.residualTol;
  return out;
}

Vector solve_algebraic_deterministic(int blockSize,
                                     const std::vector<std::function<double(double)>>& c,
                                     const BumpTestFunction& phi, const QuadratureConfig& cfg) {
  if (blockSize < 1 || static_cast<int>(c.size()) != blockSize)
    fail(ErrorCode::DimensionMismatch, "need one input per block row");
  Vector v = Vector::Zero(blockSize);
  for (int j = 1; j <= blockSize; ++j)
    for (int k = j; k <= blockSize; ++k)
      v(j - 1) += integrate(
          [&](double t) { return c[k - 1](t) * eval_deriv(phi, k - j, t); },
          phi.supportLo(), phi.supportHi(), cfg);
  return v;
}

int numeric_rank(const Matrix& m, double rankTol, bool enforceGap) {
  const auto svd = svd_of(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double smax = sv(0);
  if (smax == 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > rankTol * smax) ++rank;
    if (enforceGap && sv(i) > rankTol * smax / 10.0 && sv(i) < rankTol * smax * 10.0)
      fail(ErrorCode::IllConditioned, "singular value falls inside the rank-cutoff window");
  }
  return rank;
}

double condition_number(const Matrix& m) {
  const auto svd = svd_of(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 1.0;
  const double smin = sv(sv.size() - 1);
  return smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
}

} // namespace sdae
