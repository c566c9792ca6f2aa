#pragma once

#include <functional>
#include <vector>

#include "sdae/testfn.hpp"
#include "sdae/types.hpp"

namespace sdae {

// Constant-coefficient pencil (A, B) for A x' + B x = rhs.
struct MatrixPencil {
  Matrix A;
  Matrix B;

  int size() const { return static_cast<int>(A.rows()); }
};

struct RegularityReport {
  bool regular = false;
  double witnessLambda = 0.0; // first scan value whose determinant passed
  double detValue = 0.0;      // det(witnessLambda*A + B)
  double rowNormScale = 0.0;  // Hadamard bound at the witness
};

// Weierstrass-Kronecker data: P*A*Q = blockdiag(I_d, N), P*B*Q = blockdiag(J, I_q),
// where N is the exact nilpotent shift matrix determined by blockSizes
// (descending, summing to q). index = largest block (0 when q = 0).
struct KcfDecomposition {
  int n = 0;
  int d = 0;
  int q = 0;
  int index = 0;
  std::vector<int> blockSizes;
  Matrix P;
  Matrix Q;
  Matrix J; // d x d differential coefficient

  Matrix nilpotent() const; // N rebuilt from blockSizes
};

struct KcfValidation {
  bool pass = false;
  double residualA = 0.0; // max-entry |P*A*Q - blockdiag(I_d, N)|
  double residualB = 0.0; // max-entry |P*B*Q - blockdiag(J, I_q)|
};

// Scans lambda in {0, 1, -1, 2, -2, ..., n, -n, n+1} (more values than the
// degree of det(lambda*A + B), so a regular pencil cannot evade the scan) and
// accepts the first lambda with |det| above detTol times the product of row
// norms.
RegularityReport is_regular(const MatrixPencil& pencil, const ToleranceConfig& tol = {});

// Reduction recipe: with W = lambda0*A + B invertible, the matrix
// Atil = W^{-1} A has the differential part as its invertible invariant
// subspace and the algebraic part as its nilpotent one. Powers of Atil are
// taken until the rank stabilizes; an SVD of the stabilized power splits
// R^n = im + ker, the restriction to ker is brought to shift form by a
// Jordan-chain staircase, and P is assembled to satisfy the block identities.
// Throws NotRegular or IllConditioned (with the offending step named).
KcfDecomposition compute_kcf(const MatrixPencil& pencil, const ToleranceConfig& tol = {});

KcfValidation validate_kcf(const MatrixPencil& pencil, const KcfDecomposition& kcf,
                           const ToleranceConfig& tol = {});

// Deterministic part of one algebraic block: entry j (1-based) is
// sum_{k=j}^{blockSize} integral of c_k * phi^{(k-j)}. The stochastic part is
// handled by the law/simulation layers.
Vector solve_algebraic_deterministic(int blockSize,
                                     const std::vector<std::function<double(double)>>& c,
                                     const BumpTestFunction& phi,
                                     const QuadratureConfig& cfg = {});

// Rank with a relative singular-value cutoff. When enforceGap is set, any
// singular value within a factor 10 of the cutoff raises IllConditioned
// instead of silently tie-breaking.
int numeric_rank(const Matrix& m, double rankTol, bool enforceGap = false);

double condition_number(const Matrix& m);

} // namespace sdae
