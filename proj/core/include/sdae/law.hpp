#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sdae/forcing.hpp"
#include "sdae/pencil.hpp"
#include "sdae/testfn.hpp"

namespace sdae {

using Signal = std::function<double(double)>;

// Full problem statement: pencil, noise matrix (n x m), deterministic forcing,
// initial condition u0 (paired against the window phi0, which must integrate
// to 1), and the window itself.
struct SdaeProblem {
  MatrixPencil pencil;
  Matrix Lambda;       // n x m noise coefficients
  ForcingSpec forcing; // n components
  Vector u0;           // length d (differential part); checked at use
  BumpTestFunction phi0;

  int n() const { return pencil.size(); }
  int m() const { return static_cast<int>(Lambda.cols()); }
};

SdaeProblem make_problem(MatrixPencil pencil, Matrix Lambda, ForcingSpec forcing, Vector u0,
                         BumpTestFunction phi0);

// Law of a finite-dimensional projection of the solution: exact Gaussian with
// the given mean and covariance. degenerateIndices lists components whose
// variance is below varianceTol * (largest diagonal entry, or 1 if all zero).
struct GaussianLaw {
  Vector mean;
  Matrix cov;
  int rank = 0;
  std::vector<int> degenerateIndices;
};

GaussianLaw make_gaussian_law(Vector mean, Matrix cov, double rankTol = 1e-10);

// Fundamental solution Phi(t) = exp(-J t) * C normalized so that the pairing
// of Phi against phi0 is the identity. SingularNormalization when the
// normalizing integral is not invertible at the condition bound.
struct FundamentalMatrix {
  Matrix J;
  Matrix C;

  Matrix Phi(double t) const;    // exp(-J t) * C
  Matrix PhiInv(double t) const; // C^{-1} * exp(J t)
};

FundamentalMatrix fundamental_matrix(const Matrix& J, const BumpTestFunction& phi0,
                                     const QuadratureConfig& quad = {},
                                     const ToleranceConfig& tol = {});

// Covariance of the stacked pairings (<xi, phi>, <xi, phi'>, ..., up to order
// k-1) for m independent white-noise components; layout is order-major, i.e.
// index = order*m + component. Blocks with odd order sum are exactly zero;
// even blocks are (-1)^{(i-j)/2} * ||phi^{((i+j)/2)}||^2 * I_m.
Matrix white_noise_deriv_cov(const BumpTestFunction& phi, int k, int m,
                             const QuadratureConfig& quad = {});

// Whether that covariance is numerically nonsingular (phi "of order k").
bool is_in_E(const BumpTestFunction& phi, int k, int m, const QuadratureConfig& quad = {},
             const ToleranceConfig& tol = {});

// Law of one algebraic block of size q1 with noise rows rho (q1 x m) and
// deterministic inputs c. Covariance is H * W * H^T for the shifted-row
// matrix H built from rho.
GaussianLaw algebraic_block_law(const Matrix& rho, const std::vector<Signal>& c,
                                const BumpTestFunction& phi, const QuadratureConfig& quad = {},
                                const ToleranceConfig& tol = {});

// Law of the differential part alone: dimension d, mean lambda*u0 + <b, M>,
// covariance integral of M S S^T M^T with the kernel
// M(t) = (int_0^t (lambda*Phi*phi0 - Phi*phi)) * Phi^{-1}(t).
GaussianLaw differential_law(const Matrix& J, const Matrix& S, const std::vector<Signal>& b,
                             const Vector& u0, const BumpTestFunction& phi,
                             const BumpTestFunction& phi0, const QuadratureConfig& quad = {},
                             const ToleranceConfig& tol = {});

// Joint law of all KCF coordinates y = (u, v) at the test function, using a
// caller-supplied decomposition (so reference reductions can be injected).
GaussianLaw joint_kcf_law(const SdaeProblem& problem, const KcfDecomposition& kcf,
                          const BumpTestFunction& phi, const QuadratureConfig& quad = {},
                          const ToleranceConfig& tol = {});

// Law of <x, phi> in the original variables: computes the KCF, the joint law
// above, and maps by x = Q y.
GaussianLaw full_law(const SdaeProblem& problem, const BumpTestFunction& phi,
                     const QuadratureConfig& quad = {}, const ToleranceConfig& tol = {});

GaussianLaw full_law(const SdaeProblem& problem, const KcfDecomposition& kcf,
                     const BumpTestFunction& phi, const QuadratureConfig& quad = {},
                     const ToleranceConfig& tol = {});

struct SchurResult {
  Matrix schur;                    // A - B D^{-1} C for [[A,B],[C,D]]
  double detIdentityResidual = 0.0; // |det M - det D * det schur| (relative)
};

// topSize is the order of the leading block A. Throws SingularD when D fails
// the condition bound.
SchurResult schur_complement(const Matrix& blockMatrix, int topSize,
                             const ToleranceConfig& tol = {});

// Absolute-continuity decision for the law of <y, phi> on R^n.
// Provenance "theorem" means the sufficient conditions held (full-rank noise,
// m >= n, an invertible algebraic sub-block found by column permutation, and
// the derivative covariance nonsingular, which is automatic for index <= 4);
// "numeric-rank" means the decision fell back to the computed covariance.
struct AbsContReport {
  bool absolutelyContinuous = false;
  bool testFunctionInE = false;
  std::string provenance; // "theorem" | "numeric-rank"
  std::vector<int> blockAlgebraicRank; // per block: last row with nonzero noise
  std::vector<int> degenerateComponents; // 0-based KCF coordinate indices
  int covarianceRank = 0;
  GaussianLaw law; // joint law of y used for the decision
  std::vector<std::string> notes;
};

AbsContReport abs_continuity(const SdaeProblem& problem, const BumpTestFunction& phi,
                             const QuadratureConfig& quad = {}, const ToleranceConfig& tol = {});

// P-transformed problem data shared by the law and simulation layers.
struct TransformedProblem {
  Matrix S;              // d x m rows of P*Lambda
  Matrix R;              // q x m rows of P*Lambda
  std::vector<Signal> b; // d transformed forcing components
  std::vector<Signal> c; // q transformed forcing components
};

TransformedProblem transform_problem(const SdaeProblem& problem, const KcfDecomposition& kcf);

} // namespace sdae
