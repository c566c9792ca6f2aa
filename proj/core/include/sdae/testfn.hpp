#pragma once

#include <functional>
#include <vector>

#include "sdae/quadrature.hpp"

namespace sdae {

// Compactly supported C-infinity test function
//   phi(t) = p(t) * exp(-1/(1 - s^2)),  s = (t - center)/radius,
// identically zero outside (center-radius, center+radius). The polynomial
// factor p is stored lowest-degree-first in t. Derivatives of any order up to
// maxDerivOrder are exact (truncated power-series arithmetic), not finite
// differences.
struct BumpTestFunction {
  double center = 1.0;
  double radius = 0.5;
  std::vector<double> poly = {1.0};
  int maxDerivOrder = 8;

  double supportLo() const { return center - radius; }
  double supportHi() const { return center + radius; }
};

// Validates parameters: radius > 0, support inside (0, inf), a nonzero
// polynomial, finite entries. Throws ParseError on violation.
BumpTestFunction make_bump(double center, double radius, std::vector<double> poly,
                           int maxDerivOrder = 8);

// k-th derivative at t; exactly 0.0 outside the support. Throws OrderTooHigh
// for k > maxDerivOrder, NonFinite for non-finite t.
double eval_deriv(const BumpTestFunction& phi, int k, double t);

// L2 pairing of derivatives: integral of phi^(k) * psi^(j) over the overlap
// of the supports.
double l2_inner(const BumpTestFunction& phi, int k, const BumpTestFunction& psi, int j,
                const QuadratureConfig& cfg = {});

// integral of phi (0-th moment).
double total_mass(const BumpTestFunction& phi, const QuadratureConfig& cfg = {});

// Copy rescaled so the total mass is 1 (for initial-condition windows).
// ZeroTestFunction when the mass is negligible against the coefficient scale
// (a sign-changing polynomial can integrate to pure quadrature noise, and
// dividing by that noise would produce meaningless coefficients).
BumpTestFunction normalized(const BumpTestFunction& phi, const QuadratureConfig& cfg = {});

// Splits phi = lambda*phi0 + psi' with lambda = integral of phi and
// psi(t) = integral from below of (phi - lambda*phi0). psi again has compact
// support when phi0 is normalized; phi0 with total mass != 1 is rejected
// (NotNormalized).
struct BumpDecomposition {
  double lambda = 0.0;
  std::function<double(double)> psi;
  double supportLo = 0.0; // psi vanishes outside [supportLo, supportHi]
  double supportHi = 0.0;
};

BumpDecomposition decompose(const BumpTestFunction& phi, const BumpTestFunction& phi0,
                            const QuadratureConfig& cfg = {});

} // namespace sdae
