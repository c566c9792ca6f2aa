#pragma once

#include <functional>
#include <vector>

#include "sdae/types.hpp"

namespace sdae {

struct QuadratureConfig {
  double absTol = 1e-12;
  double relTol = 1e-10;
  int maxDepth = 40;
  int baseRule = 16; // Gauss-Legendre points per panel, must be even and >= 2
};

// Gauss-Legendre rule on [-1,1] for an arbitrary point count. Nodes are the
// roots of the Legendre polynomial, found by Newton iteration from the
// Chebyshev initial guess; weights 2/((1-x^2) P_n'(x)^2).
class GaussLegendreRule {
public:
  explicit GaussLegendreRule(int points);

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  int points() const { return static_cast<int>(nodes_.size()); }

  template <class F>
  double apply(F&& f, double a, double b) const {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      acc += weights_[i] * f(mid + half * nodes_[i]);
    return half * acc;
  }

private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

// Adaptive composite quadrature: each panel is accepted when the one-panel
// estimate agrees with the two-half-panel refinement, otherwise the panel is
// bisected. Throws QuadratureFailure when maxDepth bisections do not converge.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureConfig& cfg = {});

// Same scheme for a matrix-valued integrand; convergence is judged in the
// Frobenius norm so all entries share one panel subdivision.
Matrix integrate_matrix(const std::function<Matrix(double)>& f, double a, double b,
                        const QuadratureConfig& cfg = {});

} // namespace sdae
