#include "sdae/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace sdae {

GaussLegendreRule::GaussLegendreRule(int points) {
  if (points < 2 || points % 2 != 0)
    fail(ErrorCode::QuadratureFailure, "baseRule must be an even integer >= 2");
  const int n = points;
  nodes_.resize(n);
  weights_.resize(n);
  // Roots come in +/- pairs; iterate on the upper half only.
  for (int i = 0; i < n / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Evaluate P_n and P_n' by the three-term recurrence.
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes_[i] = -x;
    nodes_[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights_[i] = w;
    weights_[n - 1 - i] = w;
  }
}

namespace {

// One adaptive panel: accept when coarse vs. bisected estimates agree to the
// panel's share of the absolute budget (or the relative one), else recurse.
template <class Value, class Eval, class Norm>
Value adapt(const Eval& eval, const Norm& norm, double a, double b, const Value& coarse,
            double absTol, double relTol, int depth, int maxDepth, double span) {
  const double mid = 0.5 * (a + b);
  const Value left = eval(a, mid);
  const Value right = eval(mid, b);
  const Value fine = left + right;
  const double err = norm(fine - coarse);
  const double localAbs = absTol * ((b - a) / span);
  if (err <= std::max(localAbs, relTol * norm(fine))) return fine;
  if (depth >= maxDepth)
    fail(ErrorCode::QuadratureFailure, "panel refinement did not converge (maxDepth reached)");
  return adapt(eval, norm, a, mid, left, absTol, relTol, depth + 1, maxDepth, span) +
         adapt(eval, norm, mid, b, right, absTol, relTol, depth + 1, maxDepth, span);
}

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureConfig& cfg) {
  if (!(a <= b)) fail(ErrorCode::QuadratureFailure, "integration bounds out of order");
  if (a == b) return 0.0;
  const GaussLegendreRule rule(cfg.baseRule);
  auto eval = [&](double lo, double hi) { return rule.apply(f, lo, hi); };
  auto norm = [](double v) { return std::abs(v); };
  return adapt<double>(eval, norm, a, b, eval(a, b), cfg.absTol, cfg.relTol, 0, cfg.maxDepth,
                       b - a);
}

Matrix integrate_matrix(const std::function<Matrix(double)>& f, double a, double b,
                        const QuadratureConfig& cfg) {
  if (!(a <= b)) fail(ErrorCode::QuadratureFailure, "integration bounds out of order");
  const GaussLegendreRule rule(cfg.baseRule);
  auto eval = [&](double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    Matrix acc = rule.weights()[0] * f(mid + half * rule.nodes()[0]);
    for (int i = 1; i < rule.points(); ++i)
      acc += rule.weights()[i] * f(mid + half * rule.nodes()[i]);
    return Matrix(half * acc);
  };
  auto norm = [](const Matrix& m) { return m.norm(); };
  if (a == b) return Matrix::Zero(f(a).rows(), f(a).cols());
  return adapt<Matrix>(eval, norm, a, b, eval(a, b), cfg.absTol, cfg.relTol, 0, cfg.maxDepth,
                       b - a);
}

} // namespace sdae
