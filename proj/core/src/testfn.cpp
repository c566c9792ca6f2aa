#include "sdae/testfn.hpp"

#include <algorithm>
#include <cmath>

namespace sdae {

namespace {

// Truncated power series in h around the evaluation point, coefficients
// series[j] = c_j with value sum c_j h^j. Length is fixed at order+1.
using Series = std::vector<double>;

Series mul(const Series& a, const Series& b) {
  Series out(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; i + j < a.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

// 1/a with a[0] != 0, by the standard convolution recurrence.
Series reciprocal(const Series& a) {
  Series out(a.size(), 0.0);
  out[0] = 1.0 / a[0];
  for (std::size_t k = 1; k < a.size(); ++k) {
    double acc = 0.0;
    for (std::size_t j = 1; j <= k; ++j) acc += a[j] * out[k - j];
    out[k] = -acc / a[0];
  }
  return out;
}

// exp(a) via e' = a' e:  e_k = (1/k) sum_{j=1..k} j a_j e_{k-j}.
Series exponential(const Series& a) {
  Series out(a.size(), 0.0);
  out[0] = std::exp(a[0]);
  for (std::size_t k = 1; k < a.size(); ++k) {
    double acc = 0.0;
    for (std::size_t j = 1; j <= k; ++j) acc += static_cast<double>(j) * a[j] * out[k - j];
    out[k] = acc / static_cast<double>(k);
  }
  return out;
}

// p(t + h) as a series in h: Horner with the linear series t + h.
Series poly_at(const std::vector<double>& poly, double t, std::size_t len) {
  Series out(len, 0.0);
  out[0] = poly.back();
  for (std::size_t ci = poly.size() - 1; ci-- > 0;) {
    Series next(len, 0.0);
    next[0] = out[0] * t + poly[ci];
    for (std::size_t j = 1; j < len; ++j) next[j] = out[j] * t + out[j - 1];
    out = std::move(next);
  }
  return out;
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

} // namespace

BumpTestFunction make_bump(double center, double radius, std::vector<double> poly,
                           int maxDerivOrder) {
  if (!std::isfinite(center) || !std::isfinite(radius))
    fail(ErrorCode::ParseError, "test function parameters must be finite");
  if (radius <= 0.0) fail(ErrorCode::ParseError, "test function radius must be positive");
  if (center - radius < 0.0)
    fail(ErrorCode::ParseError, "test function support must lie inside (0, inf)");
  if (poly.empty() ||
      std::all_of(poly.begin(), poly.end(), [](double c) { return c == 0.0; }))
    fail(ErrorCode::ParseError, "test function polynomial must be nonzero");
  for (double c : poly)
    if (!std::isfinite(c)) fail(ErrorCode::ParseError, "polynomial coefficient not finite");
  if (maxDerivOrder < 0) fail(ErrorCode::ParseError, "maxDerivOrder must be >= 0");
  return BumpTestFunction{center, radius, std::move(poly), maxDerivOrder};
}

double eval_deriv(const BumpTestFunction& phi, int k, double t) {
  if (!std::isfinite(t)) fail(ErrorCode::NonFinite, "evaluation point is not finite");
  if (k < 0 || k > phi.maxDerivOrder)
    fail(ErrorCode::OrderTooHigh, "derivative order " + std::to_string(k) +
                                      " exceeds maxDerivOrder " +
                                      std::to_string(phi.maxDerivOrder));
  const double s0 = (t - phi.center) / phi.radius;
  if (std::abs(s0) >= 1.0) return 0.0; // smooth extension by zero

  const std::size_t len = static_cast<std::size_t>(k) + 1;
  // s = s0 + h/radius as a series in h.
  Series s(len, 0.0);
  s[0] = s0;
  if (len > 1) s[1] = 1.0 / phi.radius;
  Series oneMinusS2 = mul(s, s);
  for (auto& c : oneMinusS2) c = -c;
  oneMinusS2[0] += 1.0;
  Series arg = reciprocal(oneMinusS2);
  for (auto& c : arg) c = -c;
  const Series bump = exponential(arg);
  const Series full = mul(poly_at(phi.poly, t, len), bump);
  return full[static_cast<std::size_t>(k)] * factorial(k);
}

double l2_inner(const BumpTestFunction& phi, int k, const BumpTestFunction& psi, int j,
                const QuadratureConfig& cfg) {
  const double lo = std::max(phi.supportLo(), psi.supportLo());
  const double hi = std::min(phi.supportHi(), psi.supportHi());
  if (lo >= hi) return 0.0;
  return integrate([&](double t) { return eval_deriv(phi, k, t) * eval_deriv(psi, j, t); },
                   lo, hi, cfg);
}

double total_mass(const BumpTestFunction& phi, const QuadratureConfig& cfg) {
  return integrate([&](double t) { return eval_deriv(phi, 0, t); }, phi.supportLo(),
                   phi.supportHi(), cfg);
}

BumpTestFunction normalized(const BumpTestFunction& phi, const QuadratureConfig& cfg) {
  const double mass = total_mass(phi, cfg);
  // Judge the mass against the size of the function itself: an odd polynomial
  // part cancels to quadrature noise, and rescaling by that noise would blow
  // the coefficients up to garbage.
  const double reach = std::max(std::abs(phi.supportLo()), std::abs(phi.supportHi()));
  double coeffScale = 0.0;
  double power = 1.0;
  for (double c : phi.poly) {
    coeffScale += std::abs(c) * power;
    power *= reach;
  }
  coeffScale *= phi.supportHi() - phi.supportLo();
  if (std::abs(mass) < 1e-9 * std::max(coeffScale, 1e-300))
    fail(ErrorCode::ZeroTestFunction, "cannot normalize a test function with zero mass");
  BumpTestFunction out = phi;
  for (auto& c : out.poly) c /= mass;
  return out;
}

BumpDecomposition decompose(const BumpTestFunction& phi, const BumpTestFunction& phi0,
                            const QuadratureConfig& cfg) {
  const double mass0 = total_mass(phi0, cfg);
  if (std::abs(mass0 - 1.0) > 1e-6)
    fail(ErrorCode::NotNormalized,
         "phi0 must have total mass 1 (got " + std::to_string(mass0) + ")");
  BumpDecomposition out;
  out.lambda = total_mass(phi, cfg);
  out.supportLo = std::min(phi.supportLo(), phi0.supportLo());
  out.supportHi = std::max(phi.supportHi(), phi0.supportHi());
  const double lo = out.supportLo;
  const double hi = out.supportHi;
  const double lambda = out.lambda;
  out.psi = [phi, phi0, lambda, lo, hi, cfg](double t) {
    if (t <= lo) return 0.0;
    const double upper = std::min(t, hi);
    return integrate(
        [&](double s) { return eval_deriv(phi, 0, s) - lambda * eval_deriv(phi0, 0, s); }, lo,
        upper, cfg);
  };
  return out;
}

} // namespace sdae
