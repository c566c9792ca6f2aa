#include "sdae/forcing.hpp"

namespace sdae {

double PiecewisePoly::eval(double t) const {
  for (const auto& piece : pieces) {
    if (t >= piece.lo && t < piece.hi) {
      double acc = 0.0;
      for (auto it = piece.coeffs.rbegin(); it != piece.coeffs.rend(); ++it)
        acc = acc * t + *it;
      return acc;
    }
  }
  return 0.0;
}

bool ForcingSpec::all_zero() const {
  for (const auto& c : components_)
    if (c.has_value()) return false;
  return true;
}

double ForcingSpec::eval(int i, double t) const {
  const auto& c = components_.at(i);
  return c.has_value() ? c->eval(t) : 0.0;
}

} // namespace sdae
