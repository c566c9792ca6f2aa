#pragma once

#include <optional>
#include <vector>

#include "sdae/types.hpp"

namespace sdae {

struct PolyPiece {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> coeffs; // lowest-degree-first in t
};

// Piecewise polynomial, zero outside its pieces. Pieces are half-open [lo, hi).
struct PiecewisePoly {
  std::vector<PolyPiece> pieces;

  double eval(double t) const;
};

// Deterministic forcing, one optional piecewise polynomial per component;
// absent components are identically zero.
class ForcingSpec {
public:
  ForcingSpec() = default;
  static ForcingSpec zero(int n) { return ForcingSpec(n); }

  int size() const { return static_cast<int>(components_.size()); }
  bool is_zero(int i) const { return !components_[i].has_value(); }
  bool all_zero() const;
  double eval(int i, double t) const;
  void set(int i, PiecewisePoly poly) { components_[i] = std::move(poly); }
  const std::optional<PiecewisePoly>& component(int i) const { return components_[i]; }

private:
  explicit ForcingSpec(int n) : components_(n) {}
  std::vector<std::optional<PiecewisePoly>> components_;
};

} // namespace sdae
