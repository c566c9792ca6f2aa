#pragma once

#include <Eigen/Dense>

#include "sdae/errors.hpp"

namespace sdae {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Shared numeric knobs. Rank decisions use a relative singular-value cutoff;
// regularity witnesses compare |det| against detTol times the Hadamard bound
// (product of row norms), which makes the test scale-invariant.
struct ToleranceConfig {
  double rankTol = 1e-10;
  double residualTol = 1e-8;
  double detTol = 1e-9;
  double condBound = 1e12; // any intermediate solve beyond this is refused
};

inline void require_finite(const Matrix& m, const char* name) {
  if (!m.allFinite()) fail(ErrorCode::NonFinite, std::string(name) + " has NaN/Inf entries");
}

inline void require_finite(const Vector& v, const char* name) {
  if (!v.allFinite()) fail(ErrorCode::NonFinite, std::string(name) + " has NaN/Inf entries");
}

} // namespace sdae
