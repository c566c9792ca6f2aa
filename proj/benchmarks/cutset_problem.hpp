#pragma once

#include "sdae/law.hpp"

// Two-inductor cutset network with unit constants: 4 variables, 3 noise
// channels, index 2. Shared workload for the law and sampling benchmarks.
inline sdae::SdaeProblem cutset_problem() {
  using sdae::Matrix;
  Matrix A = Matrix::Zero(4, 4);
  A(2, 2) = 1.0;
  A(3, 3) = 1.0;
  Matrix B(4, 4);
  B << 1, -1, 1, 0, -1, 1, 0, 1, -1, 0, 0, 0, 0, -1, 0, 0;
  Matrix Lambda(4, 3);
  Lambda << 0, 0, -1, 0, 0, 1, -1, 0, 0, 0, -1, 0;
  return sdae::make_problem({A, B}, Lambda, sdae::ForcingSpec::zero(4),
                            sdae::Vector::Zero(1),
                            sdae::normalized(sdae::make_bump(1.0, 0.5, {1.0})));
}
