#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "sdae/pencil.hpp"

inline sdae::Matrix random_orthogonal(int n, std::mt19937& gen) {
  std::normal_distribution<double> dist;
  sdae::Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = dist(gen);
  Eigen::HouseholderQR<sdae::Matrix> qr(g);
  sdae::Matrix q = qr.householderQ();
  // pin signs so the factor is well defined
  const sdae::Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return q;
}

// Invertible with singular values in [1, 4]: far from rank decisions.
inline sdae::Matrix conditioned_invertible(int n, std::mt19937& gen) {
  std::uniform_real_distribution<double> dist(1.0, 4.0);
  sdae::Vector sv(n);
  for (int i = 0; i < n; ++i) sv(i) = dist(gen);
  return random_orthogonal(n, gen) * sv.asDiagonal() * random_orthogonal(n, gen);
}

inline sdae::Matrix shift_blocks(const std::vector<int>& blockSizes) {
  int q = 0;
  for (int s : blockSizes) q += s;
  sdae::Matrix nil = sdae::Matrix::Zero(q, q);
  int off = 0;
  for (int s : blockSizes) {
    for (int i = 0; i + 1 < s; ++i) nil(off + i, off + i + 1) = 1.0;
    off += s;
  }
  return nil;
}

struct KnownPencil {
  sdae::MatrixPencil pencil;
  int d = 0;
  int q = 0;
  int index = 0;
  std::vector<int> blockSizes;
};

// A pencil assembled from a known canonical form hidden behind random
// well-conditioned coordinate changes.
inline KnownPencil build_known(int d, std::vector<int> blockSizes, std::mt19937& gen) {
  std::sort(blockSizes.begin(), blockSizes.end(), std::greater<int>());
  int q = 0;
  for (int s : blockSizes) q += s;
  const int n = d + q;
  sdae::Matrix ablk = sdae::Matrix::Zero(n, n), bblk = sdae::Matrix::Zero(n, n);
  ablk.topLeftCorner(d, d).setIdentity();
  ablk.bottomRightCorner(q, q) = shift_blocks(blockSizes);
  std::normal_distribution<double> dist;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) bblk(i, j) = dist(gen);
  bblk.bottomRightCorner(q, q).setIdentity();
  const sdae::Matrix pinv = conditioned_invertible(n, gen);
  const sdae::Matrix qinv = conditioned_invertible(n, gen);
  KnownPencil out;
  out.pencil.A = pinv * ablk * qinv;
  out.pencil.B = pinv * bblk * qinv;
  out.d = d;
  out.q = q;
  out.index = blockSizes.empty() ? 0 : blockSizes.front();
  out.blockSizes = std::move(blockSizes);
  return out;
}
