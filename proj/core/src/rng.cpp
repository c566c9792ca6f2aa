// Compiled with -ffast-math (see core/CMakeLists.txt): every log/sqrt/sincos
// here sees a strictly positive finite argument, and relaxed semantics let the
// compiler emit vectorized libmvec calls for the Box-Muller transform.
#include "sdae/rng.hpp"

#include <cmath>
#include <numbers>

namespace sdae {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
constexpr std::uint32_t kTag = 0x53444145u; // distinguishes this counter layout

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline void philox_round(std::array<std::uint32_t, 4>& x, const std::array<std::uint32_t, 2>& k) {
  std::uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kMul0, x[0], hi0, lo0);
  mulhilo(kMul1, x[2], hi1, lo1);
  x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

// (0,1] uniform from 53 bits; never 0, so log() is safe.
inline double uniform_open(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return 1.0 - static_cast<double>(bits >> 11) * 0x1.0p-53;
}

} // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    philox_round(ctr, key);
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

void fill_normals(std::uint64_t seed, std::uint32_t sampleIndex, std::uint32_t componentIndex,
                  double* out, std::size_t n) {
  const std::uint32_t key0 = static_cast<std::uint32_t>(seed);
  const std::uint32_t key1 = static_cast<std::uint32_t>(seed >> 32);
  constexpr std::size_t kBlock = 512; // pairs per block
  // Round-major layout: each per-lane loop below is independent across lanes,
  // so the compiler vectorizes the counter updates and the transform. Writing
  // sin and cos in separate loops matters: a fused sincos call has no vector
  // form and would keep the whole transform scalar.
  alignas(64) std::uint32_t x0[kBlock], x1[kBlock], x2[kBlock], x3[kBlock];
  alignas(64) double rad[kBlock], ang[kBlock], u1[kBlock], u2[kBlock];
  std::size_t produced = 0;
  std::uint32_t pair = 0;
  while (produced < n) {
    // Every loop below runs over the full block even when fewer values are
    // needed: a trip count independent of n keeps the vector/epilogue split
    // identical across calls, so a longer fill reproduces any shorter prefix
    // bitwise instead of differing in the last ulp near the cut.
    for (std::size_t i = 0; i < kBlock; ++i) {
      x0[i] = pair + static_cast<std::uint32_t>(i);
      x1[i] = componentIndex;
      x2[i] = sampleIndex;
      x3[i] = kTag;
    }
    pair += static_cast<std::uint32_t>(kBlock);
    std::uint32_t k0 = key0;
    std::uint32_t k1 = key1;
    for (int round = 0; round < 10; ++round) {
      for (std::size_t i = 0; i < kBlock; ++i) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * x0[i];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * x2[i];
        const std::uint32_t newX0 =
            static_cast<std::uint32_t>(p1 >> 32) ^ x1[i] ^ k0;
        const std::uint32_t newX2 =
            static_cast<std::uint32_t>(p0 >> 32) ^ x3[i] ^ k1;
        x1[i] = static_cast<std::uint32_t>(p1);
        x3[i] = static_cast<std::uint32_t>(p0);
        x0[i] = newX0;
        x2[i] = newX2;
      }
      k0 += kWeyl0;
      k1 += kWeyl1;
    }
    for (std::size_t i = 0; i < kBlock; ++i) {
      const double a = uniform_open(x0[i], x1[i]);
      const double b =
          static_cast<double>((static_cast<std::uint64_t>(x2[i]) << 32 | x3[i]) >> 11) *
          0x1.0p-53;
      rad[i] = std::sqrt(-2.0 * std::log(a));
      ang[i] = 2.0 * std::numbers::pi * b;
    }
    for (std::size_t i = 0; i < kBlock; ++i) u1[i] = rad[i] * std::cos(ang[i]);
    for (std::size_t i = 0; i < kBlock; ++i) u2[i] = rad[i] * std::sin(ang[i]);
    for (std::size_t i = 0; i < kBlock && produced < n; ++i) {
      out[produced++] = u1[i];
      if (produced < n) out[produced++] = u2[i];
    }
  }
}

double normal_at(std::uint64_t seed, std::uint32_t sampleIndex, std::uint32_t componentIndex,
                 std::size_t position) {
  const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                            static_cast<std::uint32_t>(seed >> 32)};
  const auto r = philox4x32(
      {static_cast<std::uint32_t>(position / 2), componentIndex, sampleIndex, kTag}, key);
  const double a = uniform_open(r[0], r[1]);
  const double b =
      static_cast<double>((static_cast<std::uint64_t>(r[2]) << 32 | r[3]) >> 11) * 0x1.0p-53;
  const double radius = std::sqrt(-2.0 * std::log(a));
  const double angle = 2.0 * std::numbers::pi * b;
  return position % 2 == 0 ? radius * std::cos(angle) : radius * std::sin(angle);
}

} // namespace sdae
