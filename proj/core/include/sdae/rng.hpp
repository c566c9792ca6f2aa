#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace sdae {

// Counter-based Gaussian stream. Each (seed, sampleIndex, componentIndex)
// triple names an independent stream; position i within the stream is pure
// function of the counter, so any evaluation order (or future parallel
// split) produces bitwise-identical draws.
//
// Construction: Philox4x32-10 keyed by the 64-bit seed, counter words
// (pairIndex, componentIndex, sampleIndex, tag); the four output words form
// two uniforms mapped to two normals by Box-Muller.

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

// Fills out[0..n) with standard normal draws from the stream.
void fill_normals(std::uint64_t seed, std::uint32_t sampleIndex,
                  std::uint32_t componentIndex, double* out, std::size_t n);

// Single draw at a given stream position (test/debug convenience; the batch
// fill above is the hot path).
double normal_at(std::uint64_t seed, std::uint32_t sampleIndex,
                 std::uint32_t componentIndex, std::size_t position);

} // namespace sdae
