#pragma once
// Counter-based noise pipeline. Philox4x64-10 maps a 256-bit counter and a
// 128-bit key to a 256-bit block; every (trajectory, step, block, lane) tuple
// addresses its own independent normals, so trajectory workers need no shared
// state and any parallel schedule reproduces the same streams.
//
// Layout: counter = {trajectory, step, block_index, purpose}, key = {seed,
// context}. Each block yields four uint64 words, four uniforms in (0,1] via
// ((w >> 11) + 0.5) * 2^-53, and four normals via two Box-Muller pairs.
// Purpose `state_noise` feeds modes 4b..4b+3 of the state update; purpose
// `weight_noise` feeds the orthogonal components of the Brownian increments
// for controlled modes (ordinal-indexed the same way).

#include <array>
#include <cstdint>

namespace spex {

// One Philox4x64-10 block. Pure function of (ctr, key).
std::array<std::uint64_t, 4> philox4x64(const std::array<std::uint64_t, 4>& ctr,
                                        const std::array<std::uint64_t, 2>& key);

// ((x >> 11) + 0.5) * 2^-53, in (0, 1]. Never zero, so log(u) is finite;
// the top 2^11 inputs round to exactly 1.0 under round-to-nearest-even.
double u64_to_unit(std::uint64_t x);

// Four standard normals from one block (two Box-Muller pairs).
std::array<double, 4> normal_quad(const std::array<std::uint64_t, 4>& ctr,
                                  const std::array<std::uint64_t, 2>& key);

enum : std::uint64_t {
  purpose_state_noise = 0,
  purpose_weight_noise = 1,
  purpose_region_sampling = 2,
};

inline std::array<std::uint64_t, 4> make_counter(std::uint64_t trajectory,
                                                 std::uint64_t step,
                                                 std::uint64_t block,
                                                 std::uint64_t purpose) {
  return {trajectory, step, block, purpose};
}

// SplitMix64 finalizer; used to derive per-cell stream contexts.
std::uint64_t mix64(std::uint64_t x);

// Deterministic context word for sweep cell (i_eps, i_t) under a base seed.
std::uint64_t cell_context(std::uint64_t seed, std::size_t i_eps, std::size_t i_t);

}  // namespace spex
