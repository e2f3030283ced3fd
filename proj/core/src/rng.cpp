#include "spex/rng.hpp"

#include <cmath>

namespace spex {

namespace {

constexpr std::uint64_t kMult0 = 0xD2E7470EE14C6C93ull;
constexpr std::uint64_t kMult1 = 0xCA5A826395121157ull;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi,
                    std::uint64_t& lo) {
  const unsigned __int128 p =
      static_cast<unsigned __int128>(a) * static_cast<unsigned __int128>(b);
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

}  // namespace

std::array<std::uint64_t, 4> philox4x64(const std::array<std::uint64_t, 4>& ctr,
                                        const std::array<std::uint64_t, 2>& key) {
  std::uint64_t r0 = ctr[0], r1 = ctr[1], r2 = ctr[2], r3 = ctr[3];
  std::uint64_t k0 = key[0], k1 = key[1];
  for (int round = 0; round < 10; ++round) {
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kMult0, r0, hi0, lo0);
    mulhilo(kMult1, r2, hi1, lo1);
    const std::uint64_t n0 = hi1 ^ r1 ^ k0;
    const std::uint64_t n2 = hi0 ^ r3 ^ k1;
    r0 = n0;
    r1 = lo1;
    r2 = n2;
    r3 = lo0;
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return {r0, r1, r2, r3};
}

double u64_to_unit(std::uint64_t x) {
  return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

std::array<double, 4> normal_quad(const std::array<std::uint64_t, 4>& ctr,
                                  const std::array<std::uint64_t, 2>& key) {
  const auto w = philox4x64(ctr, key);
  const double u0 = u64_to_unit(w[0]);
  const double u1 = u64_to_unit(w[1]);
  const double u2 = u64_to_unit(w[2]);
  const double u3 = u64_to_unit(w[3]);
  constexpr double two_pi = 6.283185307179586476925286766559;
  const double r0 = std::sqrt(-2.0 * std::log(u0));
  const double a0 = two_pi * u1;
  const double r1 = std::sqrt(-2.0 * std::log(u2));
  const double a1 = two_pi * u3;
  return {r0 * std::cos(a0), r0 * std::sin(a0), r1 * std::cos(a1),
          r1 * std::sin(a1)};
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t cell_context(std::uint64_t seed, std::size_t i_eps,
                           std::size_t i_t) {
  std::uint64_t c = mix64(seed ^ 0xC3A5C85C97CB3127ull);
  c = mix64(c ^ (static_cast<std::uint64_t>(i_eps) + 1));
  c = mix64(c ^ ((static_cast<std::uint64_t>(i_t) + 1) << 32));
  return c;
}

}  // namespace spex
