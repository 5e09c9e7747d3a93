#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace polyx {

/// SplitMix64 step. Used to derive independent, reproducible streams from
/// one user-facing 64-bit seed.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Derives the seed of a named component stream, e.g. derive_seed(42, "gmm").
/// Different names give decorrelated streams; the mapping is stable across
/// runs and platforms.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view component) noexcept;

/// The generator every randomized component uses.
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, std::string_view component) {
  return Rng(derive_seed(seed, component));
}

}  // namespace polyx
