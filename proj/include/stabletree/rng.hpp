#pragma once

#include <cstdint>
#include <random>

namespace stabletree {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent seed streams.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of stream `index` under `master`. Streams for distinct indices are
/// statistically independent, and the value does not depend on which worker
/// consumes it.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) noexcept {
  return derive_seed(derive_seed(master, a), b);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

/// Uniform on the open interval (0,1).
double uniform_open(Rng& rng);

/// log of a Gamma(shape, 1) variate. Works for tiny shapes where the variate
/// itself underflows.
double sample_log_gamma(Rng& rng, double shape);

/// Beta(a, b) variate, computed through log-gammas so that small shape
/// parameters do not round the result to exactly 0 or 1.
double sample_beta(Rng& rng, double a, double b);

}  // namespace stabletree
