#pragma once

// Seeded, platform-independent random draws.
//
// std::mt19937_64 has a fully specified output sequence, but the standard
// distributions do not; bundles must be byte-identical everywhere, so range
// reduction is done here by rejection sampling.

#include "dimgrp/scalar.hpp"

#include <cstdint>
#include <random>

namespace dimgrp {

// SplitMix64 finalizer, used to derive independent stream seeds.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do x = engine_();
    while (x >= limit);
    return x % bound;
  }

  // Uniform in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // Uniform in [0, bound) for arbitrary-precision bound > 0.
  Integer below(const Integer& bound) {
    const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
    for (;;) {
      Integer x = 0;
      std::size_t have = 0;
      while (have < bits) {
        x <<= 64;
        x += Integer(std::to_string(engine_()));
        have += 64;
      }
      x >>= static_cast<mp_bitcnt_t>(have - bits);
      if (x < bound) return x;
    }
  }

  bool coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dimgrp
