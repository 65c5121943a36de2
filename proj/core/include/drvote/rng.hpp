#pragma once

#include <cstdint>
#include <random>

#include "drvote/rational.hpp"

namespace drvote {

// Deterministic sampling helpers. Bounded draws are hand-rolled (rejection)
// so results never depend on the standard library's distribution internals;
// mt19937_64 itself is fully specified by the standard.

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Independent stream seed for block `stream` of a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t s = master ^ (stream * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL);
  splitmix64(s);
  return splitmix64(s);
}

// Uniform in [0, bound), bound > 0.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0) fail_domain("uniform_below: zero bound");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % bound;
}

// Uniform in [0, bound) for big bounds: rejection on fixed-width bit strings.
inline Int uniform_below_int(std::mt19937_64& rng, const Int& bound) {
  if (bound <= 0) fail_domain("uniform_below_int: nonpositive bound");
  if (bound.fits_ulong_p()) return Int(uniform_below(rng, bound.get_ui()));
  const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
  const std::size_t words = (bits + 63) / 64;
  while (true) {
    Int v = 0;
    for (std::size_t w = 0; w < words; ++w) {
      const std::uint64_t x = rng();
      Int chunk;
      mpz_import(chunk.get_mpz_t(), 1, 1, sizeof(x), 0, 0, &x);
      v <<= 64;
      v += chunk;
    }
    v >>= words * 64 - bits;  // keep exactly `bits` bits
    if (v < bound) return v;
  }
}

}  // namespace drvote
