// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef GVAE_CORE_RNG_HPP_
#define GVAE_CORE_RNG_HPP_

#include <cstdint>

namespace gvae {

inline std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Child seed for stream `a`, item `b`.
inline std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t a,
                                std::uint64_t b = 0) {
  return SplitMix64(seed ^ SplitMix64(a * 0x100000001b3ULL + SplitMix64(b)));
}

}  // namespace gvae

#endif  // GVAE_CORE_RNG_HPP_
