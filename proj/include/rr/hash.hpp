#pragma once
#include <cstdint>

namespace rr {

// splitmix64 finalizer; a stateless, platform-independent mixer used wherever
// a value must be reproducible from (seed, index) alone.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t mix2(std::uint64_t seed, std::uint64_t n) {
  return splitmix64(splitmix64(seed) + n * 0x9E3779B97F4A7C15ull);
}

}  // namespace rr
