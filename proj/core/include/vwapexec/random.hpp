#pragma once

#include <cstdint>
#include <random>

namespace vwapexec {

// splitmix64 finalizer; decorrelates consecutive (seed, index) pairs.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent generator for path `index` under `seed`. Streams depend only on
/// (seed, index), so results do not depend on how paths are split over threads.
inline std::mt19937_64 path_stream(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL)));
}

}  // namespace vwapexec
