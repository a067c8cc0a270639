#pragma once

#include <cstdint>

namespace turbid {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Key for the noise stream of one pixel of one frame. Independent of
/// evaluation order, so parallel rendering is reproducible.
constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t frame, std::uint64_t pixel) {
  return mix64(mix64(mix64(seed) ^ frame) ^ (pixel * 0xd1b54a32d192ed03ull));
}

/// Standard normal variate from a stream key (Box-Muller on two uniforms).
double standard_normal(std::uint64_t key);

}  // namespace turbid
