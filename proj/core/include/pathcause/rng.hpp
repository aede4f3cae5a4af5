#pragma once

// Portable seeded randomness. std::mt19937_64's output sequence is fixed by the
// standard; the std distributions are not, so uniforms are built by hand.
//
// Stream discipline: each simulated process owns one engine, seeded from
// (seed, stream id) through splitmix64. Stream 0 drives x, stream 1 drives y.

#include <cstdint>
#include <random>

namespace pathcause {

inline constexpr std::uint64_t kStreamX = 0;
inline constexpr std::uint64_t kStreamY = 1;

constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t stream)
      : engine_(splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL))) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pathcause
