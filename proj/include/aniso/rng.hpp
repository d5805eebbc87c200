#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace aniso::rng {

// Counter-based generator built on the SplitMix64 output function. Every draw
// is a pure function of (seed, stream, counter), so independent streams can be
// consumed from any number of threads in any order and still reproduce
// bit-identical results.

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

/// Derives the per-stream key from a user seed and a stream id.
inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed + kGolden * (stream + 1));
}

/// The `counter`-th 64-bit word of the stream identified by `key`.
inline std::uint64_t word_at(std::uint64_t key, std::uint64_t counter) {
  return mix64(key + kGolden * counter);
}

/// Uniform double in [0, 1).
inline double uniform01(std::uint64_t word) {
  return static_cast<double>(word >> 11) * 0x1.0p-53;
}

/// Uniform double in (0, 1]; safe as a log() argument.
inline double uniform01_open(std::uint64_t word) {
  return static_cast<double>((word >> 11) + 1) * 0x1.0p-53;
}

/// Box-Muller pair from two stream words.
inline void normal_pair(std::uint64_t w0, std::uint64_t w1, double& z0, double& z1) {
  const double u1 = uniform01_open(w0);
  const double u2 = uniform01(w1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  z0 = r * std::cos(phi);
  z1 = r * std::sin(phi);
}

/// Sequential view over one stream.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t stream) : key_(stream_key(seed, stream)) {}

  std::uint64_t next_u64() { return word_at(key_, counter_++); }
  double next_uniform() { return uniform01(next_u64()); }

  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double z0, z1;
    normal_pair(next_u64(), next_u64(), z0, z1);
    spare_ = z1;
    have_spare_ = true;
    return z0;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Stream ids used across the library; keeps substreams of one user seed
// independent of each other.
enum StreamId : std::uint64_t {
  kFieldSynthesis = 1,
  kPalmSampler = 2,
  kMonteCarloQuadrature = 3,
  kPowerStudy = 4,
};

}  // namespace aniso::rng
