#pragma once

#include <cmath>
#include <cstdint>

// Deterministic, splittable random streams.
//
// std::normal_distribution consumes generator output in an
// implementation-defined pattern, which breaks both cross-toolchain
// reproducibility and the fixed-consumption property needed for
// common-random-number coupling between estimators. We therefore use
// splitmix64 (stream derivation) + xoshiro256++ (bulk generation) +
// Box-Muller (exactly two uniforms per two normals).

namespace spdemax {

/// splitmix64 step: mixes a 64-bit state into a well-distributed output.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// xoshiro256++ with state seeded through splitmix64.
class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64_next(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on (0,1); never returns 0, so log() below is safe.
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
};

/// Standard normal sampler with deterministic consumption: exactly two
/// uniforms per Box-Muller pair, one pair cached.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : gen_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = gen_.next_uniform();
    const double u2 = gen_.next_uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925287 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  double uniform() { return gen_.next_uniform(); }

 private:
  Xoshiro256 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Derives the seed of stream `index` from a master seed. Streams for
/// distinct indices are statistically independent, and the result does not
/// depend on which other streams were drawn — simulations may run in any
/// order or in parallel.
inline std::uint64_t derive_stream_seed(std::uint64_t master_seed,
                                        std::uint64_t index) {
  std::uint64_t s = master_seed;
  std::uint64_t a = splitmix64_next(s);
  s = master_seed ^ (0xD1B54A32D192ED03ULL * (index + 1));
  std::uint64_t b = splitmix64_next(s);
  return a ^ (b + 0x9E3779B97F4A7C15ULL * index);
}

}  // namespace spdemax
