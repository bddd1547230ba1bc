#pragma once

#include <cmath>
#include <cstdint>

namespace intrep {

// 64-bit finalizer (MurmurHash3 fmix64); bijective mixing for seed material.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 33;
  z *= 0xff51afd7ed558ccdULL;
  z ^= z >> 33;
  z *= 0xc4ceb9fe1a85ec53ULL;
  z ^= z >> 33;
  return z;
}

// SplitMix64: advances state, returns next output word.
constexpr std::uint64_t splitmix64_next(std::uint64_t& state) noexcept {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic random stream keyed by (base_seed, stream_id).
///
/// The same key reproduces the identical sequence regardless of thread count
/// or execution order; distinct keys give statistically independent streams.
/// Generator: xoshiro256++ with state expanded from the key via SplitMix64.
/// Transforms: uniform01 takes the top 53 bits, offset by half an ulp so the
/// result lies strictly inside (0,1); std_normal is Box-Muller on two
/// uniforms (one value cached); unit_exponential is -log(uniform01()).
class RngStream {
 public:
  RngStream(std::uint64_t base_seed, std::uint64_t stream_id) noexcept
      : base_seed_(base_seed), stream_id_(stream_id) {
    std::uint64_t sm = mix64(base_seed + 0x9e3779b97f4a7c15ULL) ^
                       mix64(stream_id + 0x6a09e667f3bcc909ULL);
    for (auto& w : state_) w = splitmix64_next(sm);
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  std::uint64_t base_seed() const noexcept { return base_seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Independent child stream; deterministic in (this stream's key, child_id).
  RngStream derive(std::uint64_t child_id) const noexcept {
    return RngStream(base_seed_,
                     mix64(stream_id_ ^ (0x9e3779b97f4a7c15ULL * (child_id + 1))));
  }

  std::uint64_t next_u64() noexcept {
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

  /// Uniform draw strictly inside the open interval (0,1).
  double uniform01() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
  }

  double std_normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform01()));
    const double theta = 6.283185307179586476925286766559 * uniform01();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  double unit_exponential() noexcept { return -std::log(uniform01()); }

  /// Unbiased integer in [0, n); n must be positive.
  std::uint64_t uniform_below(std::uint64_t n) noexcept {
    // Lemire's multiply-shift rejection method.
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (lo < threshold) {
        x = next_u64();
        m = static_cast<__uint128_t>(x) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
  std::uint64_t base_seed_;
  std::uint64_t stream_id_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Convenience factory mirroring the stream contract.
inline RngStream rng_stream(std::uint64_t base_seed, std::uint64_t stream_id) noexcept {
  return RngStream(base_seed, stream_id);
}

}  // namespace intrep
