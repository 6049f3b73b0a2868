#pragma once

#include <cstdint>

namespace bidla {

/// 64-bit finalizer (splitmix64). All randomness in the toolkit is derived
/// from chains of this mix, so every draw is a pure function of its key and
/// counter and identical on every platform.
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// Counter-based random stream: word i is mix64(key + i * golden).
/// Copyable, and splitting off child streams never perturbs the parent.
class RandomStream {
 public:
  RandomStream() = default;
  explicit RandomStream(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() { return mix64(key_ + (++ctr_) * kGolden); }

  /// Uniform in [0,1) with 53 random bits.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [0, n) by the multiply-shift reduction (bias below 2^-59
  /// for the n <= 12 used here).
  std::uint32_t next_below(std::uint32_t n) {
    const unsigned __int128 m =
        static_cast<unsigned __int128>(next_u64()) * n;
    return static_cast<std::uint32_t>(m >> 64);
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return ctr_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t ctr_ = 0;
};

}  // namespace bidla
