#pragma once

#include <cstdint>

namespace cslab {

/// SplitMix64 output finalizer (Steele, Lea & Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed for sub-stream `index` of `seed` (trajectory, channel, pair):
///   mix64(seed ^ mix64(index + 0x9E3779B97F4A7C15)).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(seed ^ mix64(index + 0x9E3779B97F4A7C15ULL));
}

/// Counter-based generator. Draw n is mix64(key + (n+1)*0x9E3779B97F4A7C15),
/// i.e. SplitMix64 evaluated at an explicit counter, so any draw can be
/// reproduced from (key, n) alone. Only integer arithmetic is involved up to
/// `uniform()`; `gaussian()` uses Box-Muller with std::log/sqrt/cos/sin.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) noexcept
      : key_(key), counter_(counter) {}

  std::uint64_t next_u64() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * 0x9E3779B97F4A7C15ULL);
  }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal. Draws come in Box-Muller pairs; the second member is
  /// cached, so the sequence is a pure function of (key, start counter).
  double gaussian() noexcept;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace cslab
