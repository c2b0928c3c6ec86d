#pragma once

#include <cstdint>
#include <limits>

namespace radsel {

using Seed = std::uint64_t;

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Derives the key of an independent substream from a master seed and an index.
/// Used for per-datum digit streams and per-replicate generators alike.
constexpr std::uint64_t derive_key(Seed master, std::uint64_t index) noexcept {
  return detail::mix64(detail::mix64(master ^ 0x5851F42D4C957F2DULL) +
                       detail::mix64(index + detail::kGolden));
}

/// Counter-based 64-bit output: a pure function of (key, counter).
constexpr std::uint64_t counter_bits(std::uint64_t key,
                                     std::uint64_t counter) noexcept {
  return detail::mix64(key + (counter + 1) * detail::kGolden);
}

/// Uniform double in [0, 1) with 53 random bits.
constexpr double counter_uniform(std::uint64_t key,
                                 std::uint64_t counter) noexcept {
  return static_cast<double>(counter_bits(key, counter) >> 11) * 0x1.0p-53;
}

/// SplitMix64 engine; satisfies UniformRandomBitGenerator so it plugs into
/// the <random> distributions.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Rng(Seed seed) noexcept : state_(seed) {}
  constexpr Rng(Seed master, std::uint64_t index) noexcept
      : state_(derive_key(master, index)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept {
    state_ += detail::kGolden;
    return detail::mix64(state_);
  }

  /// Uniform double in [0, 1).
  constexpr double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Independent child generator, e.g. one per replicate.
  constexpr Rng split(std::uint64_t index) const noexcept {
    return Rng(derive_key(state_, index));
  }

 private:
  std::uint64_t state_;
};

}  // namespace radsel
