#pragma once

#include <cstdint>

namespace bstlimit {

/// SplitMix64 output finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

/// Hash of (seed, key) used for every keyed pseudo-random field.
constexpr std::uint64_t keyed_mix(std::uint64_t seed, std::uint64_t key) noexcept {
  return mix64(mix64(seed ^ 0x243F6A8885A308D3ULL) + kGolden * (key + 1));
}

/// Maps 64 random bits to the open interval (0,1); the result lies in
/// [2^-54, 1 - 2^-54].
constexpr double to_open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Counter-based generator: output i of stream (master_seed, stream_id) is
/// mix64(key + kGolden * (i + 1)) with key derived from both ids, i.e. the
/// SplitMix64 sequence started at `key`. Outputs depend only on
/// (master_seed, stream_id, counter), never on platform or thread.
class RngStream {
 public:
  static constexpr const char* kMixerId = "splitmix64-counter/v1";

  RngStream(std::uint64_t master_seed, std::uint64_t stream_id) noexcept
      : master_seed_(master_seed),
        stream_id_(stream_id),
        key_(mix64(master_seed ^ mix64(stream_id ^ 0x6A09E667F3BCC909ULL))) {}

  std::uint64_t next_u64() noexcept { return mix64(key_ + kGolden * ++counter_); }

  /// Uniform on [0,1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0,1).
  double uniform_open() noexcept { return to_open_unit(next_u64()); }

  /// Uniform integer in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound) noexcept {
    // Lemire's multiply-shift with rejection of the biased low strip.
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace bstlimit
