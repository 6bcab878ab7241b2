#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace gspsim {

// splitmix64 (Steele, Lea, Flood). Used to key substreams and to fill the
// xoshiro state; one 64-bit step per output, full avalanche.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// xoshiro256++ (Blackman & Vigna, public domain reference implementation).
// Value-like: copyable, movable between threads, no shared state. Used as the
// per-auction substream so that stream construction stays cheap; standard
// library engines are avoided because their distribution adapters are not
// bit-reproducible across implementations.
class Substream {
 public:
  using result_type = std::uint64_t;

  explicit Substream(std::uint64_t seed) noexcept {
    SplitMix64 mixer(seed);
    for (auto& word : state_) word = mixer.next();
    // all-zero state is the one invalid seed of the generator
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
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

  /// Uniform double strictly inside (0, 1) with 53-bit resolution.
  double uniform01() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1p-53;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_;
};

/// Independent substream for the auction at `index` under `master_seed`.
/// The stream key is the index-th output of the splitmix64 sequence seeded by
/// `master_seed`, so neighboring indices land on unrelated xoshiro states and
/// execution order cannot change any draw.
inline Substream substream_at(std::uint64_t master_seed, std::uint64_t index) noexcept {
  SplitMix64 mixer(master_seed + index * 0x9E3779B97F4A7C15ull);
  return Substream(mixer.next());
}

}  // namespace gspsim
