#pragma once

// Seeded random number streams. All randomness in a run flows from one root
// seed through named sub-streams (graph, spawn, per-ant, sweep cells), so
// adding a new consumer never perturbs the draws of an existing one.
//
// Distributions are implemented on top of raw 64-bit output instead of
// <random> distribution adaptors: std::uniform_*_distribution output is
// implementation-defined and would break byte-identical replays across
// standard libraries.

#include <array>
#include <cassert>
#include <cstdint>
#include <string_view>

namespace antmig {

inline constexpr std::uint64_t kGolden64 = 0x9e3779b97f4a7c15ull;

// splitmix64 step: advances the state and returns the next value.
inline constexpr std::uint64_t splitmix_next(std::uint64_t& state) {
  state += kGolden64;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Stateless avalanche of a single 64-bit value.
inline constexpr std::uint64_t mix64(std::uint64_t x) {
  return splitmix_next(x);
}

// FNV-1a over a stream name.
inline constexpr std::uint64_t hash_name(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

// Seed of the sub-stream `name[index]` under `root`.
inline constexpr std::uint64_t derive_seed(std::uint64_t root,
                                           std::string_view name,
                                           std::uint64_t index = 0) {
  std::uint64_t s = mix64(root ^ hash_name(name));
  return mix64(s ^ (mix64(index + 1) | 1ull));
}

// xoshiro256** (Blackman/Vigna). Small serializable state, solid statistical
// quality, and unlike mt19937_64 the state fits in a snapshot line.
class Rng {
 public:
  using result_type = std::uint64_t;
  using State = std::array<std::uint64_t, 4>;

  Rng() : Rng(0) {}

  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : state_) w = splitmix_next(x);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1), 53 significant bits.
  double uniform01() {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  // Uniform integer in [0, n). Lemire multiply-shift; the O(2^-64) bias is
  // irrelevant at simulation scales.
  std::uint64_t uniform_index(std::uint64_t n) {
    assert(n > 0);
    const auto wide = static_cast<unsigned __int128>((*this)()) * n;
    return static_cast<std::uint64_t>(wide >> 64);
  }

  const State& state() const { return state_; }
  void set_state(const State& s) { state_ = s; }

  friend bool operator==(const Rng&, const Rng&) = default;

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  State state_{};
};

inline Rng make_stream(std::uint64_t root, std::string_view name,
                       std::uint64_t index = 0) {
  return Rng(derive_seed(root, name, index));
}

}  // namespace antmig
