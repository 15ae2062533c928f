#pragma once

// Deterministic, serializable random stream (xoshiro256++ seeded via
// splitmix64). Distributions are implemented here rather than taken from
// <random> so that sequences are identical across standard libraries and
// the full generator state is four u64 words that checkpoint exactly.

#include <array>
#include <cmath>
#include <cstdint>

namespace noisytag {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
inline std::uint64_t rotl(std::uint64_t v, int k) {
  return (v << k) | (v >> (64 - k));
}
}  // namespace detail

class Rng {
 public:
  using State = std::array<std::uint64_t, 4>;

  Rng() : Rng(0) {}
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) w = detail::splitmix64(s);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result =
        detail::rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Inclusive integer range.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(bounded(span));
  }

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(bounded(n)); }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller; consumes two uniforms, keeps no cache so
  // the state alone determines the sequence.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
  }

  // Independent child stream; advances this stream by one draw.
  Rng fork() {
    Rng child;
    std::uint64_t s = next_u64();
    for (auto& w : child.state_) w = detail::splitmix64(s);
    return child;
  }

  template <class It>
  void shuffle(It first, It last) {
    const auto n = static_cast<std::size_t>(last - first);
    for (std::size_t i = n; i > 1; --i) {
      const std::size_t j = index(i);
      std::swap(first[i - 1], first[j]);
    }
  }

  const State& state() const { return state_; }
  void set_state(const State& s) { state_ = s; }

 private:
  std::uint64_t bounded(std::uint64_t n) {
    // Multiply-shift map of a full 64-bit draw onto [0, n).
    const std::uint64_t x = next_u64();
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(x) * n) >> 64);
  }

  State state_{};
};

}  // namespace noisytag
