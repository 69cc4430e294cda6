#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace dtswarm {

/// SplitMix64 finalizer (Steele, Lea & Flood). Used both as the stream
/// generator and as the seed-mixing function.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Folds a sequence of keys into one 64-bit seed. Order-sensitive.
constexpr std::uint64_t derive_seed(std::uint64_t base) { return mix64(base); }

template <typename... Keys>
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t key, Keys... rest) {
  return derive_seed(mix64(base + 0x9e3779b97f4a7c15ULL) ^ (key * 0xd1342543de82ef95ULL + 1),
                     static_cast<std::uint64_t>(rest)...);
}

/// Purposes for independent random streams inside one run.
enum class StreamPurpose : std::uint64_t {
  kSpawn = 1,
  kSense = 2,
  kUplink = 3,
  kDownlink = 4,
  kMotion = 5,
  kAssist = 6,
  kPeerSend = 7,
  kPeerReceive = 8,
};

/// Small counter-based stream. Satisfies UniformRandomBitGenerator, but the
/// conversions below are used instead of <random> distributions so that draws
/// are identical across standard library implementations.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed) : state_(seed) {}

  /// Stream for (run seed, round, agent, purpose).
  static RandomStream for_agent(std::uint64_t run_seed, std::uint64_t round, std::uint64_t agent,
                                StreamPurpose purpose) {
    return RandomStream(
        derive_seed(run_seed, round, agent, static_cast<std::uint64_t>(purpose)));
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    // Lemire's multiply-shift with rejection.
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Standard normal via Box-Muller (one value per call, no caching).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t state_;
};

/// Stream factory for one round of one run.
struct RoundStreams {
  std::uint64_t run_seed = 0;
  int round = 0;

  RandomStream operator()(int agent, StreamPurpose purpose) const {
    return RandomStream::for_agent(run_seed, static_cast<std::uint64_t>(round),
                                   static_cast<std::uint64_t>(agent), purpose);
  }
};

}  // namespace dtswarm
