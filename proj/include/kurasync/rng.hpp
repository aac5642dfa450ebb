#pragma once

// Deterministic random streams.
//
// Every stochastic routine takes an explicit 64-bit seed. The seed is expanded
// with SplitMix64 into the state of a std::mt19937_64 engine, and all uniform
// variates are derived from raw 64-bit engine outputs by the mappings below
// rather than by <random> distributions, whose algorithms are
// implementation-defined. Output is therefore bit-identical across standard
// libraries.
//
// Independent sub-streams (one per trial, per flow run, ...) are obtained with
// derive_seed(seed, index).

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace kurasync {

inline constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of the index-th sub-stream of `seed`.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                           std::uint64_t index) noexcept {
  std::uint64_t s = seed ^ (0xD1B54A32D192ED03ULL * (index + 1));
  splitmix64(s);
  return splitmix64(s);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    std::array<std::uint32_t, 16> words{};
    for (std::size_t i = 0; i < words.size(); i += 2) {
      const std::uint64_t v = splitmix64(s);
      words[i] = static_cast<std::uint32_t>(v);
      words[i + 1] = static_cast<std::uint32_t>(v >> 32);
    }
    std::seed_seq seq(words.begin(), words.end());
    engine_.seed(seq);
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1].
  double uniform_open_closed() { return 1.0 - uniform(); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, bound), bound > 0 (Lemire's nearly-divisionless
  /// method, unbiased).
  std::uint64_t below(std::uint64_t bound) {
    unsigned __int128 m =
        static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(bound);
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(bound);
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Standard normal variate (Marsaglia polar method).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u = 0.0, v = 0.0, s = 0.0;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  template <class T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace kurasync
