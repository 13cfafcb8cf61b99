#pragma once

#include <cstddef>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace hivecote {

  /// Generator used everywhere. Streams are derived from (seed, stream id) so that
  /// independent base units (trees, parameter samples, search rounds) can be rebuilt
  /// in any order and resumed from a counter alone.
  using Rng = std::mt19937_64;

  /// splitmix64 finaliser, used to decorrelate derived seeds.
  constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31U);
  }

  constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return mix_seed(mix_seed(seed) ^ mix_seed(stream + 0x632be59bd9b4e019ULL));
  }

  inline Rng make_rng(std::uint64_t seed, std::uint64_t stream) { return Rng(derive_seed(seed, stream)); }

  /// Uniform integer in [0, n). The standard distributions are implementation defined,
  /// so this keeps seeded results identical across standard libraries.
  inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    if (n <= 1) { return 0; }
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % bound);
    std::uint64_t draw = rng();
    while (draw >= limit) { draw = rng(); }
    return static_cast<std::size_t>(draw % bound);
  }

  /// Uniform integer in [lo, hi] (inclusive).
  inline std::size_t uniform_between(Rng& rng, std::size_t lo, std::size_t hi) {
    return lo + uniform_index(rng, hi - lo + 1);
  }

  /// Uniform real in [0, 1).
  inline double uniform_real(Rng& rng) {
    return static_cast<double>(rng() >> 11U) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (deterministic across platforms, unlike std::normal_distribution).
  inline double standard_normal(Rng& rng) {
    double u1 = uniform_real(rng);
    while (u1 <= 0.0) { u1 = uniform_real(rng); }
    const double u2 = uniform_real(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  template<typename T>
  void shuffle(std::vector<T>& items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = uniform_index(rng, i);
      std::swap(items[i - 1], items[j]);
    }
  }

} // namespace hivecote
