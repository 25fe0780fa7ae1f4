#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace helmetkit {

/**
 * Seedable generator with a fixed, portable output sequence.
 *
 * Engine: std::mt19937_64 seeded with the 64-bit seed directly (its output is
 * pinned by the C++ standard). Bounded integers are drawn by rejection: raw
 * 64-bit words smaller than (2^64 mod range) are discarded, the rest are
 * reduced modulo the range. Any language with an MT19937-64
 * implementation reproduces the same draws.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform integer in [lo, hi], inclusive.
  std::int64_t between(std::int64_t lo, std::int64_t hi);

 private:
  std::mt19937_64 engine_;
};

/// In-place Fisher-Yates: for i = n-1 down to 1, swap(v[i], v[below(i+1)]).
template <typename T>
void shuffle(std::vector<T>& values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    using std::swap;
    swap(values[i - 1], values[j]);
  }
}

}  // namespace helmetkit
