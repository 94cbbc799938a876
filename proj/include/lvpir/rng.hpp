#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <vector>

namespace lvpir {

/// splitmix64: 64-bit Weyl sequence with a two-round xorshift-multiply
/// output mix (Vigna's public-domain reference constants). Produces the
/// same stream on every platform for a given seed, which is what makes
/// recorded transcripts replayable.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Unbiased draw from [0, bound) by masked rejection.
  std::uint64_t below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    std::uint64_t mask = ~std::uint64_t{0} >> std::countl_zero(bound - 1);
    std::uint64_t draw;
    do {
      draw = next() & mask;
    } while (draw >= bound);
    return draw;
  }

 private:
  std::uint64_t state_;
};

// Uniformly random size-k subset of pool, as a partial Fisher-Yates
// shuffle. Consumes exactly k bounded draws; result is sorted.
inline std::vector<std::uint32_t> sample_subset(SplitMix64& rng, std::vector<std::uint32_t> pool,
                                                std::size_t k) {
  if (k > pool.size()) k = pool.size();
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace lvpir
