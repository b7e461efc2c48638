#ifndef GGNET_RNG_H
#define GGNET_RNG_H

#include <cstdint>
#include <limits>

namespace ggnet {

// SplitMix64 (Steele, Lea, Flood 2014). Used as a UniformRandomBitGenerator
// and as the seed-derivation hash for substreams.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

 private:
  std::uint64_t state_;
};

// Stateless 64-bit finalizer.
std::uint64_t mix64(std::uint64_t x);

// Seed of substream `index` under `master`. Distinct indices give
// statistically independent streams; the mapping is platform independent.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace ggnet

#endif  // GGNET_RNG_H
