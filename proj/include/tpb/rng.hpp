#pragma once

#include <cstdint>
#include <random>

namespace tpb {

// Random source used everywhere in the library. The engine is std::mt19937_64
// (portable state evolution); all distributions are implemented here rather
// than taken from <random> so that streams are bit-reproducible across
// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Deterministic, collision-resistant substream for one (replicate, phase)
  // pair. Same arguments always give a bit-identical stream.
  static Rng substream(std::uint64_t seed, std::uint64_t replicate, std::uint64_t phase);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform();

  // Uniform integer on [lo, hi], inclusive, unbiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  // Standard normal (Marsaglia polar method).
  double normal();

  // Gamma(shape, scale), Marsaglia-Tsang.
  double gamma(double shape, double scale);

  // Exact hypergeometric draw: number of marked items among `n` draws without
  // replacement from a population of `total` containing `marked` marked items.
  std::int64_t hypergeometric(std::int64_t total, std::int64_t marked, std::int64_t n);

 private:
  std::mt19937_64 engine_;
  double normal_spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace tpb
