#pragma once

#include <cstdint>

namespace mcqmc {

// SplitMix64 stream. Substreams are derived by hashing (seed, label), so
// parallel workers can each own an independent, reproducible stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept : seed_(seed), state_(seed) {}

  static Rng substream(std::uint64_t seed, std::uint64_t label) noexcept;
  Rng split(std::uint64_t label) const noexcept { return substream(seed_, label); }

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() noexcept;
  // Uniform on [0,1) with 53 random bits.
  double uniform() noexcept;
  double normal() noexcept;

  // UniformRandomBitGenerator surface.
  using result_type = std::uint64_t;
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }
  result_type operator()() noexcept { return next_u64(); }

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

std::uint64_t mix64(std::uint64_t z) noexcept;

}  // namespace mcqmc
