#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "uqalign/core.hpp"

namespace uqalign {

/// SplitMix64 (Steele, Lea & Flood 2014): a 64-bit counter-based generator.
/// The state advances by the golden-ratio increment and each output is a
/// bijective mix of the counter, so streams are reproducible on every
/// platform. Independent substreams come from `derive`, which mixes a stream
/// id into the parent seed.
///
/// The distribution helpers below are implemented here instead of through
/// <random> distributions, whose algorithms are implementation-defined.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(Seed seed) noexcept : state_(seed.value) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform integer in [0, n); n must be > 0.
  std::uint64_t below(std::uint64_t n) noexcept;
  /// Standard normal via the Marsaglia polar method.
  double normal() noexcept;
  bool bernoulli(double p) noexcept { return uniform() < p; }
  /// Index drawn from a discrete distribution given by nonnegative weights.
  std::size_t categorical(std::span<const double> weights) noexcept;

  /// Fisher-Yates permutation of {0..n-1}.
  std::vector<std::size_t> permutation(std::size_t n);

  /// Seed of substream `stream` of `parent`.
  static Seed derive(Seed parent, std::uint64_t stream) noexcept;

 private:
  std::uint64_t state_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace uqalign
