#pragma once

#include <cstdint>

namespace onebit {

// 64-bit avalanche mix (SplitMix64 finalizer).
std::uint64_t mix64(std::uint64_t x) noexcept;

// Derive an independent child seed from (seed, index). Used to give every
// trial, chunk and sub-stream its own generator regardless of schedule.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept;

// Counter-based generator: the n-th output is mix64(key + n * gamma). The
// state is just (key, counter), so streams are cheap to split and the output
// sequence is fully specified by the seed.
class Rng
{
public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() noexcept;

  // Independent child stream; does not advance this generator.
  Rng split(std::uint64_t index) const noexcept;

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform() noexcept;
  // Standard normal via the Marsaglia polar method.
  double normal() noexcept;
  bool bernoulli(double p) noexcept;
  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) noexcept;

  std::uint64_t key() const noexcept { return key_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

} // namespace onebit
