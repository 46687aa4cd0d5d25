#pragma once

#include <cstdint>
#include <random>

namespace coxsvrg {

// Deterministic random source. Raw 64-bit draws come from std::mt19937_64,
// whose output sequence is fixed by the standard; every conversion to doubles
// or bounded integers happens here, so results never depend on the standard
// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform01();

  // Uniform on {0, ..., bound - 1}. Rejection sampling, unbiased. bound >= 1.
  std::size_t uniform_below(std::size_t bound);

  // Standard normal via Box-Muller; the second value of each pair is cached.
  double normal();

  // Exp(1), strictly positive.
  double exponential();

  // Independent child stream. The child depends only on (seed, split count),
  // not on how many draws the parent has produced.
  Rng split();

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  std::uint64_t n_splits_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace coxsvrg
