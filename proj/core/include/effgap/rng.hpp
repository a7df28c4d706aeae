#pragma once

// Seeded randomness that gives the same stream on every platform:
// std::mt19937_64 (fully specified by the standard) plus our own bounded
// sampling, since the std distributions are implementation-defined.

#include <cstdint>
#include <random>
#include <vector>

namespace effgap {

inline constexpr const char* kRngAlgorithm = "mt19937_64+splitmix64";

// One step of SplitMix64 on `state`.
std::uint64_t splitmix64(std::uint64_t& state);

// Seed of replica `index` derived from the run seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, n); n must be positive. Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n);
  // Uniform in [0, 1) with 53 random bits.
  double unit();
  // `count` distinct values of [0, n) in draw order (partial Fisher-Yates).
  std::vector<std::size_t> sample(std::size_t n, std::size_t count);

 private:
  std::mt19937_64 engine_;
};

}  // namespace effgap
