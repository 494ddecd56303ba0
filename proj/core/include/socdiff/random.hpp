#pragma once

#include <cstdint>
#include <random>

namespace socdiff {

// Deterministic random source. std::mt19937_64 has a fully specified output
// sequence; the standard distributions do not, so the two draws we need are
// implemented here to keep results identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double uniform01();
  // Uniform in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  bool bernoulli(double probability) { return uniform01() < probability; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Seed for stream `index` derived from a master seed. Independent of the order
// in which streams are requested.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace socdiff
