#pragma once

#include <cstdint>

namespace flab {

// Deterministic PRNG (xoshiro256++ seeded through splitmix64). The standard
// library distributions are implementation-defined, so uniform and Gaussian
// variates are generated here to keep runs bit-for-bit reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);

  // Standard normal via Box-Muller.
  double gaussian();

  // Independent child stream; derive(k) commutes with calls on the parent.
  Rng derive(std::uint64_t stream) const;

 private:
  std::uint64_t seed_;
  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace flab
