#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace whitelasso {

// Seeded random stream. The engine (mt19937_64) and seed_seq are fully
// specified by the standard and the transforms below are written out here, so
// a given key reproduces the same draws on every conforming platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Stream keyed by several 64-bit words. Distinct keys feed distinct
  // seed sequences into the engine.
  Rng(std::initializer_list<std::uint64_t> key);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform();

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  // Standard normal (Marsaglia polar method).
  double normal();

  // Fair +1 / -1.
  double rademacher() { return (engine_() >> 63) ? 1.0 : -1.0; }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace whitelasso
