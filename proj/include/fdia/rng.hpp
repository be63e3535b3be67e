#pragma once

#include <cstdint>
#include <random>

namespace fdia {

/// Seeded random source shared by every stochastic component.
///
/// Wraps std::mt19937_64 (whose output sequence is fixed by the standard) and
/// derives uniform and normal draws itself, so streams are reproducible
/// across standard-library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller.
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  /// Independent child stream; advances this generator by one draw.
  Rng split();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace fdia
