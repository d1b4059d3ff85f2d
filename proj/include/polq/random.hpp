#pragma once

#include <cstdint>
#include <random>

namespace polq {

/// splitmix64 finalizer; turns (seed, stream index) pairs into independent engine seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Seeded random source built on std::mt19937_64, whose output sequence is fixed by the
/// C++ standard. Uniform, normal and Poisson variates are derived here rather than through
/// the <random> distributions (implementation-defined), so draws are bit-identical on every
/// toolchain.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1].
  double uniform_open_low();
  /// Standard normal via Box-Muller (one variate per call).
  double normal();
  /// Inversion for mean < 30, transformed rejection above.
  std::int64_t poisson(double mean);

private:
  std::mt19937_64 engine_;
};

} // namespace polq
