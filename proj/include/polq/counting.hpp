#pragma once

#include "polq/core.hpp"

#include <array>
#include <cstdint>

namespace polq {

/// Analysis states in measurement order: <V|, <H|, <D|, <R|.
struct AnalysisBasis {
  std::array<Vec2, 4> projectors;

  static AnalysisBasis standard();
};

/// Coincidence counts N0..N3 for the four analysis settings.
struct CountRecord {
  std::array<std::int64_t, 4> n{};
  double duration_s = 100.0;
  double expected_total = 0.0;

  /// N0 + N1, the normalization of the linear-inversion and likelihood formulas.
  std::int64_t normalization() const { return n[0] + n[1]; }
  void validate() const;
};

enum class DriftKind { none, linear_ramp, sinusoidal };

/// Slow multiplicative drift of source brightness / detector efficiency across the
/// four sequential settings.
struct DriftModel {
  double relative_amplitude = 0.005;
  DriftKind kind = DriftKind::sinusoidal;

  static DriftModel none() { return {0.0, DriftKind::none}; }
  void validate() const;
  /// Factor applied to the expected counts of setting nu; the sinusoid phase comes from `seed`.
  double factor(int nu, std::uint64_t seed) const;
};

struct CountOptions {
  bool exact_expectation = false;
  /// Uniform accidental background, counts per setting.
  double background = 0.0;
  double duration_s = 100.0;
};

/// <psi|rho|psi>, clamped to [0, 1].
double projection_probability(const DensityMatrix& rho, const Vec2& psi);

/// The four noiseless expectations total * <psi_nu|rho|psi_nu>.
std::array<double, 4> expected_counts(const DensityMatrix& rho, double total);

/// N_nu ~ Poisson(total * p_nu * drift(nu) + background). Deterministic in `seed`.
CountRecord simulate_counts(const DensityMatrix& rho, double mean_total_per_basis, const DriftModel& drift,
                            std::uint64_t seed, const CountOptions& options = {});

/// Per-basis normalization for a count budget summed over the four settings. The sum of the
/// four expectations is N (2 + (rD + rR)/2), i.e. 2N averaged over the sphere.
double per_basis_from_total(double total_over_settings);

} // namespace polq
