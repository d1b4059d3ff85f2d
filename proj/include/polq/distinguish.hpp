#pragma once

#include "polq/core.hpp"
#include "polq/counting.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace polq {

/// Ratio of semi-axis to standard deviation used for the uncertainty patches.
inline constexpr double kEllipsoidSigmaScale = 1.69;

struct UncertaintyEllipsoid {
  PoincareVector mean_r;
  double radial_semiaxis = 0.0;
  std::array<double, 2> transverse_semiaxes{};
  /// Radial direction first, then the two transverse directions.
  std::array<Eigen::Vector3d, 3> axes;
  int trials_used = 0;

  double radial_sigma() const { return radial_semiaxis / kEllipsoidSigmaScale; }
  double volume() const;
  /// Reconstructed points of the individual trials (kept for containment checks and plots).
  std::vector<PoincareVector> points;
};

enum class PackingMethod { radial_shell_integration };

struct PackingEstimate {
  double total_states = 0.0;
  PackingMethod method = PackingMethod::radial_shell_integration;
  double packing_fraction = 0.74;
};

struct EllipsoidOptions {
  DriftModel drift;
  bool exact_expectation = false;
};

/// Repeats simulate-counts + maximum-likelihood reconstruction `trials` times with
/// `counts_total` counts summed over the four settings, and measures the spread along the
/// mean direction and two transverse directions.
UncertaintyEllipsoid ellipsoid_at(const DensityMatrix& rho, int trials, double counts_total, std::uint64_t seed,
                                  const EllipsoidOptions& options = {});

/// Direction used for the fixed-direction profile states.
Eigen::Vector3d default_profile_direction();

std::vector<UncertaintyEllipsoid> ellipsoid_profile(const std::vector<double>& radii, int trials,
                                                    double counts_total, std::uint64_t seed,
                                                    const EllipsoidOptions& options = {},
                                                    const Eigen::Vector3d& direction = default_profile_direction());

/// Ellipsoid volume interpolated piecewise-linearly in |r| from the profile (held constant
/// outside the sampled radii).
double interpolated_volume(const std::vector<UncertaintyEllipsoid>& profile, double radius);

/// packing_fraction * integral_0^1 4 pi s^2 / V(s) ds (101-point trapezoid).
PackingEstimate count_distinguishable(const std::vector<UncertaintyEllipsoid>& profile,
                                      double packing_fraction = 0.74);

/// Alternative estimate from the mean patch volume: packing_fraction * (4 pi / 3) / mean V.
double count_distinguishable_mean_volume(const std::vector<UncertaintyEllipsoid>& profile,
                                         double packing_fraction = 0.74);

/// Fraction of the recorded trial points inside the ellipsoid.
double containment_fraction(const UncertaintyEllipsoid& e);

} // namespace polq
