#include "polq/distinguish.hpp"

#include "polq/errors.hpp"
#include "polq/parallel.hpp"
#include "polq/random.hpp"
#include "polq/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace polq {

namespace {

constexpr int kMinTrials = 3;
constexpr int kShellPoints = 101;

double sample_std(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) {
    mean += x;
  }
  mean /= n;
  double ss = 0.0;
  for (double x : xs) {
    ss += (x - mean) * (x - mean);
  }
  return std::sqrt(ss / (n - 1.0));
}

std::array<Eigen::Vector3d, 3> frame_for(const Eigen::Vector3d& mean) {
  Eigen::Vector3d radial = mean.norm() < 1e-6 ? Eigen::Vector3d::UnitX() : mean.normalized();
  Eigen::Vector3d seed = Eigen::Vector3d::UnitZ();
  if (std::abs(radial.dot(seed)) > 0.9) {
    seed = Eigen::Vector3d::UnitX();
  }
  const Eigen::Vector3d t1 = (seed - seed.dot(radial) * radial).normalized();
  const Eigen::Vector3d t2 = radial.cross(t1);
  return {radial, t1, t2};
}

std::vector<std::pair<double, double>> volume_table(const std::vector<UncertaintyEllipsoid>& profile) {
  std::vector<std::pair<double, double>> table;
  table.reserve(profile.size());
  for (const auto& e : profile) {
    table.emplace_back(e.mean_r.norm(), e.volume());
  }
  std::sort(table.begin(), table.end());
  return table;
}

double interpolate(const std::vector<std::pair<double, double>>& table, double radius) {
  if (radius <= table.front().first) {
    return table.front().second;
  }
  if (radius >= table.back().first) {
    return table.back().second;
  }
  const auto hi = std::upper_bound(table.begin(), table.end(), radius,
                                   [](double r, const auto& entry) { return r < entry.first; });
  const auto lo = hi - 1;
  const double span = hi->first - lo->first;
  if (span <= 0.0) {
    return lo->second;
  }
  const double w = (radius - lo->first) / span;
  return (1.0 - w) * lo->second + w * hi->second;
}

} // namespace

double UncertaintyEllipsoid::volume() const {
  return 4.0 * kPi / 3.0 * radial_semiaxis * transverse_semiaxes[0] * transverse_semiaxes[1];
}

UncertaintyEllipsoid ellipsoid_at(const DensityMatrix& rho, int trials, double counts_total, std::uint64_t seed,
                                  const EllipsoidOptions& options) {
  if (trials < kMinTrials) {
    throw std::invalid_argument("ellipsoid_at needs at least 3 trials");
  }
  if (!(counts_total > 0.0)) {
    throw DomainError("counts_total must be positive");
  }
  const double per_basis = per_basis_from_total(counts_total);
  CountOptions count_options;
  count_options.exact_expectation = options.exact_expectation;

  std::vector<std::optional<PoincareVector>> reconstructed(static_cast<std::size_t>(trials));
  parallel_for(reconstructed.size(), [&](std::size_t i) {
    const CountRecord counts = simulate_counts(rho, per_basis, options.drift, derive_seed(seed, i), count_options);
    if (counts.normalization() <= 0) {
      return;
    }
    const TomographyResult result = mle_reconstruct(counts);
    if (result.converged) {
      reconstructed[i] = poincare_from_rho(result.rho);
    }
  });

  UncertaintyEllipsoid e;
  for (const auto& r : reconstructed) {
    if (r) {
      e.points.push_back(*r);
    }
  }
  if (static_cast<int>(e.points.size()) < kMinTrials) {
    throw ConvergenceFailure("fewer than 3 converged reconstructions for the uncertainty ellipsoid");
  }
  e.trials_used = static_cast<int>(e.points.size());

  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : e.points) {
    mean += p.as_vector();
  }
  mean /= static_cast<double>(e.points.size());
  e.mean_r = PoincareVector::from_vector(mean);
  e.axes = frame_for(mean);

  std::array<double, 3> sigma{};
  for (int axis = 0; axis < 3; ++axis) {
    std::vector<double> projections;
    projections.reserve(e.points.size());
    for (const auto& p : e.points) {
      projections.push_back((p.as_vector() - mean).dot(e.axes[static_cast<std::size_t>(axis)]));
    }
    sigma[static_cast<std::size_t>(axis)] = sample_std(projections);
  }
  e.radial_semiaxis = kEllipsoidSigmaScale * sigma[0];
  e.transverse_semiaxes = {kEllipsoidSigmaScale * sigma[1], kEllipsoidSigmaScale * sigma[2]};
  return e;
}

Eigen::Vector3d default_profile_direction() { return Eigen::Vector3d(1.0, 1.0, 1.0).normalized(); }

std::vector<UncertaintyEllipsoid> ellipsoid_profile(const std::vector<double>& radii, int trials,
                                                    double counts_total, std::uint64_t seed,
                                                    const EllipsoidOptions& options,
                                                    const Eigen::Vector3d& direction) {
  if (!(direction.norm() > 0.0)) {
    throw std::invalid_argument("profile direction must be nonzero");
  }
  const Eigen::Vector3d unit = direction.normalized();
  for (double r : radii) {
    if (!(r >= 0.0 && r <= 1.0)) {
      throw DomainError("profile radii must lie in [0, 1]");
    }
  }
  std::vector<UncertaintyEllipsoid> profile;
  profile.reserve(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const DensityMatrix rho = rho_from_poincare(PoincareVector::from_vector(radii[i] * unit));
    profile.push_back(ellipsoid_at(rho, trials, counts_total, derive_seed(seed, 1000 + i), options));
  }
  return profile;
}

double interpolated_volume(const std::vector<UncertaintyEllipsoid>& profile, double radius) {
  if (profile.empty()) {
    throw std::invalid_argument("empty ellipsoid profile");
  }
  return interpolate(volume_table(profile), radius);
}

PackingEstimate count_distinguishable(const std::vector<UncertaintyEllipsoid>& profile, double packing_fraction) {
  if (profile.size() < 2) {
    throw std::invalid_argument("insufficient profile: need at least two radii");
  }
  if (!(packing_fraction > 0.0 && packing_fraction <= 1.0)) {
    throw DomainError("packing fraction must lie in (0, 1]");
  }
  const auto table = volume_table(profile);
  for (const auto& [radius, volume] : table) {
    if (!(volume > 0.0)) {
      throw DomainError("ellipsoid volumes must be positive to count distinguishable states");
    }
  }
  const double h = 1.0 / (kShellPoints - 1);
  double integral = 0.0;
  for (int k = 0; k < kShellPoints; ++k) {
    const double s = h * k;
    const double w = (k == 0 || k == kShellPoints - 1) ? 0.5 : 1.0;
    integral += w * 4.0 * kPi * s * s / interpolate(table, s);
  }
  PackingEstimate estimate;
  estimate.total_states = packing_fraction * h * integral;
  estimate.packing_fraction = packing_fraction;
  return estimate;
}

double count_distinguishable_mean_volume(const std::vector<UncertaintyEllipsoid>& profile, double packing_fraction) {
  if (profile.empty()) {
    throw std::invalid_argument("empty ellipsoid profile");
  }
  double mean = 0.0;
  for (const auto& e : profile) {
    mean += e.volume();
  }
  mean /= static_cast<double>(profile.size());
  return packing_fraction * (4.0 * kPi / 3.0) / mean;
}

double containment_fraction(const UncertaintyEllipsoid& e) {
  if (e.points.empty()) {
    return 0.0;
  }
  const Eigen::Vector3d center = e.mean_r.as_vector();
  const std::array<double, 3> semi{e.radial_semiaxis, e.transverse_semiaxes[0], e.transverse_semiaxes[1]};
  int inside = 0;
  for (const auto& p : e.points) {
    const Eigen::Vector3d d = p.as_vector() - center;
    double q = 0.0;
    for (std::size_t a = 0; a < 3; ++a) {
      const double x = d.dot(e.axes[a]);
      q += semi[a] > 0.0 ? (x * x) / (semi[a] * semi[a]) : (x == 0.0 ? 0.0 : 1e300);
    }
    inside += q <= 1.0 ? 1 : 0;
  }
  return static_cast<double>(inside) / static_cast<double>(e.points.size());
}

} // namespace polq
