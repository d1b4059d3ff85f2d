#include "polq/counting.hpp"

#include "polq/errors.hpp"
#include "polq/random.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace polq {

namespace {
constexpr std::uint64_t kDriftStream = 0xD71F7;
constexpr std::uint64_t kCountStream = 0xC0C0;
} // namespace

AnalysisBasis AnalysisBasis::standard() { return {{ket_v(), ket_h(), ket_d(), ket_r()}}; }

void CountRecord::validate() const {
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (n[i] < 0) {
      throw DomainError("count N" + std::to_string(i) + " is negative");
    }
  }
  if (!(duration_s >= 0.0)) {
    throw DomainError("acquisition time must be nonnegative");
  }
}

void DriftModel::validate() const {
  if (!(relative_amplitude >= 0.0 && relative_amplitude < 1.0)) {
    throw DomainError("drift amplitude must lie in [0, 1)");
  }
}

double DriftModel::factor(int nu, std::uint64_t seed) const {
  switch (kind) {
  case DriftKind::none:
    return 1.0;
  case DriftKind::linear_ramp:
    return 1.0 + relative_amplitude * (2.0 * nu / 3.0 - 1.0);
  case DriftKind::sinusoidal: {
    Rng rng(derive_seed(seed, kDriftStream));
    const double phase = 2.0 * kPi * rng.uniform();
    return 1.0 + relative_amplitude * std::sin(0.5 * kPi * nu + phase);
  }
  }
  return 1.0;
}

double projection_probability(const DensityMatrix& rho, const Vec2& psi) {
  const double p = (psi.adjoint() * rho.matrix() * psi)(0, 0).real();
  return std::clamp(p, 0.0, 1.0);
}

std::array<double, 4> expected_counts(const DensityMatrix& rho, double total) {
  if (!(total > 0.0)) {
    throw DomainError("expected_counts needs a positive total");
  }
  const AnalysisBasis basis = AnalysisBasis::standard();
  std::array<double, 4> out{};
  for (std::size_t nu = 0; nu < 4; ++nu) {
    out[nu] = total * projection_probability(rho, basis.projectors[nu]);
  }
  return out;
}

CountRecord simulate_counts(const DensityMatrix& rho, double mean_total_per_basis, const DriftModel& drift,
                            std::uint64_t seed, const CountOptions& options) {
  if (!(mean_total_per_basis > 0.0) || !std::isfinite(mean_total_per_basis)) {
    throw DomainError("mean counts per basis must be positive");
  }
  drift.validate();
  if (!(options.background >= 0.0)) {
    throw DomainError("background rate must be nonnegative");
  }
  const std::array<double, 4> mean = expected_counts(rho, mean_total_per_basis);
  CountRecord record;
  record.duration_s = options.duration_s;
  record.expected_total = mean_total_per_basis;
  if (options.exact_expectation) {
    for (std::size_t nu = 0; nu < 4; ++nu) {
      record.n[nu] = std::llround(mean[nu] + options.background);
    }
    return record;
  }
  Rng rng(derive_seed(seed, kCountStream));
  for (std::size_t nu = 0; nu < 4; ++nu) {
    const double lambda = mean[nu] * drift.factor(static_cast<int>(nu), seed) + options.background;
    record.n[nu] = rng.poisson(lambda);
  }
  return record;
}

double per_basis_from_total(double total_over_settings) {
  if (!(total_over_settings > 0.0)) {
    throw DomainError("count budget must be positive");
  }
  return 0.5 * total_over_settings;
}

} // namespace polq
