#include "polq/synthesis.hpp"

#include "polq/errors.hpp"
#include "polq/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace polq {

namespace {

constexpr int kRestarts = 8;
constexpr int kEvaluationsPerRestart = 2000;

DensityMatrix run_chain(const JonesOperator& first_hwp, const JonesOperator& second_hwp,
                        const JonesOperator& last_qwp, const Spectrum& spec, double opd) {
  DensityMatrix rho = apply_unitary(first_hwp, rho_h());
  rho = decohere(rho, spec, DecohererSpec{opd, basis_hv()});
  rho = apply_unitary(second_hwp, rho);
  return apply_unitary(last_qwp, rho);
}

} // namespace

bool RetardanceErrors::guarantees_reachability() const {
  return std::abs(qwp_error) < std::abs(hwp_error) || (hwp_error == 0.0 && qwp_error == 0.0);
}

double default_decoherer_opd(const Spectrum& spec) { return 20.0 * coherence_length(spec); }

SynthesisAngles synth_angles(const DensityMatrix& target) {
  const PoincareVector r = poincare_from_rho(target);
  const double length = std::min(1.0, r.norm());
  SynthesisAngles a;
  a.theta1 = 0.25 * std::acos(length);
  if (length < 1e-15) {
    return a;
  }
  const double azimuth = std::atan2(r.rD, r.rH);
  const double elevation = std::atan2(r.rR, std::hypot(r.rH, r.rD));
  // The QWP at theta3 turns the equatorial point at azimuth (azimuth - elevation) up to the
  // target elevation; with r_R = 2 Im(rho_01) that needs the minus sign.
  a.theta2 = 0.25 * (azimuth - elevation);
  a.theta3 = 0.5 * azimuth;
  return a;
}

DensityMatrix forward_pipeline(const SynthesisAngles& angles, const Spectrum& spec, double opd) {
  return run_chain(hwp(angles.theta1), hwp(angles.theta2), qwp(angles.theta3), spec, opd);
}

DensityMatrix forward_pipeline_imperfect(const SynthesisAngles& angles, const RetardanceErrors& errors,
                                         const Spectrum& spec, double opd) {
  const double half = kPi + errors.hwp_error;
  const double quarter = 0.5 * kPi + errors.qwp_error;
  return run_chain(general_waveplate(half, angles.theta1), general_waveplate(half, angles.theta2),
                   general_waveplate(quarter, angles.theta3), spec, opd);
}

std::pair<double, double> intermediate_decomposition(double theta1) {
  if (!(theta1 >= -1e-12 && theta1 <= 0.125 * kPi + 1e-12)) {
    throw DomainError("theta1 must lie in [0, pi/8]");
  }
  const double s = std::sin(2.0 * theta1);
  return {std::cos(4.0 * theta1), 2.0 * s * s};
}

ImperfectSynthesisResult synth_angles_imperfect(const DensityMatrix& target, const RetardanceErrors& errors,
                                                const Spectrum& spec, double opd, double max_infidelity) {
  int evaluations = 0;
  auto infidelity = [&](const Eigen::VectorXd& x) {
    ++evaluations;
    const SynthesisAngles a{x(0), x(1), x(2)};
    return 1.0 - fidelity(forward_pipeline_imperfect(a, errors, spec, opd), target);
  };

  // Starting points: the ideal-waveplate solution, then the best cells of a coarse grid.
  std::vector<Eigen::Vector3d> starts;
  const SynthesisAngles ideal = synth_angles(target);
  starts.emplace_back(ideal.theta1, ideal.theta2, ideal.theta3);

  std::vector<std::pair<double, Eigen::Vector3d>> grid;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 8; ++j) {
      for (int k = 0; k < 8; ++k) {
        const Eigen::Vector3d x{i * kPi / 16.0, j * kPi / 8.0, k * kPi / 8.0};
        grid.emplace_back(infidelity(x), x);
      }
    }
  }
  std::stable_sort(grid.begin(), grid.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (int i = 0; i < kRestarts && i < static_cast<int>(grid.size()); ++i) {
    starts.push_back(grid[static_cast<size_t>(i)].second);
  }

  SimplexOptions options;
  options.initial_step = 0.05;
  options.size_tolerance = 1e-12;
  options.max_evaluations = kEvaluationsPerRestart;

  ImperfectSynthesisResult best;
  for (const auto& start : starts) {
    const SimplexResult run = minimize_simplex(infidelity, start, options);
    if (run.value < best.infidelity) {
      best.infidelity = run.value;
      best.angles = {run.x(0), run.x(1), run.x(2)};
    }
    if (best.infidelity <= 1e-2 * max_infidelity) {
      break;
    }
  }
  best.evaluations = evaluations;
  if (best.infidelity > max_infidelity) {
    throw ConvergenceFailure("target unreachable with these retardance errors (best infidelity " +
                             std::to_string(best.infidelity) + ")");
  }
  return best;
}

} // namespace polq
