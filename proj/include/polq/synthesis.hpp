#pragma once

#include "polq/core.hpp"
#include "polq/optics.hpp"

#include <utility>

namespace polq {

/// Waveplate settings for the HWP(theta1) -> decoherer -> HWP(theta2) -> QWP(theta3) chain.
struct SynthesisAngles {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double theta3 = 0.0;
};

/// Deviations of the actual retardances from pi (HWP) and pi/2 (QWP).
struct RetardanceErrors {
  double hwp_error = 0.0;
  double qwp_error = 0.0;

  /// Every state stays reachable when the QWP error is the smaller one.
  bool guarantees_reachability() const;
};

struct ImperfectSynthesisResult {
  SynthesisAngles angles;
  double infidelity = 1.0;
  int evaluations = 0;
};

/// Decoherer path difference used when none is given: 20 coherence lengths (full decoherence).
double default_decoherer_opd(const Spectrum& spec);

SynthesisAngles synth_angles(const DensityMatrix& target);

DensityMatrix forward_pipeline(const SynthesisAngles& angles, const Spectrum& spec, double opd);

/// Same chain built from retarders with the given retardance errors.
DensityMatrix forward_pipeline_imperfect(const SynthesisAngles& angles, const RetardanceErrors& errors,
                                         const Spectrum& spec, double opd);

/// Weights of |H><H| and I/2 in the state after the decoherer: (cos 4 theta1, 2 sin^2 2 theta1).
std::pair<double, double> intermediate_decomposition(double theta1);

/// Numeric search over the three angles. Throws ConvergenceFailure when the best infidelity
/// after all restarts stays above `max_infidelity`.
ImperfectSynthesisResult synth_angles_imperfect(const DensityMatrix& target, const RetardanceErrors& errors,
                                                const Spectrum& spec, double opd,
                                                double max_infidelity = 1e-8);

} // namespace polq
