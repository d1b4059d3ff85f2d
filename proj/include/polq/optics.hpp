#pragma once

#include "polq/core.hpp"

#include <functional>
#include <utility>

namespace polq {

inline constexpr double kSpeedOfLight = 299792458.0; // m/s

/// Jones matrix of a passive element. Singular values never exceed 1.
class JonesOperator {
public:
  JonesOperator() : m_(Mat2::Identity()) {}
  explicit JonesOperator(const Mat2& m);

  const Mat2& matrix() const { return m_; }
  bool is_unitary(double tol = 1e-10) const { return polq::is_unitary(m_, tol); }

  JonesOperator then(const JonesOperator& next) const;

private:
  Mat2 m_;
};

enum class SpectralShape { gaussian };

/// Intensity spectrum |A(omega)|^2 of the detected photons, specified in wavelength.
struct Spectrum {
  double center_wavelength = 702e-9; // m
  double fwhm_wavelength = 10e-9;    // m
  SpectralShape shape = SpectralShape::gaussian;

  void validate() const;
  double center_angular_frequency() const;
  /// FWHM in angular frequency, from the band edges center -/+ fwhm/2.
  double fwhm_angular_frequency() const;
  /// Standard deviation of the gaussian intensity spectrum in angular frequency.
  double sigma_angular_frequency() const;
  /// Normalized |A(omega)|^2, integrating to 1 over omega.
  double density(double omega) const;
};

/// Birefringent decoherer: optical path difference (n_H - n_V) L and the unitary whose
/// columns are the element's eigenpolarizations (identity for an H-V decoherer).
struct DecohererSpec {
  double optical_path_difference = 0.0; // m
  JonesOperator basis_rotation;

  void validate() const;
};

JonesOperator hwp(double theta);
JonesOperator qwp(double theta);
/// Retarder with fast axis at `theta`; reduces exactly to hwp/qwp at retardance pi and pi/2.
JonesOperator general_waveplate(double retardance, double theta);

/// op rho op^dagger; throws DomainError if op is not unitary (use apply_kraus for lossy elements).
DensityMatrix apply_unitary(const JonesOperator& op, const DensityMatrix& rho);

/// gamma = integral d omega |A(omega)|^2 exp(i opd omega / c), closed form for a gaussian spectrum.
Complex decoherence_factor(const Spectrum& spec, double opd);

/// Same integral evaluated by the trapezoidal rule on an explicit |A(omega)|^2.
Complex decoherence_factor_quadrature(const std::function<double(double)>& spectral_density,
                                      double omega_lo, double omega_hi, int points, double opd);

/// L_c = 2 pi c / delta_omega.
double coherence_length(const Spectrum& spec);

DensityMatrix decohere(const DensityMatrix& rho, const Spectrum& spec, const DecohererSpec& d);

JonesOperator coherent_partial_polarizer(double t_h, double t_v);

/// Intensity transmissions (tH, tV) of a stack of glass interfaces tilted at Brewster's angle:
/// p is fully transmitted, s loses 15% per interface.
std::pair<double, double> brewster_stack_transmission(int num_interfaces);

/// Unitaries whose columns are the eigenpolarizations of the named basis.
JonesOperator basis_hv();
JonesOperator basis_da();
JonesOperator basis_rl();

} // namespace polq
