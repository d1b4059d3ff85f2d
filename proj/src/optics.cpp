#include "polq/optics.hpp"

#include "polq/errors.hpp"

#include <cmath>

namespace polq {

namespace {

const Complex kI{0.0, 1.0};

// Projector onto linear polarization at angle theta.
Mat2 axis_projector(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Mat2 p;
  p << c * c, s * c,
       s * c, s * s;
  return p;
}

} // namespace

JonesOperator::JonesOperator(const Mat2& m) : m_(m) {
  if (!m.allFinite()) {
    throw DomainError("Jones matrix has non-finite entries");
  }
  Eigen::JacobiSVD<Mat2> svd(m);
  if (svd.singularValues()(0) > 1.0 + 1e-12) {
    throw DomainError("Jones matrix amplifies light (largest singular value " +
                      std::to_string(svd.singularValues()(0)) + ")");
  }
}

JonesOperator JonesOperator::then(const JonesOperator& next) const {
  return JonesOperator(next.matrix() * m_);
}

void Spectrum::validate() const {
  if (!(fwhm_wavelength > 0.0 && fwhm_wavelength < center_wavelength)) {
    throw DomainError("spectrum requires 0 < fwhm_wavelength < center_wavelength");
  }
}

double Spectrum::center_angular_frequency() const {
  return 2.0 * kPi * kSpeedOfLight / center_wavelength;
}

double Spectrum::fwhm_angular_frequency() const {
  const double blue = center_wavelength - 0.5 * fwhm_wavelength;
  const double red = center_wavelength + 0.5 * fwhm_wavelength;
  return 2.0 * kPi * kSpeedOfLight * (1.0 / blue - 1.0 / red);
}

double Spectrum::sigma_angular_frequency() const {
  return fwhm_angular_frequency() / (2.0 * std::sqrt(2.0 * std::log(2.0)));
}

double Spectrum::density(double omega) const {
  const double sigma = sigma_angular_frequency();
  const double z = (omega - center_angular_frequency()) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * kPi));
}

void DecohererSpec::validate() const {
  if (!(optical_path_difference >= 0.0)) {
    throw DomainError("decoherer optical path difference must be nonnegative");
  }
  if (!basis_rotation.is_unitary(1e-10)) {
    throw DomainError("decoherer basis rotation must be unitary");
  }
}

JonesOperator hwp(double theta) {
  const double c = std::cos(2.0 * theta);
  const double s = std::sin(2.0 * theta);
  Mat2 m;
  m << -c, -s,
       -s, c;
  return JonesOperator(m);
}

JonesOperator qwp(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const Complex k{1.0, 1.0};
  Mat2 m;
  m << 1.0 - k * c * c, -k * s * c,
       -k * s * c, 1.0 - k * s * s;
  return JonesOperator(m);
}

JonesOperator general_waveplate(double retardance, double theta) {
  const Mat2 p = axis_projector(theta);
  return JonesOperator((Mat2::Identity() - p) + std::exp(-kI * retardance) * p);
}

DensityMatrix apply_unitary(const JonesOperator& op, const DensityMatrix& rho) {
  if (!op.is_unitary(1e-10)) {
    throw DomainError("apply_unitary needs a unitary operator; use apply_kraus for lossy elements");
  }
  return DensityMatrix::from_unnormalized(op.matrix() * rho.matrix() * op.matrix().adjoint());
}

Complex decoherence_factor(const Spectrum& spec, double opd) {
  spec.validate();
  if (opd < 0.0) {
    throw DomainError("optical path difference must be nonnegative");
  }
  const double tau = opd / kSpeedOfLight;
  const double sigma = spec.sigma_angular_frequency();
  const double envelope = std::exp(-0.5 * sigma * sigma * tau * tau);
  return envelope * std::exp(kI * (spec.center_angular_frequency() * tau));
}

Complex decoherence_factor_quadrature(const std::function<double(double)>& spectral_density,
                                      double omega_lo, double omega_hi, int points, double opd) {
  if (points < 2) {
    throw std::invalid_argument("quadrature needs at least two points");
  }
  const double tau = opd / kSpeedOfLight;
  const double h = (omega_hi - omega_lo) / (points - 1);
  Complex sum{0.0, 0.0};
  for (int k = 0; k < points; ++k) {
    const double omega = omega_lo + h * k;
    const double w = (k == 0 || k == points - 1) ? 0.5 : 1.0;
    sum += w * spectral_density(omega) * std::exp(kI * (omega * tau));
  }
  return h * sum;
}

double coherence_length(const Spectrum& spec) {
  spec.validate();
  return 2.0 * kPi * kSpeedOfLight / spec.fwhm_angular_frequency();
}

DensityMatrix decohere(const DensityMatrix& rho, const Spectrum& spec, const DecohererSpec& d) {
  d.validate();
  const Complex gamma = decoherence_factor(spec, d.optical_path_difference);
  const Mat2& u = d.basis_rotation.matrix();
  Mat2 inner = u.adjoint() * rho.matrix() * u;
  inner(0, 1) *= gamma;
  inner(1, 0) *= std::conj(gamma);
  return DensityMatrix::from_unnormalized(u * inner * u.adjoint());
}

JonesOperator coherent_partial_polarizer(double t_h, double t_v) {
  if (!(t_h >= 0.0 && t_h <= 1.0 && t_v >= 0.0 && t_v <= 1.0)) {
    throw DomainError("intensity transmissions must lie in [0, 1]");
  }
  Mat2 m = Mat2::Zero();
  m(0, 0) = std::sqrt(t_h);
  m(1, 1) = std::sqrt(t_v);
  return JonesOperator(m);
}

std::pair<double, double> brewster_stack_transmission(int num_interfaces) {
  if (num_interfaces < 0) {
    throw std::invalid_argument("number of interfaces must be nonnegative");
  }
  return {1.0, std::pow(0.85, num_interfaces)};
}

JonesOperator basis_hv() { return JonesOperator(); }

JonesOperator basis_da() {
  Mat2 m;
  m.col(0) = ket_d();
  m.col(1) = ket_a();
  return JonesOperator(m);
}

JonesOperator basis_rl() {
  Mat2 m;
  m.col(0) = ket_r();
  m.col(1) = ket_l();
  return JonesOperator(m);
}

} // namespace polq
