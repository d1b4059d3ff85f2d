#include "polq/core.hpp"

#include "polq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace polq {

namespace {

const Complex kI{0.0, 1.0};

// Ascending eigenvalues of a Hermitian 2x2 matrix (imaginary parts of the diagonal ignored).
Eigen::Vector2d hermitian_eigenvalues(const Mat2& m) {
  const double a = m(0, 0).real();
  const double d = m(1, 1).real();
  const Complex b = 0.5 * (m(0, 1) + std::conj(m(1, 0)));
  const double mean = 0.5 * (a + d);
  const double half_gap = std::hypot(0.5 * (a - d), std::abs(b));
  return {mean - half_gap, mean + half_gap};
}

std::string describe(const Mat2& m) {
  std::ostringstream out;
  out << "[[" << m(0, 0) << ", " << m(0, 1) << "], [" << m(1, 0) << ", " << m(1, 1) << "]]";
  return out.str();
}

} // namespace

double PoincareVector::norm() const { return std::sqrt(rH * rH + rD * rD + rR * rR); }

DensityMatrix::DensityMatrix() : m_(Mat2::Identity() * 0.5) {}

DensityMatrix::DensityMatrix(const Mat2& m, double tol) : m_(m) {
  if (!m.allFinite()) {
    throw DomainError("density matrix has non-finite entries");
  }
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol) {
    throw DomainError("density matrix is not Hermitian: " + describe(m));
  }
  if (std::abs(m.trace() - Complex{1.0, 0.0}) > tol) {
    throw DomainError("density matrix trace is not 1: " + describe(m));
  }
  if (hermitian_eigenvalues(m)(0) < -tol) {
    throw DomainError("density matrix is not positive semidefinite: " + describe(m));
  }
}

DensityMatrix DensityMatrix::from_unnormalized(const Mat2& m) {
  Mat2 h = 0.5 * (m + m.adjoint());
  const double tr = h.trace().real();
  if (!(tr > 0.0) || !std::isfinite(tr)) {
    throw DegenerateInput("cannot normalize a matrix with nonpositive trace");
  }
  h /= tr;
  if (hermitian_eigenvalues(h)(0) < 0.0) {
    Eigen::SelfAdjointEigenSolver<Mat2> eig(h);
    Eigen::Vector2d lambda = eig.eigenvalues().cwiseMax(0.0);
    lambda /= lambda.sum();
    h = eig.eigenvectors() * lambda.cast<Complex>().asDiagonal() * eig.eigenvectors().adjoint();
  }
  h(0, 0) = h(0, 0).real();
  h(1, 1) = 1.0 - h(0, 0).real();
  h(1, 0) = std::conj(h(0, 1));
  return DensityMatrix(h);
}

DensityMatrix DensityMatrix::pure(const Vec2& psi) {
  const double n = psi.norm();
  if (!(n > 0.0)) {
    throw DegenerateInput("cannot build a pure state from the zero vector");
  }
  const Vec2 unit = psi / n;
  return from_unnormalized(unit * unit.adjoint());
}

Eigen::Vector2d DensityMatrix::eigenvalues() const { return hermitian_eigenvalues(m_); }

Vec2 ket_h() { return {1.0, 0.0}; }
Vec2 ket_v() { return {0.0, 1.0}; }
Vec2 ket_d() { return Vec2{1.0, 1.0} / std::sqrt(2.0); }
Vec2 ket_a() { return Vec2{1.0, -1.0} / std::sqrt(2.0); }
Vec2 ket_r() { return Vec2{Complex{1.0, 0.0}, -kI} / std::sqrt(2.0); }
Vec2 ket_l() { return Vec2{Complex{1.0, 0.0}, kI} / std::sqrt(2.0); }

DensityMatrix rho_h() { return rho_from_poincare({1.0, 0.0, 0.0}); }
DensityMatrix rho_v() { return rho_from_poincare({-1.0, 0.0, 0.0}); }
DensityMatrix rho_d() { return rho_from_poincare({0.0, 1.0, 0.0}); }
DensityMatrix rho_r() { return rho_from_poincare({0.0, 0.0, 1.0}); }
DensityMatrix rho_mixed() { return DensityMatrix(); }

DensityMatrix rho_from_poincare(const PoincareVector& r) {
  const double n = r.norm();
  if (!std::isfinite(n) || n > 1.0 + 1e-9) {
    throw DomainError("Poincare vector lies outside the unit ball (|r| = " + std::to_string(n) + ")");
  }
  PoincareVector v = r;
  if (n > 1.0) {
    v = {r.rH / n, r.rD / n, r.rR / n};
  }
  Mat2 m;
  m << 0.5 * (1.0 + v.rH), 0.5 * Complex{v.rD, v.rR},
       0.5 * Complex{v.rD, -v.rR}, 0.5 * (1.0 - v.rH);
  return DensityMatrix(m);
}

PoincareVector poincare_from_rho(const DensityMatrix& rho) {
  const Mat2& m = rho.matrix();
  return {(m(0, 0) - m(1, 1)).real(), 2.0 * m(0, 1).real(), 2.0 * m(0, 1).imag()};
}

DensityMatrix rho_from_abdelta(const StateParams& p) {
  if (!(p.A >= -kStateTol && p.A <= 1.0 + kStateTol)) {
    throw DomainError("A must lie in [0, 1]");
  }
  if (p.B < 0.0) {
    throw DomainError("B must be nonnegative");
  }
  const double a = std::clamp(p.A, 0.0, 1.0);
  if (p.B > std::sqrt(a * (1.0 - a)) + kStateTol) {
    throw DomainError("B exceeds sqrt(A(1-A)); state would not be positive semidefinite");
  }
  Mat2 m;
  m << a, p.B * std::exp(kI * p.delta),
       p.B * std::exp(-kI * p.delta), 1.0 - a;
  return DensityMatrix(m);
}

StateParams abdelta_from_rho(const DensityMatrix& rho) {
  const Complex off = rho(0, 1);
  double delta = std::arg(off);
  if (delta >= kPi) {
    delta -= 2.0 * kPi;
  }
  return {rho(0, 0).real(), std::abs(off), delta};
}

double fidelity(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  // For 2x2 states Tr sqrt(sqrt(a) b sqrt(a)) = sqrt(Tr(ab) + 2 sqrt(det a det b)); the
  // determinants are products of eigenvalues, so clamping them at zero is the same as
  // clamping negative eigenvalues before taking square roots.
  const double overlap = (rho1.matrix() * rho2.matrix()).trace().real();
  const double det1 = std::max(0.0, rho1.matrix().determinant().real());
  const double det2 = std::max(0.0, rho2.matrix().determinant().real());
  return std::clamp(overlap + 2.0 * std::sqrt(det1 * det2), 0.0, 1.0);
}

double purity(const DensityMatrix& rho) {
  return (rho.matrix() * rho.matrix()).trace().real();
}

double trace_distance(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  const Eigen::Vector2d lambda = hermitian_eigenvalues(rho1.matrix() - rho2.matrix());
  return 0.5 * (std::abs(lambda(0)) + std::abs(lambda(1)));
}

bool is_unitary(const Mat2& u, double tol) {
  return (u.adjoint() * u - Mat2::Identity()).cwiseAbs().maxCoeff() <= tol;
}

} // namespace polq
