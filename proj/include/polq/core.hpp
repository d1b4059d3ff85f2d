#pragma once

#include <Eigen/Dense>
#include <complex>

namespace polq {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kStateTol = 1e-12;

/// Degrees of polarization in the H-V, D-A and R-L bases.
struct PoincareVector {
  double rH = 0.0;
  double rD = 0.0;
  double rR = 0.0;

  double norm() const;
  Eigen::Vector3d as_vector() const { return {rH, rD, rR}; }
  static PoincareVector from_vector(const Eigen::Vector3d& v) { return {v(0), v(1), v(2)}; }
};

/// rho = [[A, B e^{i delta}], [B e^{-i delta}, 1 - A]].
struct StateParams {
  double A = 1.0;
  double B = 0.0;
  double delta = 0.0;
};

/// A single-qubit density matrix. Construction validates Hermiticity, unit trace
/// and positive semidefiniteness; a constructed value is always physical.
class DensityMatrix {
public:
  /// Completely mixed state I/2.
  DensityMatrix();

  /// Throws DomainError if `m` is not a physical state to within `tol`.
  explicit DensityMatrix(const Mat2& m, double tol = kStateTol);

  /// Normalizes a nonzero PSD matrix by its trace and symmetrizes away round-off.
  /// For results of channel arithmetic, not for user input.
  static DensityMatrix from_unnormalized(const Mat2& m);

  static DensityMatrix pure(const Vec2& psi);

  const Mat2& matrix() const { return m_; }
  Complex operator()(int row, int col) const { return m_(row, col); }

  /// Eigenvalues in ascending order.
  Eigen::Vector2d eigenvalues() const;

private:
  Mat2 m_;
};

// Fiducial states. With the convention below |R> = (|H> - i|V>)/sqrt(2) sits at r = (0,0,1).
Vec2 ket_h();
Vec2 ket_v();
Vec2 ket_d();
Vec2 ket_a();
Vec2 ket_r();
Vec2 ket_l();

DensityMatrix rho_h();
DensityMatrix rho_v();
DensityMatrix rho_d();
DensityMatrix rho_r();
DensityMatrix rho_mixed();

/// Top-right element is (rD + i rR)/2, i.e. the footnote conversions rH = 2A-1,
/// rD = 2B cos(delta), rR = 2B sin(delta) hold exactly.
DensityMatrix rho_from_poincare(const PoincareVector& r);
PoincareVector poincare_from_rho(const DensityMatrix& rho);

DensityMatrix rho_from_abdelta(const StateParams& p);
StateParams abdelta_from_rho(const DensityMatrix& rho);

/// Uhlmann fidelity |Tr sqrt(sqrt(rho1) rho2 sqrt(rho1))|^2, clamped to [0, 1].
double fidelity(const DensityMatrix& rho1, const DensityMatrix& rho2);

double purity(const DensityMatrix& rho);

/// Half the trace norm of the difference.
double trace_distance(const DensityMatrix& rho1, const DensityMatrix& rho2);

bool is_unitary(const Mat2& u, double tol);

} // namespace polq
