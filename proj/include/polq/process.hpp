#pragma once

#include "polq/core.hpp"
#include "polq/counting.hpp"
#include "polq/optics.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace polq {

using Mat4 = Eigen::Matrix4cd;

/// Operator basis (sigma0 = I, sigma1 = X, sigma2 = Y, sigma3 = Z) in this order.
const std::array<Mat2, 4>& pauli_basis();
inline const std::string kPauliBasisId = "pauli-eq5";

/// Operator-sum representation; sum_j E_j^dagger E_j <= I.
class KrausSet {
public:
  KrausSet() = default;
  explicit KrausSet(std::vector<Mat2> ops);

  const std::vector<Mat2>& ops() const { return ops_; }
  std::size_t size() const { return ops_.size(); }

  /// sum_j E_j^dagger E_j.
  Mat2 completeness() const;
  bool is_trace_preserving(double tol = 1e-10) const;

  /// Process `next` applied after this one.
  KrausSet then(const KrausSet& next) const;

  static KrausSet from_jones(const JonesOperator& op);

private:
  std::vector<Mat2> ops_;
};

/// Process matrix: E(rho) = sum_ij chi_ij sigma_i rho sigma_j.
class ChiMatrix {
public:
  ChiMatrix() : chi_(Mat4::Zero()) {}
  explicit ChiMatrix(const Mat4& chi);

  const Mat4& matrix() const { return chi_; }
  /// sum_ij chi_ij sigma_j sigma_i, equal to sum_k E_k^dagger E_k.
  Mat2 completeness() const;

private:
  Mat4 chi_;
};

struct ProcessOutput {
  double weight = 0.0;
  /// Normalized output state; empty when the input was annihilated (weight < 1e-12).
  std::optional<DensityMatrix> state;

  bool annihilated() const { return !state.has_value(); }
};

/// Unnormalized sum_j E_j rho E_j^dagger.
Mat2 apply_kraus_raw(const KrausSet& k, const Mat2& rho);
ProcessOutput apply_kraus(const KrausSet& k, const DensityMatrix& rho);

/// Unnormalized double sum sum_ij chi_ij sigma_i rho sigma_j.
Mat2 apply_chi_raw(const ChiMatrix& chi, const Mat2& rho);
ProcessOutput apply_chi(const ChiMatrix& chi, const DensityMatrix& rho);

/// Coefficients c_i with E = sum_i c_i sigma_i.
Eigen::Vector4cd pauli_coefficients(const Mat2& e);

ChiMatrix chi_from_kraus(const KrausSet& k);

/// Eigendecomposition of chi; at most four mutually orthogonal operators, eigenvalues below
/// 1e-9 dropped. Throws DomainError for chi with eigenvalues below -1e-9.
KrausSet kraus_from_chi(const ChiMatrix& chi);

/// Kraus set of a (possibly partial) birefringent decoherer in its eigenbasis.
KrausSet decoherer_kraus(const Spectrum& spec, const DecohererSpec& d);

struct NamedProcess {
  std::string name;
  KrausSet kraus;
};

/// hadamard, h_polarizer, coherent_partial_polarizer, incoherent_partial_polarizer,
/// decoherer_HV; probability weights folded into the operators.
std::vector<NamedProcess> canonical_processes();
/// Throws std::out_of_range for unknown names.
KrausSet canonical_process(const std::string& name);

/// Inputs used for standard process tomography, in order H, V, D, R.
std::array<DensityMatrix, 4> sqpt_inputs();

/// Solves the 16x16 linear system for chi from the unnormalized outputs (survival weight
/// included) of the inputs H, V, D, R, then Hermitizes and clamps negative eigenvalues
/// keeping the trace.
ChiMatrix sqpt_reconstruct(const std::array<Mat2, 4>& weighted_outputs);

/// Real 16x16 matrix mapping the 16 real parameters of a Hermitian chi to the 16 real
/// parameters of the four Hermitian outputs.
Eigen::MatrixXd sqpt_design_matrix();

struct SqptOptions {
  bool exact_expectation = false;
  DriftModel drift = DriftModel::none();
};

struct SqptRun {
  ChiMatrix chi;
  std::array<double, 4> measured_weights{};
  /// Inputs whose output carried no counts; their rows are effectively random.
  std::array<bool, 4> low_confidence{};
};

/// Prepare H, V, D, R, apply `k`, simulate counts (N = counts_per_setting times survival),
/// reconstruct each output by maximum likelihood, rescale by the measured survival and solve
/// for chi. Deterministic in `seed`.
SqptRun sqpt_end_to_end(const KrausSet& k, double counts_per_setting, std::uint64_t seed,
                        const SqptOptions& options = {});

struct SphereSample {
  PoincareVector input;
  PoincareVector output;
  double weight = 0.0;
};

struct MeshResolution {
  int latitudes = 25;
  int longitudes = 50;
};

struct SphereMap {
  std::vector<SphereSample> samples;
  MeshResolution resolution;
};

/// Pure inputs on a latitude-longitude grid (poles included) followed by the six cardinal
/// states H, V, D, A, R, L. Annihilated inputs are recorded at the origin with weight 0.
SphereMap sphere_map(const KrausSet& k, const MeshResolution& res = {});

} // namespace polq
