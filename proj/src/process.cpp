#include "polq/process.hpp"

#include "polq/errors.hpp"
#include "polq/parallel.hpp"
#include "polq/random.hpp"
#include "polq/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace polq {

namespace {

const Complex kI{0.0, 1.0};
constexpr double kKrausTol = 1e-10;
constexpr double kChiHermitianTol = 1e-10;
constexpr double kChiPsdTol = 1e-9;
constexpr double kDropEigenvalue = 1e-9;
constexpr double kAnnihilated = 1e-12;

double max_eigenvalue(const Mat2& h) {
  return Eigen::SelfAdjointEigenSolver<Mat2>(0.5 * (h + h.adjoint())).eigenvalues()(1);
}

// Fix the global phase so the first non-negligible component is real and positive.
Eigen::Vector4cd canonical_phase(Eigen::Vector4cd v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12) {
      return v * (std::abs(v(i)) / v(i));
    }
  }
  return v;
}

bool lexicographic_less(const Eigen::Vector4cd& a, const Eigen::Vector4cd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i).real() != b(i).real()) {
      return a(i).real() < b(i).real();
    }
    if (a(i).imag() != b(i).imag()) {
      return a(i).imag() < b(i).imag();
    }
  }
  return false;
}

// Hermitian 4x4 basis element k of 16: diagonal units, then symmetric real, then
// antisymmetric imaginary pairs.
Mat4 hermitian_basis(int k) {
  Mat4 h = Mat4::Zero();
  if (k < 4) {
    h(k, k) = 1.0;
    return h;
  }
  int idx = (k - 4) % 6;
  const bool imaginary = k >= 10;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if (idx-- == 0) {
        h(i, j) = imaginary ? kI : Complex{1.0, 0.0};
        h(j, i) = std::conj(h(i, j));
        return h;
      }
    }
  }
  return h;
}

} // namespace

const std::array<Mat2, 4>& pauli_basis() {
  static const std::array<Mat2, 4> basis = [] {
    std::array<Mat2, 4> b;
    b[0] = Mat2::Identity();
    b[1] << 0.0, 1.0,
            1.0, 0.0;
    b[2] << Complex{0.0, 0.0}, -kI,
            kI, Complex{0.0, 0.0};
    b[3] << 1.0, 0.0,
            0.0, -1.0;
    return b;
  }();
  return basis;
}

KrausSet::KrausSet(std::vector<Mat2> ops) : ops_(std::move(ops)) {
  if (ops_.empty()) {
    throw DomainError("a Kraus set needs at least one operator");
  }
  for (const Mat2& e : ops_) {
    if (!e.allFinite()) {
      throw DomainError("Kraus operator has non-finite entries");
    }
  }
  const double top = max_eigenvalue(completeness());
  if (top > 1.0 + kKrausTol) {
    throw DomainError("Kraus set increases trace (largest eigenvalue of sum E^dagger E is " +
                      std::to_string(top) + ")");
  }
}

Mat2 KrausSet::completeness() const {
  Mat2 sum = Mat2::Zero();
  for (const Mat2& e : ops_) {
    sum += e.adjoint() * e;
  }
  return sum;
}

bool KrausSet::is_trace_preserving(double tol) const {
  return (completeness() - Mat2::Identity()).cwiseAbs().maxCoeff() <= tol;
}

KrausSet KrausSet::then(const KrausSet& next) const {
  std::vector<Mat2> ops;
  ops.reserve(ops_.size() * next.ops_.size());
  for (const Mat2& b : next.ops_) {
    for (const Mat2& a : ops_) {
      ops.push_back(b * a);
    }
  }
  return KrausSet(std::move(ops));
}

KrausSet KrausSet::from_jones(const JonesOperator& op) { return KrausSet({op.matrix()}); }

ChiMatrix::ChiMatrix(const Mat4& chi) : chi_(chi) {
  if (!chi.allFinite()) {
    throw DomainError("chi matrix has non-finite entries");
  }
  if ((chi - chi.adjoint()).cwiseAbs().maxCoeff() > kChiHermitianTol) {
    throw DomainError("chi matrix is not Hermitian");
  }
  const double lowest = Eigen::SelfAdjointEigenSolver<Mat4>(0.5 * (chi + chi.adjoint())).eigenvalues()(0);
  if (lowest < -kChiPsdTol) {
    throw DomainError("chi matrix is not positive semidefinite (eigenvalue " + std::to_string(lowest) + ")");
  }
  if (max_eigenvalue(completeness()) > 1.0 + kChiPsdTol) {
    throw DomainError("chi matrix describes a trace-increasing process");
  }
}

Mat2 ChiMatrix::completeness() const {
  const auto& s = pauli_basis();
  Mat2 sum = Mat2::Zero();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      sum += chi_(i, j) * s[j] * s[i];
    }
  }
  return sum;
}

Mat2 apply_kraus_raw(const KrausSet& k, const Mat2& rho) {
  Mat2 out = Mat2::Zero();
  for (const Mat2& e : k.ops()) {
    out += e * rho * e.adjoint();
  }
  return out;
}

namespace {
ProcessOutput normalize_output(const Mat2& raw) {
  ProcessOutput out;
  out.weight = std::clamp(raw.trace().real(), 0.0, 1.0);
  if (out.weight >= kAnnihilated) {
    out.state = DensityMatrix::from_unnormalized(raw);
  }
  return out;
}
} // namespace

ProcessOutput apply_kraus(const KrausSet& k, const DensityMatrix& rho) {
  return normalize_output(apply_kraus_raw(k, rho.matrix()));
}

Mat2 apply_chi_raw(const ChiMatrix& chi, const Mat2& rho) {
  const auto& s = pauli_basis();
  Mat2 out = Mat2::Zero();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      out += chi.matrix()(i, j) * s[i] * rho * s[j];
    }
  }
  return out;
}

ProcessOutput apply_chi(const ChiMatrix& chi, const DensityMatrix& rho) {
  return normalize_output(apply_chi_raw(chi, rho.matrix()));
}

Eigen::Vector4cd pauli_coefficients(const Mat2& e) {
  const auto& s = pauli_basis();
  Eigen::Vector4cd c;
  for (int i = 0; i < 4; ++i) {
    c(i) = 0.5 * (s[i] * e).trace();
  }
  return c;
}

ChiMatrix chi_from_kraus(const KrausSet& k) {
  Mat4 chi = Mat4::Zero();
  for (const Mat2& e : k.ops()) {
    const Eigen::Vector4cd c = pauli_coefficients(e);
    chi += c * c.adjoint();
  }
  return ChiMatrix(0.5 * (chi + chi.adjoint()));
}

KrausSet kraus_from_chi(const ChiMatrix& chi) {
  Eigen::SelfAdjointEigenSolver<Mat4> eig(chi.matrix());
  struct Mode {
    double lambda;
    Eigen::Vector4cd v;
  };
  std::vector<Mode> modes;
  for (int k = 0; k < 4; ++k) {
    const double lambda = eig.eigenvalues()(k);
    if (lambda < -kChiPsdTol) {
      throw DomainError("chi matrix is not positive semidefinite");
    }
    if (lambda >= kDropEigenvalue) {
      modes.push_back({lambda, canonical_phase(eig.eigenvectors().col(k))});
    }
  }
  std::sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) {
    if (a.lambda != b.lambda) {
      return a.lambda > b.lambda;
    }
    return lexicographic_less(a.v, b.v);
  });

  const auto& s = pauli_basis();
  std::vector<Mat2> ops;
  for (const Mode& m : modes) {
    Mat2 e = Mat2::Zero();
    for (int i = 0; i < 4; ++i) {
      e += m.v(i) * s[i];
    }
    ops.push_back(std::sqrt(m.lambda) * e);
  }
  if (ops.empty()) {
    ops.push_back(Mat2::Zero());
  }
  return KrausSet(std::move(ops));
}

KrausSet decoherer_kraus(const Spectrum& spec, const DecohererSpec& d) {
  d.validate();
  const Complex gamma = decoherence_factor(spec, d.optical_path_difference);
  const double magnitude = std::min(1.0, std::abs(gamma));
  const double phase = std::arg(gamma);
  Mat2 u = Mat2::Zero();
  u(0, 0) = std::exp(0.5 * kI * phase);
  u(1, 1) = std::exp(-0.5 * kI * phase);
  const Mat2& b = d.basis_rotation.matrix();
  const Mat2 keep = std::sqrt(0.5 * (1.0 + magnitude)) * u;
  const Mat2 flip = std::sqrt(0.5 * (1.0 - magnitude)) * pauli_basis()[3] * u;
  return KrausSet({b * keep * b.adjoint(), b * flip * b.adjoint()});
}

std::vector<NamedProcess> canonical_processes() {
  const auto& s = pauli_basis();
  const double half = std::sqrt(0.5);
  Mat2 h_projector = Mat2::Zero();
  h_projector(0, 0) = 1.0;
  Mat2 partial = Mat2::Zero();
  partial(0, 0) = 1.0;
  partial(1, 1) = half;
  return {
      {"hadamard", KrausSet({half * (s[1] + s[3])})},
      {"h_polarizer", KrausSet({h_projector})},
      {"coherent_partial_polarizer", KrausSet({partial})},
      {"incoherent_partial_polarizer", KrausSet({half * h_projector, half * s[0]})},
      {"decoherer_HV", KrausSet({half * s[0], half * s[3]})},
  };
}

KrausSet canonical_process(const std::string& name) {
  for (auto& p : canonical_processes()) {
    if (p.name == name) {
      return p.kraus;
    }
  }
  throw std::out_of_range("unknown canonical process '" + name + "'");
}

std::array<DensityMatrix, 4> sqpt_inputs() { return {rho_h(), rho_v(), rho_d(), rho_r()}; }

ChiMatrix sqpt_reconstruct(const std::array<Mat2, 4>& weighted_outputs) {
  const auto& s = pauli_basis();
  const auto inputs = sqpt_inputs();
  Eigen::Matrix<Complex, 16, 16> design;
  Eigen::Matrix<Complex, 16, 1> rhs;
  for (int k = 0; k < 4; ++k) {
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        const Mat2 term = s[i] * inputs[k].matrix() * s[j];
        for (int a = 0; a < 2; ++a) {
          for (int b = 0; b < 2; ++b) {
            design(4 * k + 2 * a + b, 4 * i + j) = term(a, b);
          }
        }
      }
    }
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        rhs(4 * k + 2 * a + b) = weighted_outputs[k](a, b);
      }
    }
  }
  Eigen::FullPivLU<Eigen::Matrix<Complex, 16, 16>> lu(design);
  if (lu.rank() != 16) {
    throw std::logic_error("SQPT design matrix is singular for the H, V, D, R inputs");
  }
  const Eigen::Matrix<Complex, 16, 1> x = lu.solve(rhs);
  Mat4 chi;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      chi(i, j) = x(4 * i + j);
    }
  }
  chi = 0.5 * (chi + chi.adjoint()).eval();

  Eigen::SelfAdjointEigenSolver<Mat4> eig(chi);
  if (eig.eigenvalues()(0) < 0.0) {
    const double trace = chi.trace().real();
    const Eigen::Vector4d clamped = eig.eigenvalues().cwiseMax(0.0);
    Mat4 projected = eig.eigenvectors() * clamped.cast<Complex>().asDiagonal() * eig.eigenvectors().adjoint();
    const double projected_trace = projected.trace().real();
    if (projected_trace > 0.0) {
      projected *= trace / projected_trace;
    }
    chi = 0.5 * (projected + projected.adjoint());
  }
  // Counting noise can push the reconstructed survival slightly above one.
  const double top = max_eigenvalue([&] {
    Mat2 sum = Mat2::Zero();
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        sum += chi(i, j) * s[j] * s[i];
      }
    }
    return sum;
  }());
  if (top > 1.0) {
    chi /= top;
  }
  return ChiMatrix(chi);
}

Eigen::MatrixXd sqpt_design_matrix() {
  const auto inputs = sqpt_inputs();
  Eigen::MatrixXd design(16, 16);
  for (int p = 0; p < 16; ++p) {
    // The basis element need not be a valid process, so evaluate the double sum directly.
    const Mat4 h = hermitian_basis(p);
    const auto& s = pauli_basis();
    for (int k = 0; k < 4; ++k) {
      Mat2 out = Mat2::Zero();
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          out += h(i, j) * s[i] * inputs[k].matrix() * s[j];
        }
      }
      design(4 * k + 0, p) = out(0, 0).real();
      design(4 * k + 1, p) = out(1, 1).real();
      design(4 * k + 2, p) = out(0, 1).real();
      design(4 * k + 3, p) = out(0, 1).imag();
    }
  }
  return design;
}

SqptRun sqpt_end_to_end(const KrausSet& k, double counts_per_setting, std::uint64_t seed,
                        const SqptOptions& options) {
  if (!(counts_per_setting > 0.0)) {
    throw DomainError("counts per setting must be positive");
  }
  const auto inputs = sqpt_inputs();
  std::array<Mat2, 4> outputs;
  SqptRun run;
  parallel_for(4, [&](std::size_t idx) {
    const Mat2 raw = apply_kraus_raw(k, inputs[idx].matrix());
    const double survival = std::clamp(raw.trace().real(), 0.0, 1.0);
    CountRecord counts;
    if (survival >= kAnnihilated) {
      CountOptions count_options;
      count_options.exact_expectation = options.exact_expectation;
      counts = simulate_counts(DensityMatrix::from_unnormalized(raw), counts_per_setting * survival,
                               options.drift, derive_seed(seed, idx), count_options);
    }
    if (counts.normalization() <= 0) {
      run.low_confidence[idx] = true;
      run.measured_weights[idx] = 0.0;
      outputs[idx] = Mat2::Zero();
      return;
    }
    const TomographyResult tomo = mle_reconstruct(counts);
    const double measured = static_cast<double>(counts.normalization()) / counts_per_setting;
    run.measured_weights[idx] = measured;
    outputs[idx] = measured * tomo.rho.matrix();
  });
  run.chi = sqpt_reconstruct(outputs);
  return run;
}

SphereMap sphere_map(const KrausSet& k, const MeshResolution& res) {
  if (res.latitudes < 2 || res.longitudes < 4) {
    throw std::invalid_argument("sphere mesh needs at least 2 latitudes and 4 longitudes");
  }
  std::vector<PoincareVector> points;
  points.reserve(static_cast<std::size_t>(res.latitudes * res.longitudes + 6));
  for (int i = 0; i < res.latitudes; ++i) {
    const double elevation = -0.5 * kPi + kPi * i / (res.latitudes - 1);
    for (int j = 0; j < res.longitudes; ++j) {
      const double azimuth = 2.0 * kPi * j / res.longitudes;
      points.push_back({std::cos(elevation) * std::cos(azimuth), std::cos(elevation) * std::sin(azimuth),
                        std::sin(elevation)});
    }
  }
  const std::array<PoincareVector, 6> cardinals{{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};
  points.insert(points.end(), cardinals.begin(), cardinals.end());

  SphereMap map;
  map.resolution = res;
  map.samples.reserve(points.size());
  for (const PoincareVector& in : points) {
    const ProcessOutput out = apply_kraus(k, rho_from_poincare(in));
    SphereSample sample;
    sample.input = in;
    sample.weight = out.weight;
    if (out.state) {
      sample.output = poincare_from_rho(*out.state);
    }
    map.samples.push_back(sample);
  }
  return map;
}

} // namespace polq
