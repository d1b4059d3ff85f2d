#include "polq/tomography.hpp"

#include "polq/errors.hpp"
#include "polq/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace polq {

namespace {

constexpr double kBoundaryGuard = 1e-6;
constexpr double kDenominatorFloor = 0.5;
constexpr double kRestartJitter = 1e-3;
constexpr double kScalePenalty = 1.0;

double checked_normalization(const CountRecord& c) {
  c.validate();
  const std::int64_t total = c.normalization();
  if (total <= 0) {
    throw DegenerateInput("N0 + N1 = 0: the H/V counts carry no normalization");
  }
  return static_cast<double>(total);
}

TParams to_params(const Eigen::VectorXd& x) { return {{x(0), x(1), x(2), x(3)}}; }

} // namespace

PoincareVector linear_inversion(const CountRecord& c) {
  const double total = checked_normalization(c);
  return {2.0 * static_cast<double>(c.n[1]) / total - 1.0, 2.0 * static_cast<double>(c.n[2]) / total - 1.0,
          2.0 * static_cast<double>(c.n[3]) / total - 1.0};
}

DensityMatrix rho_from_t(const TParams& params) {
  double scale = 0.0;
  for (double v : params.t) {
    if (!std::isfinite(v)) {
      throw DomainError("t parameters must be finite");
    }
    scale = std::max(scale, std::abs(v));
  }
  if (scale == 0.0) {
    throw DegenerateInput("all-zero t parameters give a zero-trace matrix");
  }
  const double t1 = params[0] / scale;
  const double t2 = params[1] / scale;
  const double t3 = params[2] / scale;
  const double t4 = params[3] / scale;
  const double top = t1 * t1 + t3 * t3 + t4 * t4;
  const double bottom = t2 * t2;
  const double trace = top + bottom;
  const Complex off = t2 * Complex{t3, -t4} / trace;
  Mat2 m;
  m << top / trace, off,
       std::conj(off), bottom / trace;
  return DensityMatrix(m);
}

TParams t_start_from_counts(const CountRecord& c) {
  const PoincareVector r = linear_inversion(c);
  const double rh = std::min(r.rH, 1.0 - kBoundaryGuard);
  const double s = std::sqrt(2.0 * (1.0 - rh));
  const double radicand = 1.0 - ((1.0 - rh) * (1.0 - rh) + r.rD * r.rD + r.rR * r.rR) / (2.0 * (1.0 - rh));
  TParams t;
  t[0] = std::sqrt(std::max(0.0, radicand));
  t[1] = 0.5 * s;
  t[2] = r.rD / s;
  t[3] = -r.rR / s;
  return t;
}

double likelihood(const CountRecord& c, const DensityMatrix& rho) {
  const double total = checked_normalization(c);
  const AnalysisBasis basis = AnalysisBasis::standard();
  double sum = 0.0;
  for (std::size_t nu = 0; nu < 4; ++nu) {
    const double expected = total * projection_probability(rho, basis.projectors[nu]);
    const double diff = expected - static_cast<double>(c.n[nu]);
    sum += diff * diff / (2.0 * std::max(expected, kDenominatorFloor));
  }
  return sum;
}

double likelihood(const CountRecord& c, const TParams& t) { return likelihood(c, rho_from_t(t)); }

TomographyResult mle_reconstruct(const CountRecord& c, const MleOptions& options) {
  checked_normalization(c);
  const TParams raw_start = t_start_from_counts(c);
  TParams start = raw_start;
  double start_norm = 0.0;
  for (double v : start.t) {
    start_norm += v * v;
  }
  start_norm = std::sqrt(start_norm);
  for (double& v : start.t) {
    v /= start_norm;
  }

  // rho(t) is invariant under t -> c t; the penalty pins |t| = 1 so the simplex can contract
  // along that otherwise flat direction. It vanishes at the optimum and at the start.
  auto objective = [&c](const Eigen::VectorXd& x) {
    try {
      const double radial = x.squaredNorm() - 1.0;
      return likelihood(c, to_params(x)) + kScalePenalty * radial * radial;
    } catch (const DegenerateInput&) {
      return std::numeric_limits<double>::infinity();
    } catch (const DomainError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  SimplexOptions simplex;
  simplex.initial_step = options.initial_step;
  simplex.size_tolerance = options.size_tolerance;
  simplex.max_evaluations = options.max_evaluations;

  Eigen::VectorXd x0(4);
  x0 << start[0], start[1], start[2], start[3];
  SimplexResult run = minimize_simplex(objective, x0, simplex);
  int iterations = run.iterations;

  if (!run.converged) {
    Eigen::VectorXd jittered = run.x;
    for (Eigen::Index i = 0; i < jittered.size(); ++i) {
      jittered(i) += (i % 2 == 0 ? kRestartJitter : -kRestartJitter);
    }
    SimplexResult retry = minimize_simplex(objective, jittered, simplex);
    iterations += retry.iterations;
    if (retry.value <= run.value) {
      run = retry;
    } else {
      run.converged = retry.converged;
    }
  }

  TomographyResult result;
  result.t = to_params(run.x);
  result.residual_likelihood = likelihood(c, result.t);
  // Compared without the penalty, which can favour a point whose likelihood is marginally worse.
  const double start_likelihood = likelihood(c, raw_start);
  if (!(result.residual_likelihood <= start_likelihood)) {
    result.t = raw_start;
    result.residual_likelihood = start_likelihood;
  }
  result.rho = rho_from_t(result.t);
  result.iterations = iterations;
  result.converged = run.converged;
  return result;
}

} // namespace polq
