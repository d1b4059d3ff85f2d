#pragma once

#include "polq/core.hpp"
#include "polq/counting.hpp"

#include <array>

namespace polq {

/// Parameters of T = [[t1, 0], [t3 + i t4, t2]]; rho = T^dagger T / Tr(T^dagger T).
struct TParams {
  std::array<double, 4> t{};

  double& operator[](std::size_t i) { return t[i]; }
  double operator[](std::size_t i) const { return t[i]; }
};

struct TomographyResult {
  DensityMatrix rho;
  TParams t;
  double residual_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Raw inversion r_i = 2 N_i / (N0 + N1) - 1; not clamped to the unit ball.
PoincareVector linear_inversion(const CountRecord& c);

DensityMatrix rho_from_t(const TParams& t);

/// Starting point reproducing the linear-inversion state when it is physical.
TParams t_start_from_counts(const CountRecord& c);

/// Sum over settings of (N p_nu - N_nu)^2 / (2 N p_nu) with N = N0 + N1; the denominator
/// is floored at one count (2 * 0.5).
double likelihood(const CountRecord& c, const DensityMatrix& rho);
double likelihood(const CountRecord& c, const TParams& t);

struct MleOptions {
  double size_tolerance = 1e-10;
  int max_evaluations = 20000;
  double initial_step = 0.05;
};

TomographyResult mle_reconstruct(const CountRecord& c, const MleOptions& options = {});

} // namespace polq
