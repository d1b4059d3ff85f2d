#pragma once

#include <Eigen/Dense>
#include <functional>

namespace polq {

struct SimplexOptions {
  double initial_step = 0.05;
  /// Stop once the GSL simplex characteristic size falls below this.
  double size_tolerance = 1e-10;
  int max_evaluations = 20000;
};

struct SimplexResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
  int iterations = 0;
  bool converged = false;
};

/// Derivative-free Nelder-Mead minimization (GSL nmsimplex2). The returned value never
/// exceeds f(x0); non-finite objective values are treated as +infinity.
SimplexResult minimize_simplex(const std::function<double(const Eigen::VectorXd&)>& f,
                               const Eigen::VectorXd& x0, const SimplexOptions& options = {});

} // namespace polq
