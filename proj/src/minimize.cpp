#include "polq/minimize.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace polq {

namespace {

struct Objective {
  const std::function<double(const Eigen::VectorXd&)>* f = nullptr;
  Eigen::VectorXd scratch;
  int evaluations = 0;
  Eigen::VectorXd best_x;
  double best_value = std::numeric_limits<double>::infinity();
};

double trampoline(const gsl_vector* v, void* params) {
  auto* obj = static_cast<Objective*>(params);
  for (Eigen::Index i = 0; i < obj->scratch.size(); ++i) {
    obj->scratch(i) = gsl_vector_get(v, static_cast<size_t>(i));
  }
  ++obj->evaluations;
  double value = (*obj->f)(obj->scratch);
  if (!std::isfinite(value)) {
    // GSL rejects NaN/inf; a huge finite value keeps the simplex moving away.
    value = std::numeric_limits<double>::max() / 4.0;
  } else if (value < obj->best_value) {
    obj->best_value = value;
    obj->best_x = obj->scratch;
  }
  return value;
}

struct MinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};
struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};

} // namespace

SimplexResult minimize_simplex(const std::function<double(const Eigen::VectorXd&)>& f,
                               const Eigen::VectorXd& x0, const SimplexOptions& options) {
  const auto n = static_cast<size_t>(x0.size());
  if (n == 0) {
    throw std::invalid_argument("minimize_simplex: empty parameter vector");
  }
  // Library errors are reported through return codes, not the abort handler.
  static const gsl_error_handler_t* previous = gsl_set_error_handler_off();
  (void)previous;

  Objective obj;
  obj.f = &f;
  obj.scratch = Eigen::VectorXd(x0.size());
  obj.best_x = x0;

  std::unique_ptr<gsl_vector, VectorDeleter> start(gsl_vector_alloc(n));
  std::unique_ptr<gsl_vector, VectorDeleter> steps(gsl_vector_alloc(n));
  for (size_t i = 0; i < n; ++i) {
    gsl_vector_set(start.get(), i, x0(static_cast<Eigen::Index>(i)));
    gsl_vector_set(steps.get(), i, options.initial_step);
  }

  gsl_multimin_function fn;
  fn.n = n;
  fn.f = &trampoline;
  fn.params = &obj;

  std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> m(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n));
  SimplexResult result;
  if (gsl_multimin_fminimizer_set(m.get(), &fn, start.get(), steps.get()) != GSL_SUCCESS) {
    result.x = obj.best_x;
    result.value = obj.best_value;
    result.evaluations = obj.evaluations;
    return result;
  }

  while (obj.evaluations < options.max_evaluations) {
    ++result.iterations;
    if (gsl_multimin_fminimizer_iterate(m.get()) != GSL_SUCCESS) {
      break;
    }
    const double size = gsl_multimin_fminimizer_size(m.get());
    if (gsl_multimin_test_size(size, options.size_tolerance) == GSL_SUCCESS) {
      result.converged = true;
      break;
    }
  }

  result.x = obj.best_x;
  result.value = obj.best_value;
  result.evaluations = obj.evaluations;
  return result;
}

} // namespace polq
