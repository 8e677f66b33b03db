#pragma once

#include <vector>

#include "fairspace/geometry.hpp"
#include "fairspace/measure.hpp"

namespace fairspace {

/// Point of the equal-measure-partition space: sites with the weight vector
/// that equalizes the target measure over the power cells.
struct EmpPoint {
  std::vector<Vec> sites;
  Vec lambdas;  // sum 0
  Vec masses;   // achieved single-membership masses at lambdas
};

struct EqualizeOptions {
  long max_iters = 100000;
  double eta0 = 0.0;  // 0 = auto (squared support diameter)
  Vec warm_lambdas;   // optional start, re-centered internally
};

struct EqualizeOutcome {
  EmpPoint emp;
  bool converged = false;
  long iterations = 0;
  double max_dev = 0.0;  // max_i |mass_i - 1/n| at the returned lambdas
  double tol_used = 0.0; // tol floored at 2 * max sample weight
};

/// Thrown when the ascent hits the iteration cap; carries the best state.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& msg, EqualizeOutcome best)
      : Error("non-convergence", msg), best_(std::move(best)) {}
  const EqualizeOutcome& best() const { return best_; }

 private:
  EqualizeOutcome best_;
};

/// masses of the power cells under single membership (argmin with ties to the
/// lower index), plus the concave dual value
/// Phi(lambda) = sum_p w_p * min_i(dist^2(p,x_i) - lambda_i) + mean(lambda)
struct MassEval {
  Vec masses;
  double dual = 0.0;
};
MassEval power_mass_eval(const Measure& mu, const std::vector<Vec>& sites, const Vec& lambdas);

/// supergradient ascent on the dual: lambda_i += eta*(1/n - mass_i), step
/// halved when the dual fails to improve, re-centered to sum 0 every step;
/// stops at max_i |mass_i - 1/n| <= max(tol, 2*max weight)
EqualizeOutcome try_equalize_weights(const Measure& mu, const std::vector<Vec>& sites,
                                     double tol, const EqualizeOptions& opts = {});

/// throwing variant: NonConvergenceError past the iteration cap
EmpPoint equalize_weights(const Measure& mu, const std::vector<Vec>& sites, double tol,
                          const EqualizeOptions& opts = {});

/// closed power cells of the point (masses under closed cells can exceed the
/// single-membership masses on shared boundaries)
Partition emp_partition(const EmpPoint& emp);

}  // namespace fairspace
