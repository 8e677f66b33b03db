#pragma once

#include <functional>

#include "fairspace/common.hpp"

namespace fairspace {

struct NelderMeadOptions {
  int max_evals = 400;
  double init_step = 0.15;
  double f_tol = 1e-10;   // spread of simplex values
  double x_tol = 1e-10;   // simplex diameter
};

struct NelderMeadResult {
  Vec x;
  double f = 0.0;
  int evals = 0;
};

/// Derivative-free downhill simplex minimization (reflection 1, expansion 2,
/// contraction 0.5, shrink 0.5). Deterministic; a zero-dimensional start just
/// evaluates once.
NelderMeadResult nelder_mead(const std::function<double(const Vec&)>& f, const Vec& x0,
                             const NelderMeadOptions& opt = {});

}  // namespace fairspace
