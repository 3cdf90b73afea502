// include/sgpmix/scg.hpp

// Copyright 2026  The sgpmix authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef SGPMIX_SCG_HPP_
#define SGPMIX_SCG_HPP_

#include <functional>
#include <vector>

#include "sgpmix/common.hpp"

namespace sgpmix {

struct ScgConfig {
  int max_iters = 200;
  double grad_tol = 1e-6;        // infinity norm of the gradient
  double step_tol = 1e-12;       // infinity norm of the accepted step
  double initial_lambda = 1e-6;  // scaling / trust parameter
};

enum class ScgStop { kGradTol, kStepTol, kMaxIters };

struct ScgResult {
  Vector x_star;
  double f_star = 0.0;
  int iterations_used = 0;
  ScgStop converged_by = ScgStop::kMaxIters;
  std::vector<double> f_trace;  // accepted objective values, non-increasing
  int f_evals = 0;
  int g_evals = 0;
};

using ScgObjective = std::function<double(const Vector &)>;
using ScgGradient = std::function<Vector(const Vector &)>;

/// Scaled conjugate gradients (Moller's comparison-parameter scheme, in the
/// form popularized by netlab's scg). Minimizes f without any line search:
/// curvature along the search direction comes from one extra gradient probe
/// per successful iteration, and the scale parameter lambda plays the role
/// of a trust region. Rejected steps only inflate lambda. The iterate
/// sequence of accepted values is non-increasing and the routine never
/// returns a point worse than x0.
///
/// A non-finite trial value is treated as a rejected step; a non-finite
/// gradient stops the search at the last finite iterate.
ScgResult scg_minimize(const ScgObjective &f, const ScgGradient &g,
                       const Vector &x0, const ScgConfig &cfg);

}  // namespace sgpmix

#endif  // SGPMIX_SCG_HPP_
