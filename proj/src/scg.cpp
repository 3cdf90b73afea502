// src/scg.cpp

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

#include "sgpmix/scg.hpp"

#include <cmath>
#include <limits>

namespace sgpmix {

namespace {
constexpr double kLambdaMin = 1e-15;
constexpr double kLambdaMax = 1e15;
constexpr double kSigma0 = 1e-4;
}  // namespace

ScgResult scg_minimize(const ScgObjective &f, const ScgGradient &g,
                       const Vector &x0, const ScgConfig &cfg) {
  require(cfg.max_iters >= 1 && cfg.grad_tol > 0.0 && cfg.step_tol > 0.0,
          "scg_minimize: invalid configuration");
  ScgResult res;
  res.x_star = x0;
  res.f_star = f(x0);
  res.f_evals = 1;
  Vector grad = g(x0);
  res.g_evals = 1;
  require(std::isfinite(res.f_star) && grad.allFinite(),
          "scg_minimize: objective or gradient not finite at start");
  res.f_trace.push_back(res.f_star);

  const Index dim = x0.size();
  Vector x = x0;
  double f_now = res.f_star;
  Vector d = -grad;
  double lambda = cfg.initial_lambda;
  bool success = true;
  int n_success = 0;
  double theta = 0.0, mu = 0.0, kappa = 0.0, sigma = 0.0;

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    res.iterations_used = iter;
    if (grad.lpNorm<Eigen::Infinity>() <= cfg.grad_tol) {
      res.converged_by = ScgStop::kGradTol;
      res.iterations_used = iter - 1;
      break;
    }
    if (success) {
      mu = d.dot(grad);
      if (mu >= 0.0) {  // direction lost descent; restart on the gradient
        d = -grad;
        mu = d.dot(grad);
      }
      kappa = d.squaredNorm();
      if (kappa < std::numeric_limits<double>::epsilon()) {
        // conjugate direction collapsed; fall back to steepest descent and
        // only stop if the gradient itself is negligible
        d = -grad;
        mu = d.dot(grad);
        kappa = d.squaredNorm();
        if (kappa < std::numeric_limits<double>::epsilon()) {
          res.converged_by = ScgStop::kGradTol;
          res.iterations_used = iter - 1;
          break;
        }
      }
      sigma = kSigma0 / std::sqrt(kappa);
      const Vector g_probe = g(x + sigma * d);
      ++res.g_evals;
      if (!g_probe.allFinite()) {
        res.converged_by = ScgStop::kStepTol;
        break;
      }
      theta = d.dot(g_probe - grad) / sigma;
    }

    // Regularized curvature along d; a non-positive value means the local
    // quadratic model is not convex yet and lambda must absorb it.
    double delta = theta + lambda * kappa;
    if (delta <= 0.0) {
      delta = lambda * kappa;
      lambda = lambda - theta / kappa;
    }
    const double alpha = -mu / delta;

    const Vector x_new = x + alpha * d;
    const double f_new = f(x_new);
    ++res.f_evals;
    // Comparison ratio between actual and predicted decrease.
    const double ratio =
        std::isfinite(f_new) ? 2.0 * (f_new - f_now) / (alpha * mu) : -1.0;

    if (ratio >= 0.0) {
      // Accepted step.
      const double step = (alpha * d).lpNorm<Eigen::Infinity>();
      x = x_new;
      f_now = f_new;
      res.f_trace.push_back(f_now);
      Vector grad_new = g(x);
      ++res.g_evals;
      if (!grad_new.allFinite()) {
        res.x_star = x;
        res.f_star = f_now;
        res.converged_by = ScgStop::kStepTol;
        return res;
      }
      success = true;
      ++n_success;
      if (ratio < 0.25) lambda = std::min(4.0 * lambda, kLambdaMax);
      if (ratio > 0.75) lambda = std::max(0.5 * lambda, kLambdaMin);
      if (n_success == static_cast<int>(dim)) {
        d = -grad_new;  // periodic restart
        n_success = 0;
      } else {
        const double gamma = (grad - grad_new).dot(grad_new) / mu;
        d = gamma * d - grad_new;
      }
      grad = grad_new;
      if (step <= cfg.step_tol) {
        res.converged_by = ScgStop::kStepTol;
        break;
      }
    } else {
      success = false;
      lambda = std::min(4.0 * lambda, kLambdaMax);
      if (lambda >= kLambdaMax) {
        res.converged_by = ScgStop::kStepTol;
        break;
      }
    }
  }

  res.x_star = x;
  res.f_star = f_now;
  return res;
}

}  // namespace sgpmix
