// tests/test_scg.cpp

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

#include <doctest.h>

#include <cmath>
#include <limits>

#include "sgpmix/scg.hpp"
#include "test_support.hpp"

using namespace sgpmix;
using namespace sgpmix::testing;

TEST_CASE("scg on the plain quadratic") {
  const ScgObjective f = [](const Vector &x) { return x.squaredNorm(); };
  const ScgGradient g = [](const Vector &x) -> Vector { return 2.0 * x; };
  Vector x0(2);
  x0 << 3.0, 4.0;
  ScgConfig cfg;
  cfg.max_iters = 200;
  cfg.grad_tol = 1e-10;
  const ScgResult res = scg_minimize(f, g, x0, cfg);
  CHECK(res.x_star.norm() < 1e-8);
  CHECK(res.f_star <= f(x0) + 1e-12);
  SUBCASE("trace is non-increasing") {
    for (std::size_t i = 1; i < res.f_trace.size(); ++i)
      CHECK(res.f_trace[i] <= res.f_trace[i - 1] + 1e-12);
  }
  SUBCASE("scaling the objective scales the value, not the argmin") {
    const double c = 37.5;
    const ScgObjective fc = [&](const Vector &x) { return c * f(x); };
    const ScgGradient gc = [&](const Vector &x) -> Vector { return c * g(x); };
    const ScgResult scaled = scg_minimize(fc, gc, x0, cfg);
    CHECK((scaled.x_star - res.x_star).norm() < 1e-6);
    CHECK(scaled.f_star == doctest::Approx(c * res.f_star).epsilon(1e-6));
  }
}

TEST_CASE("scg on rosenbrock") {
  const ScgObjective f = [](const Vector &x) {
    const double a = 1.0 - x(0);
    const double b = x(1) - x(0) * x(0);
    return a * a + 100.0 * b * b;
  };
  const ScgGradient g = [](const Vector &x) -> Vector {
    Vector out(2);
    const double b = x(1) - x(0) * x(0);
    out(0) = -2.0 * (1.0 - x(0)) - 400.0 * x(0) * b;
    out(1) = 200.0 * b;
    return out;
  };
  Vector x0(2);
  x0 << -1.2, 1.0;
  ScgConfig cfg;
  cfg.max_iters = 500;
  cfg.grad_tol = 1e-10;
  cfg.step_tol = 1e-14;
  const ScgResult res = scg_minimize(f, g, x0, cfg);
  CHECK(res.iterations_used <= 500);
  CHECK(std::abs(res.x_star(0) - 1.0) < 1e-4);
  CHECK(std::abs(res.x_star(1) - 1.0) < 1e-4);

  SUBCASE("no line search: bounded evaluations per iteration") {
    CHECK(res.f_evals <= 2 * res.iterations_used + 2);
    CHECK(res.g_evals <= 2 * res.iterations_used + 2);
  }
}

TEST_CASE("scg on a random SPD quadratic") {
  std::mt19937_64 rng(17);
  const Matrix a = random_spd(10, rng, 0.1);
  const ScgObjective f = [&](const Vector &x) { return x.dot(a * x); };
  const ScgGradient g = [&](const Vector &x) -> Vector { return 2.0 * a * x; };
  const Vector x0 = random_vector(10, rng);
  ScgConfig cfg;
  cfg.max_iters = 100;
  cfg.grad_tol = 1e-9;
  const ScgResult res = scg_minimize(f, g, x0, cfg);
  // the oracle solution of grad = 2 A x = 0 is x = 0 (A is SPD)
  const Vector oracle = a.llt().solve(Vector::Zero(10));
  CHECK((res.x_star - oracle).norm() < 1e-5);
  CHECK(g(res.x_star).norm() < 1e-6);
  CHECK(res.iterations_used <= 100);
}

TEST_CASE("scg handles non-finite trial values as rejected steps") {
  // objective blows up outside the unit ball; start inside
  const ScgObjective f = [](const Vector &x) {
    if (x.norm() > 1.0) return std::numeric_limits<double>::infinity();
    return x.squaredNorm() - 2.0 * x(0);
  };
  const ScgGradient g = [](const Vector &x) -> Vector {
    Vector out = 2.0 * x;
    out(0) -= 2.0;
    return out;
  };
  Vector x0(2);
  x0 << 0.1, 0.2;
  ScgConfig cfg;
  cfg.max_iters = 100;
  const ScgResult res = scg_minimize(f, g, x0, cfg);
  CHECK(std::isfinite(res.f_star));
  CHECK(res.f_star <= f(x0) + 1e-12);
  // constrained optimum sits on the boundary near (1, 0)
  CHECK(res.f_star < -0.9);
}

TEST_CASE("scg never returns a worse point than the start") {
  std::mt19937_64 rng(29);
  for (int rep = 0; rep < 10; ++rep) {
    const Vector x0 = random_vector(4, rng);
    const Matrix a = random_spd(4, rng, 0.01);
    const ScgObjective f = [&](const Vector &x) {
      return std::sin(x.sum()) + 0.1 * x.dot(a * x);
    };
    const ScgGradient g = [&](const Vector &x) -> Vector {
      return std::cos(x.sum()) * Vector::Ones(4) + 0.2 * (a * x);
    };
    ScgConfig cfg;
    cfg.max_iters = 50;
    const ScgResult res = scg_minimize(f, g, x0, cfg);
    CHECK(res.f_star <= f(x0) + 1e-12);
  }
}
