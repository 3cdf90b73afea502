// src/fcm.cpp

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

#include "sgpmix/fcm.hpp"

#include <cmath>

#include "sgpmix/data.hpp"

namespace sgpmix {

namespace {

Matrix squared_distances(const Eigen::Ref<const Matrix> &x,
                         const Matrix &centers) {
  const Vector x2 = x.rowwise().squaredNorm();
  const Vector c2 = centers.rowwise().squaredNorm();
  Matrix d2 = (-2.0 * (x * centers.transpose())).colwise() + x2;
  d2.rowwise() += c2.transpose();
  return d2.array().max(0.0).matrix();
}

// u_nm = 1 / sum_k (d_nm^2 / d_nk^2)^(1/(fuzz-1)); exact-hit points get
// their membership split over coinciding centers.
Matrix update_memberships(const Matrix &d2, double fuzzifier) {
  const double expo = 1.0 / (fuzzifier - 1.0);
  const Index n = d2.rows(), m = d2.cols();
  Matrix u(n, m);
  for (Index i = 0; i < n; ++i) {
    Index zeros = 0;
    for (Index j = 0; j < m; ++j)
      if (d2(i, j) <= 0.0) ++zeros;
    if (zeros > 0) {
      for (Index j = 0; j < m; ++j)
        u(i, j) = d2(i, j) <= 0.0 ? 1.0 / static_cast<double>(zeros) : 0.0;
      continue;
    }
    double denom = 0.0;
    for (Index j = 0; j < m; ++j) {
      u(i, j) = std::pow(1.0 / d2(i, j), expo);
      denom += u(i, j);
    }
    u.row(i) /= denom;
  }
  return u;
}

}  // namespace

FcmResult fcm_cluster(const Eigen::Ref<const Matrix> &x, int m_clusters,
                      double fuzzifier, int max_iters, double tol,
                      std::uint64_t seed) {
  require(fuzzifier > 1.0, "fcm_cluster: fuzzifier must exceed 1");
  require(m_clusters >= 1 && m_clusters <= x.rows(),
          "fcm_cluster: cluster count out of [1, N]");
  require(max_iters >= 1 && tol > 0.0, "fcm_cluster: invalid iteration limits");

  FcmResult res;
  res.centers = select_inducing(x, m_clusters, seed);
  Matrix d2 = squared_distances(x, res.centers);
  res.memberships = update_memberships(d2, fuzzifier);

  for (int it = 0; it < max_iters; ++it) {
    const Matrix uf = res.memberships.array().pow(fuzzifier).matrix();
    res.objective_trace.push_back(uf.cwiseProduct(d2).sum());

    Matrix new_centers(m_clusters, x.cols());
    for (Index j = 0; j < m_clusters; ++j) {
      const double mass = uf.col(j).sum();
      if (mass > 0.0)
        new_centers.row(j) = (uf.col(j).transpose() * x) / mass;
      else
        new_centers.row(j) = res.centers.row(j);
    }
    const double shift =
        (new_centers - res.centers).rowwise().norm().maxCoeff();
    res.centers = new_centers;
    d2 = squared_distances(x, res.centers);
    res.memberships = update_memberships(d2, fuzzifier);
    if (shift < tol) break;
  }
  const Matrix uf = res.memberships.array().pow(fuzzifier).matrix();
  res.objective_trace.push_back(uf.cwiseProduct(d2).sum());
  return res;
}

}  // namespace sgpmix
