// src/sparse_gp.cpp

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

#include "sgpmix/sparse_gp.hpp"

#include <cmath>

namespace sgpmix {

namespace {

// Shared Woodbury pieces for covariance VV^T + B^-1:
//   A      = I + V^T B V                      (N' x N', SPD)
//   Cov^-1 = B - B V A^-1 V^T B
//   logdet(Cov) = logdet(A) - sum log b_n
struct Woodbury {
  Eigen::LLT<Matrix> llt_a;
  double logdet_a = 0.0;

  Woodbury(const DtcFactor &factor, const Vector &b) {
    const Matrix vs = b.cwiseSqrt().asDiagonal() * factor.v;
    Matrix a = vs.transpose() * vs;
    a.diagonal().array() += 1.0;
    llt_a.compute(a);
    if (llt_a.info() != Eigen::Success)
      throw NumericalError("weighted_log_marginal: inner system singular");
    logdet_a = 2.0 * llt_a.matrixLLT().diagonal().array().log().sum();
  }
};

void check_weights(const DtcFactor &factor, const WeightMatrix &b) {
  require(b.b_diag.size() == factor.n(),
          "weight vector length does not match factor");
  if (!(b.b_diag.array() > 0.0).all() || !b.b_diag.allFinite())
    throw NumericalError("weights must be strictly positive and finite");
}

}  // namespace

DtcFactor build_dtc(KernelFamily family, const KernelParams &params,
                    const Eigen::Ref<const Matrix> &x,
                    const Eigen::Ref<const Matrix> &x_u, double jitter_base) {
  require(x_u.rows() >= 1, "build_dtc: need at least one inducing point");
  require(x.cols() == x_u.cols(), "build_dtc: latent dimension mismatch");
  DtcFactor factor;
  const GramMatrix k_uu = gram(family, params, x_u, x_u, true);
  JitteredCholesky chol = add_jitter(k_uu, jitter_base);
  factor.jitter = chol.jitter;
  factor.chol_uu = chol.llt.matrixL();
  factor.k_fu = gram(family, params, x, x_u, false).values;
  // V = K_fu L^-T  <=>  V^T = L^-1 K_uf
  factor.v = factor.chol_uu.triangularView<Eigen::Lower>()
                 .solve(factor.k_fu.transpose())
                 .transpose();
  factor.q_diag = factor.v.rowwise().squaredNorm();
  return factor;
}

double weighted_log_marginal(const DtcFactor &factor, const WeightMatrix &b,
                             const Eigen::Ref<const Vector> &y) {
  require(y.size() == factor.n(), "observation length mismatch");
  check_weights(factor, b);
  const Woodbury w(factor, b.b_diag);
  const Vector by = b.b_diag.cwiseProduct(y);
  const Vector t = factor.v.transpose() * by;
  const Vector s = w.llt_a.solve(t);
  const double quad = y.dot(by) - t.dot(s);
  const double logdet_cov = w.logdet_a - b.b_diag.array().log().sum();
  const double n = static_cast<double>(factor.n());
  return -0.5 * (n * kLog2Pi + logdet_cov + quad);
}

LogMarginalGrads weighted_log_marginal_grads(const DtcFactor &factor,
                                             const WeightMatrix &b,
                                             const Eigen::Ref<const Vector> &y) {
  const BatchGaussian batch = weighted_log_marginal_batch(factor, b, y, true);
  return {batch.d_k_fu, batch.d_k_uu, batch.d_b_diag};
}

BatchGaussian weighted_log_marginal_batch(const DtcFactor &factor,
                                          const WeightMatrix &b,
                                          const Eigen::Ref<const Matrix> &y,
                                          bool with_grads) {
  require(y.rows() == factor.n(), "observation matrix row mismatch");
  check_weights(factor, b);
  const Index n = factor.n();
  const double p = static_cast<double>(y.cols());
  const Woodbury w(factor, b.b_diag);
  const Vector &bd = b.b_diag;

  // Per-column solves, shared factorization.
  const Matrix by = bd.asDiagonal() * y;                 // N  x P
  const Matrix t = factor.v.transpose() * by;            // N' x P
  const Matrix s = w.llt_a.solve(t);                     // N' x P
  const double quad = (y.cwiseProduct(by)).sum() - (t.cwiseProduct(s)).sum();
  const double logdet_cov = w.logdet_a - bd.array().log().sum();

  BatchGaussian out;
  out.log_marginal_sum =
      -0.5 * (p * (static_cast<double>(n) * kLog2Pi + logdet_cov) + quad);
  if (!with_grads) return out;

  // alpha_i = Cov^-1 y_i = B y_i - B V s_i
  const Matrix alpha = by - bd.asDiagonal() * (factor.v * s);  // N x P

  // R = K_fu K_uu^-1 = V L^-1  <=>  R^T = L^-T V^T
  const Matrix r = factor.chol_uu.transpose()
                       .triangularView<Eigen::Upper>()
                       .solve(factor.v.transpose())
                       .transpose();                       // N x N'

  // Cov^-1 R = B R - B V A^-1 (V^T B R)
  const Matrix br = bd.asDiagonal() * r;                   // N  x N'
  const Matrix w1 = factor.v.transpose() * br;             // N' x N'
  const Matrix w2 = w.llt_a.solve(w1);                     // N' x N'
  const Matrix cov_inv_r = br - bd.asDiagonal() * (factor.v * w2);

  // d/dK_fu of sum_i log N = (sum_i alpha_i alpha_i^T - P Cov^-1) R
  out.d_k_fu = alpha * (alpha.transpose() * r) - p * cov_inv_r;

  // d/dK_uu = -1/2 R^T (sum_i alpha_i alpha_i^T - P Cov^-1) R
  const Matrix ra = r.transpose() * alpha;                 // N' x P
  const Matrix rt_covinv_r = r.transpose() * br - w1.transpose() * w2;
  out.d_k_uu = -0.5 * (ra * ra.transpose() - p * rt_covinv_r);

  // d/db_n = -1/2 sum_i (alpha_in^2 - Cov^-1_nn) / b_n^2,
  // Cov^-1_nn = b_n - b_n^2 (V A^-1 V^T)_nn
  const Matrix h = w.llt_a.solve(factor.v.transpose());    // N' x N
  const Vector vav_diag =
      (factor.v.transpose().cwiseProduct(h)).colwise().sum().transpose();
  const Vector cov_inv_diag =
      bd.array() - bd.array().square() * vav_diag.array();
  out.d_b_diag = (-0.5) *
                 (alpha.rowwise().squaredNorm().array() -
                  p * cov_inv_diag.array()) /
                 bd.array().square();
  return out;
}

ComponentPosterior posterior_qf(const DtcFactor &factor, const WeightMatrix &b,
                                const Eigen::Ref<const Matrix> &y) {
  require(y.rows() == factor.n(), "observation matrix row mismatch");
  check_weights(factor, b);
  const Index n_u = factor.n_inducing();
  const Woodbury w(factor, b.b_diag);
  ComponentPosterior post;
  const Matrix by = b.b_diag.asDiagonal() * y;
  post.w_mean = w.llt_a.solve(factor.v.transpose() * by);
  post.f_mean = factor.v * post.w_mean;
  post.w_cov = w.llt_a.solve(Matrix::Identity(n_u, n_u));
  const Matrix h = w.llt_a.solve(factor.v.transpose());
  post.sigma_diag =
      (factor.v.transpose().cwiseProduct(h)).colwise().sum().transpose();
  post.sigma_diag = post.sigma_diag.cwiseMax(0.0);
  return post;
}

Matrix expected_pointwise_loglik(const ComponentPosterior &post,
                                 const Eigen::Ref<const Matrix> &y,
                                 double beta) {
  require(beta > 0.0, "expected_pointwise_loglik: beta must be positive");
  require(y.rows() == post.f_mean.rows() && y.cols() == post.f_mean.cols(),
          "expected_pointwise_loglik: shape mismatch");
  const double c = 0.5 * (std::log(beta) - kLog2Pi);
  Matrix out = (y - post.f_mean).array().square().matrix();
  out.colwise() += post.sigma_diag;
  out = (c - 0.5 * beta * out.array()).matrix();
  return out;
}

}  // namespace sgpmix
