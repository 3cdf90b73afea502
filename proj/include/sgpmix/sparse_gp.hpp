// include/sgpmix/sparse_gp.hpp

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

#ifndef SGPMIX_SPARSE_GP_HPP_
#define SGPMIX_SPARSE_GP_HPP_

#include "sgpmix/kernel.hpp"

namespace sgpmix {

/// Low-rank factor of the deterministic-training-conditional (DTC) prior.
/// The effective prior covariance over the latent function values is the
/// Nystrom operator Q = K_fu K_uu^-1 K_uf = V V^T with V = K_fu L^-T,
/// K_uu = L L^T. Inducing outputs never appear explicitly: they are
/// integrated out analytically and live only inside this factor.
struct DtcFactor {
  Matrix chol_uu;  // L, lower triangular, N' x N' (jittered K_uu = L L^T)
  Matrix k_fu;     // N x N' cross covariance (white-free)
  Matrix v;        // N x N', V = k_fu * L^-T, so Q = V V^T
  Vector q_diag;   // diag(Q), squared row norms of v
  double jitter = 0.0;

  Index n() const { return k_fu.rows(); }
  Index n_inducing() const { return k_fu.cols(); }
};

/// K_uu gets the white-noise term on its diagonal plus jitter; K_fu does not.
DtcFactor build_dtc(KernelFamily family, const KernelParams &params,
                    const Eigen::Ref<const Matrix> &x,
                    const Eigen::Ref<const Matrix> &x_u, double jitter_base);

/// Diagonal likelihood-precision matrix B with entries b_nn = beta * <s_nm>.
struct WeightMatrix {
  Vector b_diag;
};

/// log N(y | 0, V V^T + B^-1), evaluated through the Woodbury identity and
/// the matrix determinant lemma in O(N N'^2); no N x N matrix is formed.
double weighted_log_marginal(const DtcFactor &factor, const WeightMatrix &b,
                             const Eigen::Ref<const Vector> &y);

struct LogMarginalGrads {
  Matrix d_k_fu;   // N x N'
  Matrix d_k_uu;   // N' x N' (symmetric)
  Vector d_b_diag; // N
};

/// Exact analytic gradients of weighted_log_marginal with respect to the
/// kernel matrix entries and the weights. Callers chain these through the
/// kernel derivatives and through b = beta * <s>.
LogMarginalGrads weighted_log_marginal_grads(const DtcFactor &factor,
                                             const WeightMatrix &b,
                                             const Eigen::Ref<const Vector> &y);

/// Same quantities batched over the P output dimensions (columns of Y),
/// sharing the O(N N'^2) Woodbury work across columns. log_marginal_sum is
/// the sum over columns; gradients are likewise summed.
struct BatchGaussian {
  double log_marginal_sum = 0.0;
  Matrix d_k_fu;
  Matrix d_k_uu;
  Vector d_b_diag;
};
BatchGaussian weighted_log_marginal_batch(const DtcFactor &factor,
                                          const WeightMatrix &b,
                                          const Eigen::Ref<const Matrix> &y,
                                          bool with_grads);

/// The per-component variational posterior over function values:
/// q(f_:i) = N(f_mean_:i, Sigma) with one covariance shared across output
/// dimensions. Sigma is computed in the stable low-rank form
/// Sigma = V A^-1 V^T, A = I + V^T B V, which agrees with
/// (Q^-1 + B)^-1 whenever Q is invertible and stays defined when it is not.
/// Only the diagonal of Sigma is materialized in f-space; the subspace
/// factors (w_mean, w_cov) are kept so the full posterior can be
/// reconstructed exactly where needed.
struct ComponentPosterior {
  Matrix f_mean;     // N x P, f_mean = V * w_mean
  Vector sigma_diag; // N, sigma_diag_n = v_n^T w_cov v_n
  Matrix w_mean;     // N' x P   (cached low-rank factor)
  Matrix w_cov;      // N' x N'  (cached low-rank factor, = A^-1)
};

ComponentPosterior posterior_qf(const DtcFactor &factor, const WeightMatrix &b,
                                const Eigen::Ref<const Matrix> &y);

/// <log N(y_ni | f_ni, beta^-1)> under the posterior:
/// 0.5 log(beta/2pi) - beta/2 ((y - f_mean)^2 + sigma_nn), entrywise.
Matrix expected_pointwise_loglik(const ComponentPosterior &post,
                                 const Eigen::Ref<const Matrix> &y,
                                 double beta);

}  // namespace sgpmix

#endif  // SGPMIX_SPARSE_GP_HPP_
