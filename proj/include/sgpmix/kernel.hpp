// include/sgpmix/kernel.hpp

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

#ifndef SGPMIX_KERNEL_HPP_
#define SGPMIX_KERNEL_HPP_

#include <Eigen/Cholesky>
#include <string>
#include <vector>

#include "sgpmix/common.hpp"

namespace sgpmix {

enum class KernelFamily { kLinear, kRbf };

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string &name);

/// Covariance-function hyperparameters, stored in log domain so that the
/// realized values stay strictly positive under unconstrained optimization.
///
/// Linear family:  k(z,z') = lin * z.z' + bias [+ white if same index]
/// RBF family:     k(z,z') = rbf * exp(-gamma/2 * |z-z'|^2) + bias [+ white]
///
/// The white term contributes to diagonal entries of same-set Gram matrices
/// only; a constant off-diagonal white term would break positive
/// semi-definiteness.
struct KernelParams {
  double log_lin = 0.0;    // Linear only
  double log_rbf = 0.0;    // RBF only
  double log_gamma = 0.0;  // RBF only
  double log_bias = 0.0;
  double log_white = 0.0;

  double lin() const { return std::exp(log_lin); }
  double rbf() const { return std::exp(log_rbf); }
  double gamma() const { return std::exp(log_gamma); }
  double bias() const { return std::exp(log_bias); }
  double white() const { return std::exp(log_white); }

  /// Standard starting point: lin = rbf = gamma = 1, bias = white = e^-2.
  static KernelParams defaults();
};

/// Number of free (log-domain) parameters for the family: Linear uses
/// {log_lin, log_bias, log_white}, RBF {log_rbf, log_gamma, log_bias,
/// log_white}.
int active_param_count(KernelFamily family);

/// Names in pack order, for diagnostics.
std::vector<std::string> active_param_names(KernelFamily family);

/// Flatten / restore the active parameters in the order given by
/// active_param_names. Inactive fields are left untouched by unpack.
void pack_params(KernelFamily family, const KernelParams &params, double *out);
void unpack_params(KernelFamily family, const double *in, KernelParams *params);

/// Dense symmetric covariance matrix together with the flag saying whether
/// rows and columns index the same point set (in which case the diagonal
/// carries the white-noise term).
struct GramMatrix {
  Matrix values;
  bool rows_same_as_cols = false;
};

double kernel_eval(KernelFamily family, const KernelParams &params,
                   const Eigen::Ref<const Vector> &z,
                   const Eigen::Ref<const Vector> &z_prime, bool same_index);

/// Entry (i,j) = k(A_i, B_j), with the white term on the diagonal when
/// same_set is true.
GramMatrix gram(KernelFamily family, const KernelParams &params,
                const Eigen::Ref<const Matrix> &a,
                const Eigen::Ref<const Matrix> &b, bool same_set);

/// dK/d(log theta) for every active parameter, in pack order. The chain rule
/// through the log parameterization is already applied:
/// dK/dlog theta = theta * dK/dtheta.
std::vector<Matrix> kernel_grad_params(KernelFamily family,
                                       const KernelParams &params,
                                       const Eigen::Ref<const Matrix> &a,
                                       const Eigen::Ref<const Matrix> &b,
                                       bool same_set);

/// Analytic derivatives of Gram entries with respect to the input locations.
/// d_rows[q](i,j) = dK_ij / dA_iq and d_cols[q](i,j) = dK_ij / dB_jq.
struct InputGrads {
  std::vector<Matrix> d_rows;
  std::vector<Matrix> d_cols;
};
InputGrads kernel_grad_inputs(KernelFamily family, const KernelParams &params,
                              const Eigen::Ref<const Matrix> &a,
                              const Eigen::Ref<const Matrix> &b, bool same_set);

/// Contractions of the input derivatives against an upstream gradient
/// G = dL/dK, avoiding the full tensor. chain_grad_rows returns dL/dA (n x Q),
/// chain_grad_cols dL/dB (n' x Q). These are what the optimizer actually uses.
Matrix chain_grad_rows(KernelFamily family, const KernelParams &params,
                       const Eigen::Ref<const Matrix> &a,
                       const Eigen::Ref<const Matrix> &b,
                       const Eigen::Ref<const Matrix> &upstream);
Matrix chain_grad_cols(KernelFamily family, const KernelParams &params,
                       const Eigen::Ref<const Matrix> &a,
                       const Eigen::Ref<const Matrix> &b,
                       const Eigen::Ref<const Matrix> &upstream);

/// K + j*I with j starting at base * mean(diag K) and doubling until the
/// Cholesky factorization succeeds (at most 10 doublings). Throws
/// NumericalError if the matrix stays non-positive-definite.
struct JitteredCholesky {
  Matrix matrix;           // K + jitter*I
  double jitter = 0.0;     // the j that was applied
  Eigen::LLT<Matrix> llt;  // factorization of matrix
};
JitteredCholesky add_jitter(const GramMatrix &k, double base);

}  // namespace sgpmix

#endif  // SGPMIX_KERNEL_HPP_
