// include/sgpmix/mixture.hpp

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

#ifndef SGPMIX_MIXTURE_HPP_
#define SGPMIX_MIXTURE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sgpmix/data.hpp"
#include "sgpmix/sparse_gp.hpp"

namespace sgpmix {

/// Responsibilities below this floor are clamped (then renormalized) so the
/// per-point precision b = beta * <s> stays positive and the -P/2 log<s>
/// correction term stays finite.
inline constexpr double kResponsibilityFloor = 1e-8;

/// All free parameters of the mixture of sparse GP latent variable models:
/// shared latent points X and inducing inputs X_u, per-component kernel
/// hyperparameters, the noise precision beta, mixing proportions (softmax
/// parameterized) and the per-component latent Gaussian centers/diagonal
/// covariances (log domain).
struct ModelState {
  Matrix x;    // N x Q
  Matrix x_u;  // N' x Q
  KernelFamily family = KernelFamily::kRbf;
  std::vector<KernelParams> kernels;  // M entries
  double log_beta = 0.0;
  Vector log_pi;        // M logits
  Matrix means;         // M x Q
  Matrix log_cov_diag;  // M x Q

  Index n() const { return x.rows(); }
  Index n_inducing() const { return x_u.rows(); }
  Index q_dim() const { return x.cols(); }
  Index m_components() const { return static_cast<Index>(kernels.size()); }

  double beta() const { return std::exp(log_beta); }
  Vector mixing_proportions() const;  // softmax(log_pi)

  /// Flattened free-parameter vector: x, x_u, kernels[0..M), log_beta,
  /// log_pi, means, log_cov_diag. from_vector is the exact inverse.
  Index num_free_params() const;
  Vector to_vector() const;
  void from_vector(const Eigen::Ref<const Vector> &v);

  /// Named half-open coordinate ranges of the flattened vector, used for
  /// per-block gradient reporting.
  struct ParamBlock {
    std::string name;
    Index begin;
    Index end;
  };
  std::vector<ParamBlock> param_blocks() const;

  void validate() const;  // throws on non-finite entries / bad shapes
};

/// Row-stochastic posterior q(S): r(n,m) = <s_nm>.
struct Responsibilities {
  Matrix r;  // N x M
};

struct TracePoint {
  int iteration = 0;
  double kl_corrected = 0.0;
  std::optional<double> accuracy;
};

struct BoundReport {
  double kl_corrected = 0.0;
  std::optional<double> standard;
  double gaussian_term = 0.0;  // sum of weighted Gaussian log-marginals
  double c_term = 0.0;         // sum of the per-point correction terms
  std::vector<TracePoint> per_iteration_trace;
  // Objective values accepted by the optimizer inside each M-step (negated
  // bound, so non-increasing); recorded when FitOptions asks for it.
  std::vector<std::vector<double>> mstep_value_traces;
};

struct InitOptions {
  int isomap_k = 10;
  double fcm_fuzzifier = 2.0;
  int fcm_max_iters = 300;
  double fcm_tol = 1e-6;
};

struct FitOptions {
  int mstep_iters = 20;
  double mstep_lambda0 = 1e-4;
  double jitter_base = 1e-6;
  bool standardize = true;
  bool record_mstep_traces = false;
  InitOptions init;
};

/// Latent points from the geodesic embedding, inducing inputs sampled
/// uniformly from them, uniform mixing proportions, fuzzy-c-means cluster
/// centers, unit latent covariances, kernel defaults, and the noise
/// precision beta = (1 / (0.5 sqrt(mean(var(Y)))))^2.
ModelState init_model(const Dataset &data, int m_components, int q_dim,
                      Index n_prime, std::uint64_t seed, KernelFamily family,
                      const InitOptions &opts = {});

/// One posterior q(f) per component, each from the weights b = beta * r_:m.
std::vector<ComponentPosterior> estep_qf(const ModelState &state,
                                         const Responsibilities &resp,
                                         const Eigen::Ref<const Matrix> &y,
                                         double jitter_base = 1e-6);

/// q(S) update: log p_nm = log pi_m + log N(x_n | mean_m, C_m)
/// + sum_i <log N(y_ni | f_ni, beta^-1)>, normalized per row by
/// log-sum-exp, floored, renormalized.
Responsibilities estep_qs(const ModelState &state,
                          const std::vector<ComponentPosterior> &posteriors,
                          const Eigen::Ref<const Matrix> &y);

/// The per-point correction terms c_nm of the analytically integrated bound:
/// r log N(x_n|mean_m,C_m) + r log pi_m - r log r
/// + (P/2)((r-1) log(beta/2pi) - log r).
Matrix c_terms(const ModelState &state, const Responsibilities &resp, Index p);

/// The analytically integrated (KL-corrected) bound: for every component and
/// output dimension a weighted Gaussian log-marginal with covariance
/// Q_m + B_m^-1, plus the correction terms.
BoundReport kl_bound(const ModelState &state, const Responsibilities &resp,
                     const Eigen::Ref<const Matrix> &y,
                     double jitter_base = 1e-6);

/// The standard factorized variational bound at an explicit q(F). Evaluated
/// through the posterior's low-rank factors so it stays exact under the
/// rank-deficient prior. Equals kl_bound when q(F) is the exact posterior;
/// never exceeds it otherwise.
double standard_bound(const ModelState &state, const Responsibilities &resp,
                      const std::vector<ComponentPosterior> &posteriors,
                      const Eigen::Ref<const Matrix> &y,
                      double jitter_base = 1e-6);

/// Analytic gradient of kl_bound with respect to every free parameter, laid
/// out exactly like ModelState::to_vector. Responsibilities are held fixed.
Vector kl_bound_grads(const ModelState &state, const Responsibilities &resp,
                      const Eigen::Ref<const Matrix> &y,
                      double jitter_base = 1e-6);

/// Argmax cluster per row; ties break toward the lower component index.
std::vector<int> assign_clusters(const Responsibilities &resp);

struct FitResult {
  ModelState state;
  Responsibilities resp;
  BoundReport report;
};

/// Variational EM: alternate the q(F)/q(S) updates with a scaled-conjugate-
/// gradient maximization of the integrated bound over all parameters, for a
/// fixed number of outer iterations.
FitResult em_fit(const Dataset &data, int m_components, int q_dim,
                 Index n_prime, int n_iter, std::uint64_t seed,
                 KernelFamily family, const FitOptions &opts = {});

/// Same driver from an explicit starting point (y must already be prepared;
/// labels are used only for the accuracy column of the trace).
FitResult em_fit_from(ModelState state, Responsibilities r0,
                      const Eigen::Ref<const Matrix> &y,
                      const std::optional<std::vector<int>> &labels,
                      int n_iter, const FitOptions &opts = {});

}  // namespace sgpmix

#endif  // SGPMIX_MIXTURE_HPP_
