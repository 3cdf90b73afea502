// src/mixture.cpp

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

#include "sgpmix/mixture.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>

#include "sgpmix/fcm.hpp"
#include "sgpmix/manifold.hpp"
#include "sgpmix/metrics.hpp"
#include "sgpmix/scg.hpp"

namespace sgpmix {

// ---------------------------------------------------------------------------
// ModelState
// ---------------------------------------------------------------------------

Vector ModelState::mixing_proportions() const {
  const double mx = log_pi.maxCoeff();
  Vector p = (log_pi.array() - mx).exp();
  return p / p.sum();
}

Index ModelState::num_free_params() const {
  const Index m = m_components();
  const Index q = q_dim();
  return n() * q + n_inducing() * q +
         m * static_cast<Index>(active_param_count(family)) + 1 + m + m * q +
         m * q;
}

Vector ModelState::to_vector() const {
  Vector v(num_free_params());
  Index at = 0;
  const Index q = q_dim(), m = m_components();
  for (Index i = 0; i < n(); ++i)
    for (Index d = 0; d < q; ++d) v(at++) = x(i, d);
  for (Index i = 0; i < n_inducing(); ++i)
    for (Index d = 0; d < q; ++d) v(at++) = x_u(i, d);
  const int kp = active_param_count(family);
  for (Index c = 0; c < m; ++c) {
    pack_params(family, kernels[static_cast<size_t>(c)], v.data() + at);
    at += kp;
  }
  v(at++) = log_beta;
  for (Index c = 0; c < m; ++c) v(at++) = log_pi(c);
  for (Index c = 0; c < m; ++c)
    for (Index d = 0; d < q; ++d) v(at++) = means(c, d);
  for (Index c = 0; c < m; ++c)
    for (Index d = 0; d < q; ++d) v(at++) = log_cov_diag(c, d);
  return v;
}

void ModelState::from_vector(const Eigen::Ref<const Vector> &v) {
  require(v.size() == num_free_params(),
          "ModelState::from_vector: wrong length");
  Index at = 0;
  const Index q = q_dim(), m = m_components();
  for (Index i = 0; i < n(); ++i)
    for (Index d = 0; d < q; ++d) x(i, d) = v(at++);
  for (Index i = 0; i < n_inducing(); ++i)
    for (Index d = 0; d < q; ++d) x_u(i, d) = v(at++);
  const int kp = active_param_count(family);
  for (Index c = 0; c < m; ++c) {
    unpack_params(family, v.data() + at, &kernels[static_cast<size_t>(c)]);
    at += kp;
  }
  log_beta = v(at++);
  for (Index c = 0; c < m; ++c) log_pi(c) = v(at++);
  for (Index c = 0; c < m; ++c)
    for (Index d = 0; d < q; ++d) means(c, d) = v(at++);
  for (Index c = 0; c < m; ++c)
    for (Index d = 0; d < q; ++d) log_cov_diag(c, d) = v(at++);
}

std::vector<ModelState::ParamBlock> ModelState::param_blocks() const {
  std::vector<ParamBlock> blocks;
  const Index q = q_dim(), m = m_components();
  Index at = 0;
  auto push = [&](const std::string &name, Index count) {
    blocks.push_back({name, at, at + count});
    at += count;
  };
  push("x", n() * q);
  push("x_u", n_inducing() * q);
  for (Index c = 0; c < m; ++c)
    push("kernel[" + std::to_string(c) + "]",
         static_cast<Index>(active_param_count(family)));
  push("log_beta", 1);
  push("log_pi", m);
  push("means", m * q);
  push("log_cov_diag", m * q);
  return blocks;
}

void ModelState::validate() const {
  require(x.rows() >= 1 && x.cols() >= 1, "ModelState: empty latent matrix");
  require(x_u.rows() >= 1 && x_u.cols() == x.cols(),
          "ModelState: inducing inputs inconsistent with latents");
  const Index m = m_components();
  require(m >= 1, "ModelState: no components");
  require(log_pi.size() == m && means.rows() == m && log_cov_diag.rows() == m,
          "ModelState: per-component shapes inconsistent");
  require(means.cols() == x.cols() && log_cov_diag.cols() == x.cols(),
          "ModelState: center dimensionality inconsistent");
  const bool finite = x.allFinite() && x_u.allFinite() &&
                      std::isfinite(log_beta) && log_pi.allFinite() &&
                      means.allFinite() && log_cov_diag.allFinite();
  if (!finite) throw NumericalError("ModelState: non-finite parameter");
}

// ---------------------------------------------------------------------------
// helpers
// ---------------------------------------------------------------------------

namespace {

Matrix floor_responsibilities(Matrix r) {
  r = r.cwiseMax(kResponsibilityFloor);
  const Vector sums = r.rowwise().sum();
  return sums.cwiseInverse().asDiagonal() * r;
}

void check_responsibilities(const ModelState &state, const Matrix &r) {
  require(r.rows() == state.n() && r.cols() == state.m_components(),
          "responsibilities shape mismatch");
  require((r.array() > 0.0).all(), "responsibilities must be floored positive");
}

// r * log N(x_n | mean_m, C_m) + r * log pi_m - r * log r, per (n, m).
// These are the pieces of c_nm shared with the standard bound.
Matrix mixture_prior_terms(const ModelState &state, const Matrix &r) {
  const Index n = state.n(), m = state.m_components(), q = state.q_dim();
  Matrix out(n, m);
  const double mx = state.log_pi.maxCoeff();
  const double lse =
      mx + std::log((state.log_pi.array() - mx).exp().sum());
  for (Index c = 0; c < m; ++c) {
    const double lpi = state.log_pi(c) - lse;
    const Eigen::ArrayXd cinv =
        (-state.log_cov_diag.row(c).transpose().array()).exp();
    const double logdet = state.log_cov_diag.row(c).sum();
    Matrix diff = state.x.rowwise() - state.means.row(c);
    const Vector quad =
        (diff.array().square().rowwise() * cinv.transpose()).rowwise().sum();
    const Vector log_gauss =
        (-0.5 *
         (static_cast<double>(q) * kLog2Pi + logdet + quad.array()))
            .matrix();
    out.col(c) = r.col(c).cwiseProduct(
                     log_gauss + Vector::Constant(n, lpi)) -
                 r.col(c).cwiseProduct(r.col(c).array().log().matrix());
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// initialization
// ---------------------------------------------------------------------------

ModelState init_model(const Dataset &data, int m_components, int q_dim,
                      Index n_prime, std::uint64_t seed, KernelFamily family,
                      const InitOptions &opts) {
  const Index n = data.n(), p = data.p();
  require(m_components >= 1, "init_model: need at least one component");
  require(q_dim >= 1 && q_dim <= p, "init_model: q out of [1, P]");
  require(n_prime >= 1 && n_prime <= n, "init_model: n_prime out of [1, N]");

  // beta from the average per-column variance
  const Matrix centered = data.y.rowwise() - data.y.colwise().mean();
  const double mean_var =
      centered.array().square().sum() / static_cast<double>((n - 1) * p);
  require(mean_var > 0.0, "init_model: data has zero variance everywhere");
  const double beta = std::pow(1.0 / (0.5 * std::sqrt(mean_var)), 2.0);

  ModelState state;
  state.family = family;
  state.x = isomap_embed(data.y, opts.isomap_k, q_dim, seed);
  state.x_u = select_inducing(state.x, n_prime, seed);
  state.kernels.assign(static_cast<size_t>(m_components),
                       KernelParams::defaults());
  state.log_beta = std::log(beta);
  state.log_pi = Vector::Zero(m_components);  // softmax -> 1/M each
  state.means = fcm_cluster(state.x, m_components, opts.fcm_fuzzifier,
                            opts.fcm_max_iters, opts.fcm_tol, seed + 1)
                    .centers;
  state.log_cov_diag = Matrix::Zero(m_components, q_dim);
  state.validate();
  return state;
}

// ---------------------------------------------------------------------------
// E-step
// ---------------------------------------------------------------------------

std::vector<ComponentPosterior> estep_qf(const ModelState &state,
                                         const Responsibilities &resp,
                                         const Eigen::Ref<const Matrix> &y,
                                         double jitter_base) {
  state.validate();
  check_responsibilities(state, resp.r);
  require(y.rows() == state.n(), "estep_qf: observation rows mismatch");
  const double beta = state.beta();
  std::vector<ComponentPosterior> posteriors;
  posteriors.reserve(static_cast<size_t>(state.m_components()));
  for (Index m = 0; m < state.m_components(); ++m) {
    const DtcFactor factor =
        build_dtc(state.family, state.kernels[static_cast<size_t>(m)],
                  state.x, state.x_u, jitter_base);
    const WeightMatrix b{beta * resp.r.col(m)};
    posteriors.push_back(posterior_qf(factor, b, y));
  }
  return posteriors;
}

Responsibilities estep_qs(const ModelState &state,
                          const std::vector<ComponentPosterior> &posteriors,
                          const Eigen::Ref<const Matrix> &y) {
  state.validate();
  const Index n = state.n(), m = state.m_components(), q = state.q_dim();
  require(static_cast<Index>(posteriors.size()) == m,
          "estep_qs: posterior count mismatch");
  const double beta = state.beta();
  const double mx = state.log_pi.maxCoeff();
  const double lse = mx + std::log((state.log_pi.array() - mx).exp().sum());

  Matrix logp(n, m);
  for (Index c = 0; c < m; ++c) {
    const double lpi = state.log_pi(c) - lse;
    const Eigen::ArrayXd cinv =
        (-state.log_cov_diag.row(c).transpose().array()).exp();
    const double logdet = state.log_cov_diag.row(c).sum();
    Matrix diff = state.x.rowwise() - state.means.row(c);
    const Vector quad =
        (diff.array().square().rowwise() * cinv.transpose()).rowwise().sum();
    const Vector expected_ll =
        expected_pointwise_loglik(posteriors[static_cast<size_t>(c)], y, beta)
            .rowwise()
            .sum();
    logp.col(c) =
        (-0.5 * (static_cast<double>(q) * kLog2Pi + logdet + quad.array()) +
         lpi + expected_ll.array())
            .matrix();
  }

  Matrix r(n, m);
  for (Index i = 0; i < n; ++i) {
    const double row_max = logp.row(i).maxCoeff();
    if (!std::isfinite(row_max))
      throw NumericalError(
          "estep_qs: all responsibilities vanished for point " +
          std::to_string(i));
    const Eigen::ArrayXd w = (logp.row(i).transpose().array() - row_max).exp();
    r.row(i) = (w / w.sum()).transpose();
  }
  return {floor_responsibilities(std::move(r))};
}

// ---------------------------------------------------------------------------
// bounds
// ---------------------------------------------------------------------------

Matrix c_terms(const ModelState &state, const Responsibilities &resp,
               Index p) {
  state.validate();
  check_responsibilities(state, resp.r);
  require(p >= 1, "c_terms: output dimension must be positive");
  const double log_beta_2pi = state.log_beta - kLog2Pi;
  Matrix out = mixture_prior_terms(state, resp.r);
  out.array() += 0.5 * static_cast<double>(p) *
                 ((resp.r.array() - 1.0) * log_beta_2pi -
                  resp.r.array().log());
  return out;
}

BoundReport kl_bound(const ModelState &state, const Responsibilities &resp,
                     const Eigen::Ref<const Matrix> &y, double jitter_base) {
  state.validate();
  check_responsibilities(state, resp.r);
  require(y.rows() == state.n(), "kl_bound: observation rows mismatch");
  const double beta = state.beta();
  double gauss = 0.0;
  for (Index m = 0; m < state.m_components(); ++m) {
    const DtcFactor factor =
        build_dtc(state.family, state.kernels[static_cast<size_t>(m)],
                  state.x, state.x_u, jitter_base);
    const WeightMatrix b{beta * resp.r.col(m)};
    gauss +=
        weighted_log_marginal_batch(factor, b, y, /*with_grads=*/false)
            .log_marginal_sum;
  }
  BoundReport report;
  report.gaussian_term = gauss;
  report.c_term = c_terms(state, resp, y.cols()).sum();
  report.kl_corrected = report.gaussian_term + report.c_term;
  return report;
}

double standard_bound(const ModelState &state, const Responsibilities &resp,
                      const std::vector<ComponentPosterior> &posteriors,
                      const Eigen::Ref<const Matrix> &y, double jitter_base) {
  state.validate();
  check_responsibilities(state, resp.r);
  require(static_cast<Index>(posteriors.size()) == state.m_components(),
          "standard_bound: posterior count mismatch");
  const double beta = state.beta();
  const double p = static_cast<double>(y.cols());

  double total = mixture_prior_terms(state, resp.r).sum();
  for (Index m = 0; m < state.m_components(); ++m) {
    const DtcFactor factor =
        build_dtc(state.family, state.kernels[static_cast<size_t>(m)],
                  state.x, state.x_u, jitter_base);
    const auto &post = posteriors[static_cast<size_t>(m)];
    const Index n_u = factor.n_inducing();
    require(post.w_mean.rows() == n_u && post.w_cov.rows() == n_u,
            "standard_bound: posterior factors inconsistent with state");
    // f-space statistics are rebuilt from the subspace factors so that
    // perturbed posteriors stay internally consistent.
    const Matrix f_mean = factor.v * post.w_mean;
    const Matrix vw = factor.v * post.w_cov;
    const Vector sigma_diag = vw.cwiseProduct(factor.v).rowwise().sum();

    // <sum_i log N(y_ni | f_ni, beta^-1)> weighted by responsibilities
    const Vector row_sq = (y - f_mean).rowwise().squaredNorm();
    const Vector per_point =
        0.5 * p * (state.log_beta - kLog2Pi) -
        0.5 * beta * (row_sq.array() + p * sigma_diag.array());
    total += resp.r.col(m).dot(per_point.matrix());

    // expectation of the rank-N' prior over q(f), in whitened coordinates
    Eigen::LLT<Matrix> llt(post.w_cov);
    if (llt.info() != Eigen::Success)
      throw NumericalError("standard_bound: posterior covariance not PD");
    const double logdet_wc =
        2.0 * llt.matrixLLT().diagonal().array().log().sum();
    const double trace_wc = post.w_cov.trace();
    total += -0.5 * p * static_cast<double>(n_u) * kLog2Pi -
             0.5 * (post.w_mean.squaredNorm() + p * trace_wc);

    // entropy of q(f), same whitened coordinates
    total += p * (0.5 * static_cast<double>(n_u) * (kLog2Pi + 1.0) +
                  0.5 * logdet_wc);
  }
  return total;
}

Vector kl_bound_grads(const ModelState &state, const Responsibilities &resp,
                      const Eigen::Ref<const Matrix> &y, double jitter_base) {
  state.validate();
  check_responsibilities(state, resp.r);
  require(y.rows() == state.n(), "kl_bound_grads: observation rows mismatch");
  const Index n = state.n(), n_u = state.n_inducing(), q = state.q_dim(),
              m_comp = state.m_components();
  const double beta = state.beta();
  const double p = static_cast<double>(y.cols());
  const int kp = active_param_count(state.family);

  Matrix g_x = Matrix::Zero(n, q);
  Matrix g_xu = Matrix::Zero(n_u, q);
  Matrix g_kernel = Matrix::Zero(m_comp, kp);
  double g_log_beta = 0.0;
  Vector g_log_pi = Vector::Zero(m_comp);
  Matrix g_means = Matrix::Zero(m_comp, q);
  Matrix g_log_cov = Matrix::Zero(m_comp, q);

  for (Index m = 0; m < m_comp; ++m) {
    const KernelParams &params = state.kernels[static_cast<size_t>(m)];
    const DtcFactor factor =
        build_dtc(state.family, params, state.x, state.x_u, jitter_base);
    const WeightMatrix b{beta * resp.r.col(m)};
    const BatchGaussian batch =
        weighted_log_marginal_batch(factor, b, y, /*with_grads=*/true);

    // latent inputs through K_fu
    g_x += chain_grad_rows(state.family, params, state.x, state.x_u,
                           batch.d_k_fu);
    g_xu += chain_grad_cols(state.family, params, state.x, state.x_u,
                            batch.d_k_fu);
    // inducing inputs through K_uu (rows and columns)
    g_xu += chain_grad_rows(state.family, params, state.x_u, state.x_u,
                            batch.d_k_uu);
    g_xu += chain_grad_cols(state.family, params, state.x_u, state.x_u,
                            batch.d_k_uu);

    // the jitter on K_uu scales with the mean diagonal, so parameter
    // changes move it too; fold that into the chain rule
    const double tr_g_uu = batch.d_k_uu.trace();
    const double mean_diag_raw =
        factor.chol_uu.rowwise().squaredNorm().mean() - factor.jitter;
    const double jscale =
        mean_diag_raw > 0.0 ? factor.jitter / mean_diag_raw : 0.0;

    const auto grads_fu = kernel_grad_params(state.family, params, state.x,
                                             state.x_u, false);
    const auto grads_uu = kernel_grad_params(state.family, params, state.x_u,
                                             state.x_u, true);
    for (int k = 0; k < kp; ++k) {
      double g = batch.d_k_fu.cwiseProduct(grads_fu[static_cast<size_t>(k)])
                     .sum() +
                 batch.d_k_uu.cwiseProduct(grads_uu[static_cast<size_t>(k)])
                     .sum();
      g += tr_g_uu * jscale *
           grads_uu[static_cast<size_t>(k)].diagonal().mean();
      g_kernel(m, k) += g;
    }
    if (state.family == KernelFamily::kLinear) {
      // diag K_uu = lin |x_u|^2 + bias + white depends on the inputs
      g_xu.array() += (tr_g_uu * jscale / static_cast<double>(n_u)) * 2.0 *
                      params.lin() * state.x_u.array();
    }

    // b = beta * r, r held fixed
    g_log_beta += beta * batch.d_b_diag.dot(resp.r.col(m));
  }

  // correction-term pieces
  const Vector pi = state.mixing_proportions();
  for (Index m = 0; m < m_comp; ++m) {
    const Eigen::ArrayXd cinv =
        (-state.log_cov_diag.row(m).transpose().array()).exp();
    Matrix diff = state.x.rowwise() - state.means.row(m);
    const Matrix weighted =
        resp.r.col(m).asDiagonal() *
        (diff.array().rowwise() * cinv.transpose()).matrix();
    g_x -= weighted;
    g_means.row(m) += weighted.colwise().sum();
    const Matrix sq = diff.array().square().matrix();
    g_log_cov.row(m) +=
        (0.5 * (resp.r.col(m).transpose() * sq).array() * cinv.transpose() -
         0.5 * resp.r.col(m).sum())
            .matrix();
    g_log_pi(m) = resp.r.col(m).sum() - pi(m) * static_cast<double>(n);
  }
  g_log_beta +=
      0.5 * p * (resp.r.sum() - static_cast<double>(n * m_comp));

  // pack in ModelState::to_vector order
  Vector g(state.num_free_params());
  Index at = 0;
  for (Index i = 0; i < n; ++i)
    for (Index d = 0; d < q; ++d) g(at++) = g_x(i, d);
  for (Index i = 0; i < n_u; ++i)
    for (Index d = 0; d < q; ++d) g(at++) = g_xu(i, d);
  for (Index m = 0; m < m_comp; ++m)
    for (int k = 0; k < kp; ++k) g(at++) = g_kernel(m, k);
  g(at++) = g_log_beta;
  for (Index m = 0; m < m_comp; ++m) g(at++) = g_log_pi(m);
  for (Index m = 0; m < m_comp; ++m)
    for (Index d = 0; d < q; ++d) g(at++) = g_means(m, d);
  for (Index m = 0; m < m_comp; ++m)
    for (Index d = 0; d < q; ++d) g(at++) = g_log_cov(m, d);
  return g;
}

std::vector<int> assign_clusters(const Responsibilities &resp) {
  require(resp.r.rows() >= 1, "assign_clusters: empty responsibilities");
  std::vector<int> out(static_cast<size_t>(resp.r.rows()));
  for (Index i = 0; i < resp.r.rows(); ++i) {
    int best = 0;
    double best_val = resp.r(i, 0);
    for (Index m = 1; m < resp.r.cols(); ++m) {
      if (resp.r(i, m) > best_val) {  // strict: ties keep the lower index
        best_val = resp.r(i, m);
        best = static_cast<int>(m);
      }
    }
    out[static_cast<size_t>(i)] = best;
  }
  return out;
}

// ---------------------------------------------------------------------------
// EM driver
// ---------------------------------------------------------------------------

FitResult em_fit_from(ModelState state, Responsibilities r0,
                      const Eigen::Ref<const Matrix> &y,
                      const std::optional<std::vector<int>> &labels,
                      int n_iter, const FitOptions &opts) {
  require(n_iter >= 1, "em_fit: need at least one iteration");
  state.validate();
  require(y.rows() == state.n(), "em_fit: observation rows mismatch");
  Responsibilities resp{floor_responsibilities(std::move(r0.r))};

  BoundReport report;
  const Matrix y_mat = y;  // own a copy for the closures

  for (int iter = 1; iter <= n_iter; ++iter) {
    std::vector<ComponentPosterior> posteriors;
    try {
      posteriors = estep_qf(state, resp, y_mat, opts.jitter_base);
      resp = estep_qs(state, posteriors, y_mat);
    } catch (const NumericalError &err) {
      throw NumericalError("E-step failed at iteration " +
                           std::to_string(iter) + ": " + err.what());
    }

    const auto value = [&](const Vector &v) -> double {
      ModelState s = state;
      s.from_vector(v);
      try {
        return -kl_bound(s, resp, y_mat, opts.jitter_base).kl_corrected;
      } catch (const NumericalError &) {
        return std::numeric_limits<double>::infinity();
      }
    };
    const auto gradient = [&](const Vector &v) -> Vector {
      ModelState s = state;
      s.from_vector(v);
      try {
        return -kl_bound_grads(s, resp, y_mat, opts.jitter_base);
      } catch (const NumericalError &) {
        return Vector::Constant(v.size(),
                                std::numeric_limits<double>::quiet_NaN());
      }
    };

    ScgConfig cfg;
    cfg.max_iters = opts.mstep_iters;
    cfg.grad_tol = 1e-7;
    cfg.step_tol = 1e-13;
    cfg.initial_lambda = opts.mstep_lambda0;
    const ScgResult mstep = scg_minimize(value, gradient, state.to_vector(), cfg);
    state.from_vector(mstep.x_star);
    const double kl = -mstep.f_star;
    if (!std::isfinite(kl))
      throw NumericalError("non-finite bound after M-step at iteration " +
                           std::to_string(iter));

    TracePoint tp;
    tp.iteration = iter;
    tp.kl_corrected = kl;
    if (labels)
      tp.accuracy = clustering_accuracy({*labels, assign_clusters(resp)});
    report.per_iteration_trace.push_back(tp);
    if (opts.record_mstep_traces)
      report.mstep_value_traces.push_back(mstep.f_trace);
  }

  const BoundReport final_bound =
      kl_bound(state, resp, y_mat, opts.jitter_base);
  report.kl_corrected = final_bound.kl_corrected;
  report.gaussian_term = final_bound.gaussian_term;
  report.c_term = final_bound.c_term;
  return {std::move(state), std::move(resp), std::move(report)};
}

FitResult em_fit(const Dataset &data, int m_components, int q_dim,
                 Index n_prime, int n_iter, std::uint64_t seed,
                 KernelFamily family, const FitOptions &opts) {
  require(data.n() >= 2, "em_fit: need at least two data points");
  Dataset prepared = data;
  if (opts.standardize) prepared.y = standardize_columns(data.y);
  ModelState state =
      init_model(prepared, m_components, q_dim, n_prime, seed, family,
                 opts.init);
  Responsibilities r0{Matrix::Constant(prepared.n(), m_components,
                                       1.0 / m_components)};
  return em_fit_from(std::move(state), std::move(r0), prepared.y,
                     prepared.labels, n_iter, opts);
}

}  // namespace sgpmix
