// src/kernel.cpp

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

#include "sgpmix/kernel.hpp"

#include <cmath>

namespace sgpmix {

std::string to_string(KernelFamily family) {
  return family == KernelFamily::kLinear ? "linear" : "rbf";
}

KernelFamily kernel_family_from_string(const std::string &name) {
  if (name == "linear") return KernelFamily::kLinear;
  if (name == "rbf") return KernelFamily::kRbf;
  throw std::invalid_argument("unknown kernel family: " + name);
}

KernelParams KernelParams::defaults() {
  KernelParams p;
  p.log_lin = 0.0;
  p.log_rbf = 0.0;
  p.log_gamma = 0.0;
  p.log_bias = -2.0;
  p.log_white = -2.0;
  return p;
}

int active_param_count(KernelFamily family) {
  return family == KernelFamily::kLinear ? 3 : 4;
}

std::vector<std::string> active_param_names(KernelFamily family) {
  if (family == KernelFamily::kLinear)
    return {"log_lin", "log_bias", "log_white"};
  return {"log_rbf", "log_gamma", "log_bias", "log_white"};
}

void pack_params(KernelFamily family, const KernelParams &params, double *out) {
  if (family == KernelFamily::kLinear) {
    out[0] = params.log_lin;
    out[1] = params.log_bias;
    out[2] = params.log_white;
  } else {
    out[0] = params.log_rbf;
    out[1] = params.log_gamma;
    out[2] = params.log_bias;
    out[3] = params.log_white;
  }
}

void unpack_params(KernelFamily family, const double *in, KernelParams *params) {
  if (family == KernelFamily::kLinear) {
    params->log_lin = in[0];
    params->log_bias = in[1];
    params->log_white = in[2];
  } else {
    params->log_rbf = in[0];
    params->log_gamma = in[1];
    params->log_bias = in[2];
    params->log_white = in[3];
  }
}

namespace {

void check_inputs(const Eigen::Ref<const Matrix> &a,
                  const Eigen::Ref<const Matrix> &b) {
  require(a.cols() == b.cols(), "gram: point sets differ in dimension");
  require(a.cols() >= 1, "gram: empty input dimension");
  if (!a.allFinite() || !b.allFinite())
    throw NumericalError("gram: non-finite input location");
}

}  // namespace

double kernel_eval(KernelFamily family, const KernelParams &params,
                   const Eigen::Ref<const Vector> &z,
                   const Eigen::Ref<const Vector> &z_prime, bool same_index) {
  require(z.size() == z_prime.size(), "kernel_eval: dimension mismatch");
  require(z.size() >= 1, "kernel_eval: empty input");
  if (!z.allFinite() || !z_prime.allFinite())
    throw NumericalError("kernel_eval: non-finite input");
  double value = params.bias();
  if (same_index) value += params.white();
  if (family == KernelFamily::kLinear) {
    value += params.lin() * z.dot(z_prime);
  } else {
    const double d2 = (z - z_prime).squaredNorm();
    value += params.rbf() * std::exp(-0.5 * params.gamma() * d2);
  }
  return value;
}

GramMatrix gram(KernelFamily family, const KernelParams &params,
                const Eigen::Ref<const Matrix> &a,
                const Eigen::Ref<const Matrix> &b, bool same_set) {
  check_inputs(a, b);
  GramMatrix out;
  out.rows_same_as_cols = same_set;
  if (family == KernelFamily::kLinear) {
    out.values = params.lin() * (a * b.transpose());
    out.values.array() += params.bias();
  } else {
    // |a_i - b_j|^2 = |a_i|^2 + |b_j|^2 - 2 a_i.b_j
    const Vector a2 = a.rowwise().squaredNorm();
    const Vector b2 = b.rowwise().squaredNorm();
    Matrix d2 = (-2.0 * (a * b.transpose())).colwise() + a2;
    d2.rowwise() += b2.transpose();
    out.values = params.rbf() * (-0.5 * params.gamma() * d2.array().max(0.0))
                                    .exp()
                                    .matrix();
    out.values.array() += params.bias();
  }
  if (same_set)
    out.values.diagonal().array() += params.white();
  return out;
}

std::vector<Matrix> kernel_grad_params(KernelFamily family,
                                       const KernelParams &params,
                                       const Eigen::Ref<const Matrix> &a,
                                       const Eigen::Ref<const Matrix> &b,
                                       bool same_set) {
  check_inputs(a, b);
  const Index n = a.rows(), m = b.rows();
  std::vector<Matrix> grads;
  Matrix d_white = Matrix::Zero(n, m);
  if (same_set) d_white.diagonal().array() = params.white();
  if (family == KernelFamily::kLinear) {
    grads.push_back(params.lin() * (a * b.transpose()));  // d/dlog_lin
  } else {
    const Vector a2 = a.rowwise().squaredNorm();
    const Vector b2 = b.rowwise().squaredNorm();
    Matrix d2 = (-2.0 * (a * b.transpose())).colwise() + a2;
    d2.rowwise() += b2.transpose();
    d2 = d2.array().max(0.0).matrix();
    const Matrix core =
        params.rbf() * (-0.5 * params.gamma() * d2.array()).exp().matrix();
    grads.push_back(core);  // d/dlog_rbf = theta_rbf * exp(...) (chain applied)
    grads.push_back(-0.5 * params.gamma() *
                    core.cwiseProduct(d2));  // d/dlog_gamma
  }
  grads.push_back(Matrix::Constant(n, m, params.bias()));  // d/dlog_bias
  grads.push_back(d_white);                                // d/dlog_white
  return grads;
}

InputGrads kernel_grad_inputs(KernelFamily family, const KernelParams &params,
                              const Eigen::Ref<const Matrix> &a,
                              const Eigen::Ref<const Matrix> &b,
                              bool /*same_set*/) {
  check_inputs(a, b);
  const Index n = a.rows(), m = b.rows(), q = a.cols();
  InputGrads out;
  out.d_rows.resize(q);
  out.d_cols.resize(q);
  if (family == KernelFamily::kLinear) {
    // dK_ij/dA_iq = lin * B_jq, dK_ij/dB_jq = lin * A_iq
    for (Index d = 0; d < q; ++d) {
      out.d_rows[d] = params.lin() * b.col(d).transpose().replicate(n, 1);
      out.d_cols[d] = params.lin() * a.col(d).replicate(1, m);
    }
  } else {
    const Vector a2 = a.rowwise().squaredNorm();
    const Vector b2 = b.rowwise().squaredNorm();
    Matrix d2 = (-2.0 * (a * b.transpose())).colwise() + a2;
    d2.rowwise() += b2.transpose();
    d2 = d2.array().max(0.0).matrix();
    const Matrix core =
        params.rbf() * (-0.5 * params.gamma() * d2.array()).exp().matrix();
    for (Index d = 0; d < q; ++d) {
      Matrix diff = a.col(d).replicate(1, m);
      diff.rowwise() -= b.col(d).transpose();
      out.d_rows[d] = (-params.gamma()) * core.cwiseProduct(diff);
      out.d_cols[d] = -out.d_rows[d];
    }
  }
  return out;
}

Matrix chain_grad_rows(KernelFamily family, const KernelParams &params,
                       const Eigen::Ref<const Matrix> &a,
                       const Eigen::Ref<const Matrix> &b,
                       const Eigen::Ref<const Matrix> &upstream) {
  check_inputs(a, b);
  if (family == KernelFamily::kLinear)
    return params.lin() * (upstream * b);
  const Vector a2 = a.rowwise().squaredNorm();
  const Vector b2 = b.rowwise().squaredNorm();
  Matrix d2 = (-2.0 * (a * b.transpose())).colwise() + a2;
  d2.rowwise() += b2.transpose();
  d2 = d2.array().max(0.0).matrix();
  const Matrix w = (-params.gamma()) * params.rbf() *
                   (-0.5 * params.gamma() * d2.array()).exp().matrix() *
                   1.0;  // weight per entry
  const Matrix gw = upstream.cwiseProduct(w);
  // sum_j gw_ij (a_i - b_j) = (sum_j gw_ij) a_i - gw * b
  return gw.rowwise().sum().asDiagonal() * a - gw * b;
}

Matrix chain_grad_cols(KernelFamily family, const KernelParams &params,
                       const Eigen::Ref<const Matrix> &a,
                       const Eigen::Ref<const Matrix> &b,
                       const Eigen::Ref<const Matrix> &upstream) {
  // dK_ij/dB_jq is the negation of dK_ij/dA_iq for RBF and the transposed
  // role for Linear, so both reduce to the row version on the transpose.
  return chain_grad_rows(family, params, b, a, upstream.transpose());
}

JitteredCholesky add_jitter(const GramMatrix &k, double base) {
  require(k.rows_same_as_cols, "add_jitter: matrix is not a same-set Gram");
  require(k.values.rows() == k.values.cols(), "add_jitter: not square");
  if (!k.values.allFinite())
    throw NumericalError("add_jitter: non-finite Gram matrix");
  JitteredCholesky out;
  double j = base * k.values.diagonal().mean();
  if (!(j > 0.0)) j = base;  // zero-trace corner
  for (int attempt = 0; attempt <= 10; ++attempt) {
    out.matrix = k.values;
    out.matrix.diagonal().array() += j;
    out.llt.compute(out.matrix);
    if (out.llt.info() == Eigen::Success) {
      out.jitter = j;
      return out;
    }
    j *= 2.0;
  }
  throw NumericalError("add_jitter: kernel matrix singular after 10 doublings");
}

}  // namespace sgpmix
