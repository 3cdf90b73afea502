// src/checkpoint.cpp

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

#include "sgpmix/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace sgpmix {

namespace {

constexpr char kMagic[8] = {'S', 'G', 'P', 'M', 'I', 'X', 'C', '1'};

void write_u64(std::ostream &out, std::uint64_t v) {
  out.write(reinterpret_cast<const char *>(&v), sizeof(v));
}
void write_f64(std::ostream &out, double v) {
  out.write(reinterpret_cast<const char *>(&v), sizeof(v));
}
void write_matrix(std::ostream &out, const Matrix &m) {
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) write_f64(out, m(i, j));
}

std::uint64_t read_u64(std::istream &in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char *>(&v), sizeof(v));
  return v;
}
double read_f64(std::istream &in) {
  double v = 0;
  in.read(reinterpret_cast<char *>(&v), sizeof(v));
  return v;
}
void read_matrix(std::istream &in, Matrix *m) {
  for (Index i = 0; i < m->rows(); ++i)
    for (Index j = 0; j < m->cols(); ++j) (*m)(i, j) = read_f64(in);
}

}  // namespace

void save_checkpoint(const Checkpoint &ckpt, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot write checkpoint: " + path);
  const ModelState &s = ckpt.state;
  out.write(kMagic, sizeof(kMagic));
  write_u64(out, static_cast<std::uint64_t>(s.n()));
  write_u64(out, static_cast<std::uint64_t>(ckpt.observed_dim));
  write_u64(out, static_cast<std::uint64_t>(s.q_dim()));
  write_u64(out, static_cast<std::uint64_t>(s.m_components()));
  write_u64(out, static_cast<std::uint64_t>(s.n_inducing()));
  write_u64(out, s.family == KernelFamily::kLinear ? 0u : 1u);
  write_u64(out, ckpt.seed);
  write_matrix(out, s.x);
  write_matrix(out, s.x_u);
  for (const KernelParams &k : s.kernels) {
    write_f64(out, k.log_lin);
    write_f64(out, k.log_rbf);
    write_f64(out, k.log_gamma);
    write_f64(out, k.log_bias);
    write_f64(out, k.log_white);
  }
  write_f64(out, s.log_beta);
  for (Index m = 0; m < s.m_components(); ++m) write_f64(out, s.log_pi(m));
  write_matrix(out, s.means);
  write_matrix(out, s.log_cov_diag);
  write_u64(out, static_cast<std::uint64_t>(ckpt.trace.size()));
  for (const TracePoint &tp : ckpt.trace) {
    write_u64(out, static_cast<std::uint64_t>(tp.iteration));
    write_f64(out, tp.kl_corrected);
    write_u64(out, tp.accuracy ? 1u : 0u);
    write_f64(out, tp.accuracy.value_or(0.0));
  }
  require(out.good(), "short write for checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot read checkpoint: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  require(in.good() && std::memcmp(magic, kMagic, sizeof(kMagic)) == 0,
          "not a model checkpoint: " + path);
  Checkpoint ckpt;
  ModelState &s = ckpt.state;
  const auto n = static_cast<Index>(read_u64(in));
  ckpt.observed_dim = static_cast<Index>(read_u64(in));
  const auto q = static_cast<Index>(read_u64(in));
  const auto m = static_cast<Index>(read_u64(in));
  const auto n_u = static_cast<Index>(read_u64(in));
  s.family = read_u64(in) == 0 ? KernelFamily::kLinear : KernelFamily::kRbf;
  ckpt.seed = read_u64(in);
  s.x.resize(n, q);
  s.x_u.resize(n_u, q);
  read_matrix(in, &s.x);
  read_matrix(in, &s.x_u);
  s.kernels.resize(static_cast<size_t>(m));
  for (KernelParams &k : s.kernels) {
    k.log_lin = read_f64(in);
    k.log_rbf = read_f64(in);
    k.log_gamma = read_f64(in);
    k.log_bias = read_f64(in);
    k.log_white = read_f64(in);
  }
  s.log_beta = read_f64(in);
  s.log_pi.resize(m);
  for (Index c = 0; c < m; ++c) s.log_pi(c) = read_f64(in);
  s.means.resize(m, q);
  s.log_cov_diag.resize(m, q);
  read_matrix(in, &s.means);
  read_matrix(in, &s.log_cov_diag);
  const auto n_trace = read_u64(in);
  ckpt.trace.resize(n_trace);
  for (auto &tp : ckpt.trace) {
    tp.iteration = static_cast<int>(read_u64(in));
    tp.kl_corrected = read_f64(in);
    const bool has_acc = read_u64(in) != 0;
    const double acc = read_f64(in);
    if (has_acc) tp.accuracy = acc;
  }
  require(in.good(), "truncated checkpoint: " + path);
  return ckpt;
}

}  // namespace sgpmix
