// src/experiment.cpp

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

#include "sgpmix/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <thread>

#include <json.hpp>

#include "sgpmix/checkpoint.hpp"
#include "sgpmix/metrics.hpp"

namespace sgpmix {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void atomic_write(const std::string &path, const std::string &content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    require(out.good(), "cannot write file: " + tmp);
    out << content;
  }
  fs::rename(tmp, path);
}

std::string trace_to_csv(const BoundReport &report) {
  std::string out = "iter,kl_bound,accuracy\n";
  for (const TracePoint &tp : report.per_iteration_trace) {
    out += std::to_string(tp.iteration);
    out += ",";
    out += fmt17(tp.kl_corrected);
    out += ",";
    if (tp.accuracy) out += fmt17(*tp.accuracy);
    out += "\n";
  }
  return out;
}

std::string embedding_to_csv(const FitResult &fit,
                             const std::optional<std::vector<int>> &labels) {
  const Matrix &x = fit.state.x;
  std::string out;
  for (Index c = 0; c < x.cols(); ++c) {
    if (c) out += ",";
    out += "x" + std::to_string(c + 1);
  }
  out += ",cluster,label\n";
  const std::vector<int> clusters = assign_clusters(fit.resp);
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index c = 0; c < x.cols(); ++c) {
      if (c) out += ",";
      out += fmt17(x(i, c));
    }
    out += "," + std::to_string(clusters[static_cast<size_t>(i)]) + ",";
    if (labels) out += std::to_string((*labels)[static_cast<size_t>(i)]);
    out += "\n";
  }
  return out;
}

struct Stats {
  double mean = 0.0;
  double sd = 0.0;
};
Stats mean_sd(const std::vector<double> &v) {
  Stats s;
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double acc = 0.0;
    for (double x : v) acc += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(acc / static_cast<double>(v.size() - 1));
  }
  return s;
}

}  // namespace

FitOptions ExperimentConfig::fit_options() const {
  FitOptions opts;
  opts.standardize = standardize;
  return opts;
}

void ExperimentConfig::validate() const {
  require(dataset_path.empty() != synth.empty(),
          "exactly one of a dataset path or a synthetic spec is required");
  require(synth.empty() || synth == "arcs" || synth == "spiral",
          "unknown synthetic dataset: " + synth);
  require((variance_pct > 0) != (q > 0),
          "exactly one of variance-pct / q is required");
  require(!seeds.empty(), "at least one seed is required");
  require(iterations >= 1, "iterations must be positive");
  require(inducing >= 1, "inducing-point count must be positive");
}

Dataset load_experiment_dataset(const ExperimentConfig &config,
                                std::uint64_t synth_seed) {
  if (!config.synth.empty()) {
    if (config.synth == "arcs")
      return synth_circle_arcs(config.synth_n, synth_seed);
    return synth_spiral3d(config.synth_n, config.synth_noise, synth_seed);
  }
  return load_csv(config.dataset_path, config.labels);
}

std::vector<std::uint64_t> parse_seed_list(const std::string &spec) {
  std::vector<std::uint64_t> seeds;
  require(!spec.empty(), "empty seed list");
  const auto dots = spec.find("..");
  if (dots != std::string::npos) {
    const auto lo = std::stoull(spec.substr(0, dots));
    const auto hi = std::stoull(spec.substr(dots + 2));
    require(hi >= lo, "seed range is reversed: " + spec);
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  std::size_t at = 0;
  while (at < spec.size()) {
    auto comma = spec.find(',', at);
    if (comma == std::string::npos) comma = spec.size();
    seeds.push_back(std::stoull(spec.substr(at, comma - at)));
    at = comma + 1;
  }
  return seeds;
}

std::string RunRecord::to_json(bool include_wall_times) const {
  json j;
  j["dataset"] = dataset_name;
  j["n"] = n;
  j["p"] = p;
  j["kernel"] = to_string(config.kernel);
  j["clusters"] = resolved_clusters;
  j["q"] = resolved_q;
  if (config.variance_pct > 0) j["variance_pct"] = config.variance_pct;
  j["inducing"] = config.inducing;
  j["iterations"] = config.iterations;
  j["standardize"] = config.standardize;
  j["seeds"] = config.seeds;
  json seeds_json = json::array();
  for (const SeedOutcome &s : per_seed) {
    json e;
    e["seed"] = s.seed;
    if (s.acc) e["acc"] = *s.acc;
    if (s.nmi) e["nmi"] = *s.nmi;
    e["bound"] = s.bound;
    if (include_wall_times) e["wall_time_sec"] = s.wall_time_sec;
    e["trace_csv"] = s.trace_csv;
    e["embedding_csv"] = s.embedding_csv;
    if (!s.model_file.empty()) e["model_file"] = s.model_file;
    seeds_json.push_back(e);
  }
  j["per_seed"] = seeds_json;
  json agg;
  if (acc_mean) {
    agg["acc_mean"] = *acc_mean;
    agg["acc_sd"] = *acc_sd;
  }
  if (nmi_mean) {
    agg["nmi_mean"] = *nmi_mean;
    agg["nmi_sd"] = *nmi_sd;
  }
  agg["bound_mean"] = bound_mean;
  if (include_wall_times) agg["wall_time_mean_sec"] = wall_time_mean_sec;
  j["aggregate"] = agg;
  return j.dump(2) + "\n";
}

RunRecord cmd_fit(const ExperimentConfig &config) {
  config.validate();
  fs::create_directories(config.output_dir);

  RunRecord record;
  record.config = config;

  // Synthetic data are regenerated per seed; file datasets load once.
  const Dataset base = load_experiment_dataset(config, config.seeds.front());
  record.dataset_name = base.name;
  record.n = base.n();
  record.p = base.p();
  record.resolved_q = config.q > 0
                          ? config.q
                          : pca_variance_dims(base.y, config.variance_pct);
  record.resolved_clusters =
      config.clusters > 0 ? config.clusters : base.num_classes();
  require(record.resolved_clusters >= 1,
          "cluster count unresolved: pass --clusters or labeled data");

  record.per_seed.resize(config.seeds.size());
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::string error_message;
  std::mutex error_mutex;

  const auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= config.seeds.size() || failed.load()) break;
      const std::uint64_t seed = config.seeds[i];
      try {
        const Dataset data = config.synth.empty()
                                 ? base
                                 : load_experiment_dataset(config, seed);
        const auto t0 = std::chrono::steady_clock::now();
        const FitResult fit =
            em_fit(data, record.resolved_clusters, record.resolved_q,
                   config.inducing, config.iterations, seed, config.kernel,
                   config.fit_options());
        const auto t1 = std::chrono::steady_clock::now();

        SeedOutcome &out = record.per_seed[i];
        out.seed = seed;
        out.wall_time_sec =
            std::chrono::duration<double>(t1 - t0).count();
        out.bound = fit.report.kl_corrected;
        if (data.labels) {
          const LabelPair pair{*data.labels, assign_clusters(fit.resp)};
          out.acc = clustering_accuracy(pair);
          out.nmi = nmi(pair);
        }
        const std::string stem =
            config.output_dir + "/seed" + std::to_string(seed);
        out.trace_csv = stem + "_trace.csv";
        out.embedding_csv = stem + "_embedding.csv";
        atomic_write(out.trace_csv, trace_to_csv(fit.report));
        atomic_write(out.embedding_csv, embedding_to_csv(fit, data.labels));
        if (config.save_model) {
          out.model_file = stem + "_model.bin";
          Checkpoint ckpt;
          ckpt.state = fit.state;
          ckpt.observed_dim = data.p();
          ckpt.seed = seed;
          ckpt.trace = fit.report.per_iteration_trace;
          save_checkpoint(ckpt, out.model_file);
        }
      } catch (const std::exception &err) {
        std::lock_guard<std::mutex> lock(error_mutex);
        failed.store(true);
        if (error_message.empty())
          error_message = "seed " + std::to_string(seed) + ": " + err.what();
      }
    }
  };

  const unsigned hw = std::thread::hardware_concurrency();
  const size_t n_threads =
      std::min(config.seeds.size(),
               static_cast<size_t>(config.threads > 0 ? config.threads
                                                      : (hw ? hw : 1)));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto &th : pool) th.join();
  }
  if (failed.load()) throw NumericalError("fit failed: " + error_message);

  std::vector<double> accs, nmis, bounds, times;
  for (const SeedOutcome &s : record.per_seed) {
    if (s.acc) accs.push_back(*s.acc);
    if (s.nmi) nmis.push_back(*s.nmi);
    bounds.push_back(s.bound);
    times.push_back(s.wall_time_sec);
  }
  if (!accs.empty()) {
    const Stats st = mean_sd(accs);
    record.acc_mean = st.mean;
    record.acc_sd = st.sd;
  }
  if (!nmis.empty()) {
    const Stats st = mean_sd(nmis);
    record.nmi_mean = st.mean;
    record.nmi_sd = st.sd;
  }
  record.bound_mean = mean_sd(bounds).mean;
  record.wall_time_mean_sec = mean_sd(times).mean;

  atomic_write(config.output_dir + "/run_record.json", record.to_json());
  return record;
}

std::vector<RunRecord> cmd_sweep_inducing(const ExperimentConfig &config,
                                          const std::vector<Index> &n_primes) {
  require(!n_primes.empty(), "sweep needs at least one inducing-point count");
  fs::create_directories(config.output_dir);
  std::vector<RunRecord> records;
  std::string summary = "n_prime,acc_mean,nmi_mean,wall_time_mean_sec\n";
  for (const Index n_prime : n_primes) {
    ExperimentConfig sub = config;
    sub.inducing = n_prime;
    sub.output_dir =
        config.output_dir + "/inducing" + std::to_string(n_prime);
    records.push_back(cmd_fit(sub));
    const RunRecord &r = records.back();
    summary += std::to_string(n_prime) + "," +
               (r.acc_mean ? fmt17(*r.acc_mean) : "") + "," +
               (r.nmi_mean ? fmt17(*r.nmi_mean) : "") + "," +
               fmt17(r.wall_time_mean_sec) + "\n";
  }
  atomic_write(config.output_dir + "/summary.csv", summary);
  return records;
}

GradcheckReport run_gradcheck(Index n, Index n_prime, int m_components,
                              int q_dim, Index p_dim, std::uint64_t seed,
                              KernelFamily family, bool corrupt) {
  require(n >= 2 && n <= 30, "gradcheck: n out of [2, 30]");
  require(n_prime >= 1 && n_prime <= n, "gradcheck: bad inducing count");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uni(-0.4, 0.4);

  ModelState state;
  state.family = family;
  state.x.resize(n, q_dim);
  for (Index i = 0; i < n; ++i)
    for (Index d = 0; d < q_dim; ++d) state.x(i, d) = gauss(rng);
  state.x_u.resize(n_prime, q_dim);
  for (Index i = 0; i < n_prime; ++i)
    for (Index d = 0; d < q_dim; ++d) state.x_u(i, d) = gauss(rng);
  state.kernels.resize(static_cast<size_t>(m_components));
  for (auto &k : state.kernels) {
    k = KernelParams::defaults();
    k.log_lin += uni(rng);
    k.log_rbf += uni(rng);
    k.log_gamma += uni(rng);
    k.log_bias += uni(rng);
    k.log_white += uni(rng);
  }
  state.log_beta = 0.3 + uni(rng);
  state.log_pi = Vector::Zero(m_components);
  for (Index m = 0; m < m_components; ++m) state.log_pi(m) = uni(rng);
  state.means.resize(m_components, q_dim);
  state.log_cov_diag.resize(m_components, q_dim);
  for (Index m = 0; m < m_components; ++m)
    for (Index d = 0; d < q_dim; ++d) {
      state.means(m, d) = gauss(rng);
      state.log_cov_diag(m, d) = uni(rng);
    }

  Matrix r(n, m_components);
  std::uniform_real_distribution<double> pos(0.05, 1.0);
  for (Index i = 0; i < n; ++i) {
    for (Index m = 0; m < m_components; ++m) r(i, m) = pos(rng);
    r.row(i) /= r.row(i).sum();
  }
  Matrix y(n, p_dim);
  for (Index i = 0; i < n; ++i)
    for (Index c = 0; c < p_dim; ++c) y(i, c) = gauss(rng);

  const Responsibilities resp{r};
  Vector analytic = kl_bound_grads(state, resp, y);
  if (corrupt) analytic(0) += 1e-2;

  const Vector x0 = state.to_vector();
  Vector fd(x0.size());
  ModelState probe = state;
  for (Index i = 0; i < x0.size(); ++i) {
    const double h = 1e-5 * std::max(1.0, std::abs(x0(i)));
    Vector xp = x0, xm = x0;
    xp(i) += h;
    xm(i) -= h;
    probe.from_vector(xp);
    const double fp = kl_bound(probe, resp, y).kl_corrected;
    probe.from_vector(xm);
    const double fm = kl_bound(probe, resp, y).kl_corrected;
    fd(i) = (fp - fm) / (2.0 * h);
  }

  GradcheckReport report;
  report.pass = true;
  for (const auto &block : state.param_blocks()) {
    GradcheckBlock gb;
    gb.name = block.name;
    for (Index i = block.begin; i < block.end; ++i) {
      const double denom = std::max(std::abs(analytic(i)), std::abs(fd(i)));
      const double err = denom < 1e-8 ? std::abs(analytic(i) - fd(i))
                                      : std::abs(analytic(i) - fd(i)) / denom;
      gb.max_rel_err = std::max(gb.max_rel_err, err);
    }
    report.pass = report.pass && gb.max_rel_err < report.tolerance;
    report.blocks.push_back(gb);
  }
  return report;
}

}  // namespace sgpmix
