// include/sgpmix/experiment.hpp

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

#ifndef SGPMIX_EXPERIMENT_HPP_
#define SGPMIX_EXPERIMENT_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sgpmix/mixture.hpp"

namespace sgpmix {

struct ExperimentConfig {
  // exactly one of dataset_path / synth
  std::string dataset_path;
  std::string synth;        // "arcs" or "spiral"
  Index synth_n = 60;       // points per arc, or total spiral points
  double synth_noise = 0.05;

  std::string labels;  // "last" or empty
  KernelFamily kernel = KernelFamily::kRbf;
  int clusters = 0;         // 0 = take the number of classes from the labels
  double variance_pct = 0;  // exactly one of variance_pct / q is set
  int q = 0;
  Index inducing = 50;
  int iterations = 100;
  std::vector<std::uint64_t> seeds;
  bool standardize = true;
  std::string output_dir = ".";
  bool save_model = false;
  int threads = 0;  // 0 = hardware concurrency

  FitOptions fit_options() const;
  void validate() const;
};

struct SeedOutcome {
  std::uint64_t seed = 0;
  std::optional<double> acc;
  std::optional<double> nmi;
  double bound = 0.0;
  double wall_time_sec = 0.0;
  std::string trace_csv;
  std::string embedding_csv;
  std::string model_file;
};

struct RunRecord {
  ExperimentConfig config;
  std::string dataset_name;
  Index n = 0, p = 0;
  int resolved_q = 0;
  int resolved_clusters = 0;
  std::vector<SeedOutcome> per_seed;
  std::optional<double> acc_mean, acc_sd;
  std::optional<double> nmi_mean, nmi_sd;
  double bound_mean = 0.0;
  double wall_time_mean_sec = 0.0;

  std::string to_json(bool include_wall_times = true) const;
};

Dataset load_experiment_dataset(const ExperimentConfig &config,
                                std::uint64_t synth_seed = 0);

/// Runs one fit per seed (seeds may execute concurrently), writes the
/// per-seed trace and embedding CSVs plus the aggregated run-record JSON
/// into output_dir, and returns the record.
RunRecord cmd_fit(const ExperimentConfig &config);

/// cmd_fit once per inducing-point count; writes one run record per value
/// in a subdirectory plus a summary CSV
/// (n_prime, acc_mean, nmi_mean, wall_time_mean_sec).
std::vector<RunRecord> cmd_sweep_inducing(const ExperimentConfig &config,
                                          const std::vector<Index> &n_primes);

struct GradcheckBlock {
  std::string name;
  double max_rel_err = 0.0;
};
struct GradcheckReport {
  std::vector<GradcheckBlock> blocks;
  bool pass = false;
  double tolerance = 1e-4;
};

/// Analytic bound gradient against central finite differences on a random
/// synthetic instance; per-block worst relative error. corrupt injects an
/// error into the analytic gradient (negative-control hook).
GradcheckReport run_gradcheck(Index n, Index n_prime, int m_components,
                              int q_dim, Index p_dim, std::uint64_t seed,
                              KernelFamily family = KernelFamily::kRbf,
                              bool corrupt = false);

std::vector<std::uint64_t> parse_seed_list(const std::string &spec);

}  // namespace sgpmix

#endif  // SGPMIX_EXPERIMENT_HPP_
