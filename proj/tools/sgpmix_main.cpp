// tools/sgpmix_main.cpp

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

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <string>

#include "sgpmix/data.hpp"
#include "sgpmix/experiment.hpp"
#include "sgpmix/svg_plot.hpp"

namespace {

using namespace sgpmix;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct CliOptions {
  ExperimentConfig config;
  std::string kernel_name = "rbf";
  std::string seeds_spec = "0";
  std::string inducing_list;  // sweep only
  std::string config_path;
};

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

bool parse_bool(const std::string &v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config: expected a boolean, got '" + v + "'");
}

// key=value config file; any option already given on the command line wins
void apply_config_file(const CLI::App *cmd, CliOptions *opt) {
  std::ifstream in(opt->config_path);
  require(in.good(), "cannot open config file: " + opt->config_path);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos,
            "config: expected key=value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string flag = "--" + key;
    if (key != "standardize" && cmd->count(flag) > 0) continue;

    ExperimentConfig &c = opt->config;
    if (key == "data") c.dataset_path = value;
    else if (key == "synth") c.synth = value;
    else if (key == "synth-n") c.synth_n = std::stoll(value);
    else if (key == "synth-noise") c.synth_noise = std::stod(value);
    else if (key == "labels") c.labels = value;
    else if (key == "kernel") opt->kernel_name = value;
    else if (key == "clusters") c.clusters = std::stoi(value);
    else if (key == "variance-pct") c.variance_pct = std::stod(value);
    else if (key == "q") c.q = std::stoi(value);
    else if (key == "inducing") c.inducing = std::stoll(value);
    else if (key == "iters") c.iterations = std::stoi(value);
    else if (key == "seeds") opt->seeds_spec = value;
    else if (key == "standardize") {
      if (cmd->count("--no-standardize") == 0)
        c.standardize = parse_bool(value);
    } else if (key == "out") {
      if (cmd->count("--out") == 0) c.output_dir = value;
    } else if (key == "save-model") c.save_model = parse_bool(value);
    else if (key == "threads") c.threads = std::stoi(value);
    else if (key == "inducing-list") {
      if (cmd->count("--inducing-list") == 0) opt->inducing_list = value;
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
}

void add_fit_options(CLI::App *cmd, CliOptions *opt) {
  cmd->add_option("--data", opt->config.dataset_path, "dataset CSV path");
  cmd->add_option("--synth", opt->config.synth,
                  "synthetic dataset: arcs or spiral");
  cmd->add_option("--synth-n", opt->config.synth_n,
                  "points per arc / total spiral points");
  cmd->add_option("--synth-noise", opt->config.synth_noise,
                  "spiral noise standard deviation");
  cmd->add_option("--labels", opt->config.labels,
                  "label column selector (last)");
  cmd->add_option("--kernel", opt->kernel_name, "kernel family: rbf|linear");
  cmd->add_option("--clusters", opt->config.clusters,
                  "number of mixture components (0 = number of classes)");
  cmd->add_option("--variance-pct", opt->config.variance_pct,
                  "latent dimension from retained variance percentage");
  cmd->add_option("--q", opt->config.q, "explicit latent dimension");
  cmd->add_option("--inducing", opt->config.inducing,
                  "number of inducing points");
  cmd->add_option("--iters", opt->config.iterations, "outer iterations");
  cmd->add_option("--seeds", opt->seeds_spec,
                  "seed list: a..b range or comma separated");
  cmd->add_flag("--no-standardize", [opt](std::int64_t) {
      opt->config.standardize = false;
    },
    "skip per-column standardization");
  cmd->add_option("--out", opt->config.output_dir, "output directory");
  cmd->add_flag("--save-model", opt->config.save_model,
                "write a model checkpoint per seed");
  cmd->add_option("--threads", opt->config.threads,
                  "seed-level parallelism (0 = hardware)");
  cmd->set_config("--config", "", "key=value config file (flags override)");
}

void finalize_config(CliOptions *opt) {
  opt->config.kernel = kernel_family_from_string(opt->kernel_name);
  opt->config.seeds = parse_seed_list(opt->seeds_spec);
}

void print_record_summary(const RunRecord &record) {
  std::printf("dataset=%s n=%lld p=%lld q=%d clusters=%d inducing=%lld\n",
              record.dataset_name.c_str(),
              static_cast<long long>(record.n), static_cast<long long>(record.p),
              record.resolved_q, record.resolved_clusters,
              static_cast<long long>(record.config.inducing));
  if (record.acc_mean)
    std::printf("acc  mean=%.2f sd=%.2f\n", *record.acc_mean, *record.acc_sd);
  if (record.nmi_mean)
    std::printf("nmi  mean=%.2f sd=%.2f\n", *record.nmi_mean, *record.nmi_sd);
  std::printf("bound mean=%.6g  wall mean=%.3fs\n", record.bound_mean,
              record.wall_time_mean_sec);
  std::printf("run record: %s/run_record.json\n",
              record.config.output_dir.c_str());
}

std::vector<Index> parse_inducing_list(const std::string &spec, Index n) {
  std::vector<Index> out;
  std::size_t at = 0;
  while (at < spec.size()) {
    auto comma = spec.find(',', at);
    if (comma == std::string::npos) comma = spec.size();
    const std::string token = spec.substr(at, comma - at);
    if (token == "N" || token == "n")
      out.push_back(n);
    else
      out.push_back(static_cast<Index>(std::stoll(token)));
    at = comma + 1;
  }
  require(!out.empty(), "empty inducing list");
  return out;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"mixture-of-sparse-GP latent variable clustering"};
  app.require_subcommand(1);

  CliOptions fit_opt;
  CLI::App *fit = app.add_subcommand("fit", "fit the model on one dataset");
  add_fit_options(fit, &fit_opt);

  CliOptions sweep_opt;
  CLI::App *sweep = app.add_subcommand(
      "sweep-inducing", "fit across a list of inducing-point counts");
  add_fit_options(sweep, &sweep_opt);
  sweep
      ->add_option("--inducing-list", sweep_opt.inducing_list,
                   "comma list of counts; N means the dataset size")
      ->required();

  std::string plot_in, plot_out;
  CLI::App *plot = app.add_subcommand("plot", "render an embedding CSV as SVG");
  plot->add_option("--embedding", plot_in, "embedding CSV")->required();
  plot->add_option("--out", plot_out, "output SVG path")->required();

  struct {
    Index n = 15, inducing = 4, p = 3;
    int clusters = 2, q = 2;
    std::uint64_t seed = 0;
    std::string kernel = "rbf";
    bool corrupt = false;
  } gc;
  CLI::App *gradcheck =
      app.add_subcommand("gradcheck", "verify bound gradients by finite differences");
  gradcheck->add_option("--n", gc.n, "data points");
  gradcheck->add_option("--inducing", gc.inducing, "inducing points");
  gradcheck->add_option("--clusters", gc.clusters, "components");
  gradcheck->add_option("--q", gc.q, "latent dimension");
  gradcheck->add_option("--p", gc.p, "observed dimension");
  gradcheck->add_option("--seed", gc.seed, "random seed");
  gradcheck->add_option("--kernel", gc.kernel, "kernel family");
  gradcheck
      ->add_flag("--corrupt-gradient", gc.corrupt,
                 "inject an error into the analytic gradient (self-test)")
      ->group("");  // hidden

  struct {
    std::string kind = "arcs";
    Index n = 60;
    double noise = 0.05;
    std::uint64_t seed = 0;
    std::string out;
  } sy;
  CLI::App *synth = app.add_subcommand("synth", "emit a synthetic dataset CSV");
  synth->add_option("--kind", sy.kind, "arcs|spiral");
  synth->add_option("--n", sy.n, "points per arc / total spiral points");
  synth->add_option("--noise", sy.noise, "spiral noise sd");
  synth->add_option("--seed", sy.seed, "random seed");
  synth->add_option("--out", sy.out, "output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (fit->parsed()) {
      finalize_config(&fit_opt);
      print_record_summary(cmd_fit(fit_opt.config));
    } else if (sweep->parsed()) {
      finalize_config(&sweep_opt);
      const Dataset base = load_experiment_dataset(sweep_opt.config);
      const auto list = parse_inducing_list(sweep_opt.inducing_list, base.n());
      const auto records = cmd_sweep_inducing(sweep_opt.config, list);
      for (const RunRecord &r : records)
        std::printf("inducing=%lld acc=%.2f wall=%.3fs\n",
                    static_cast<long long>(r.config.inducing),
                    r.acc_mean.value_or(0.0), r.wall_time_mean_sec);
      std::printf("summary: %s/summary.csv\n",
                  sweep_opt.config.output_dir.c_str());
    } else if (plot->parsed()) {
      plot_embedding_csv(plot_in, plot_out);
      std::printf("wrote %s\n", plot_out.c_str());
    } else if (gradcheck->parsed()) {
      const GradcheckReport report =
          run_gradcheck(gc.n, gc.inducing, gc.clusters, gc.q, gc.p, gc.seed,
                        kernel_family_from_string(gc.kernel), gc.corrupt);
      std::string worst;
      double worst_err = -1.0;
      for (const auto &b : report.blocks) {
        std::printf("%-14s max rel err %.3e %s\n", b.name.c_str(),
                    b.max_rel_err,
                    b.max_rel_err < report.tolerance ? "ok" : "FAIL");
        if (b.max_rel_err > worst_err) {
          worst_err = b.max_rel_err;
          worst = b.name;
        }
      }
      if (!report.pass) {
        std::printf("gradcheck FAILED, worst block: %s (%.3e)\n",
                    worst.c_str(), worst_err);
        return 1;
      }
      std::printf("gradcheck passed (tolerance %.1e)\n", report.tolerance);
    } else if (synth->parsed()) {
      require(sy.kind == "arcs" || sy.kind == "spiral",
              "unknown synthetic kind: " + sy.kind);
      const Dataset data = sy.kind == "arcs"
                               ? synth_circle_arcs(sy.n, sy.seed)
                               : synth_spiral3d(sy.n, sy.noise, sy.seed);
      save_csv(data, sy.out);
      std::printf("wrote %s (%lld x %lld)\n", sy.out.c_str(),
                  static_cast<long long>(data.n()),
                  static_cast<long long>(data.p()));
    }
  } catch (const NumericalError &err) {
    std::cerr << "numerical failure: " << err.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument &err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitUsage;
  } catch (const std::exception &err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}
