// tests/test_io.cpp

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

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sgpmix/checkpoint.hpp"
#include "sgpmix/experiment.hpp"
#include "sgpmix/svg_plot.hpp"
#include "test_support.hpp"

using namespace sgpmix;
using namespace sgpmix::testing;

namespace {

std::string slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

size_t count_occurrences(const std::string &hay, const std::string &needle) {
  size_t count = 0, at = 0;
  while ((at = hay.find(needle, at)) != std::string::npos) {
    ++count;
    at += needle.size();
  }
  return count;
}

}  // namespace

TEST_CASE("checkpoint round trip is bit-exact") {
  const MixtureInstance inst = random_mixture_instance(9, 4, 3, 2, 5, 131);
  Checkpoint ckpt;
  ckpt.state = inst.state;
  ckpt.observed_dim = 5;
  ckpt.seed = 42;
  ckpt.trace.push_back({1, -123.456789012345678, 88.25});
  ckpt.trace.push_back({2, -120.0, std::nullopt});

  const std::string p1 = "/tmp/sgpmix_ckpt_a.bin";
  const std::string p2 = "/tmp/sgpmix_ckpt_b.bin";
  save_checkpoint(ckpt, p1);
  const Checkpoint back = load_checkpoint(p1);
  save_checkpoint(back, p2);
  CHECK(slurp(p1) == slurp(p2));

  CHECK(back.seed == 42);
  CHECK(back.observed_dim == 5);
  CHECK(back.state.family == inst.state.family);
  CHECK((back.state.x - inst.state.x).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.state.x_u - inst.state.x_u).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.state.log_beta == inst.state.log_beta);
  for (size_t m = 0; m < 3; ++m) {
    CHECK(back.state.kernels[m].log_rbf == inst.state.kernels[m].log_rbf);
    CHECK(back.state.kernels[m].log_white == inst.state.kernels[m].log_white);
  }
  REQUIRE(back.trace.size() == 2);
  CHECK(back.trace[0].kl_corrected == ckpt.trace[0].kl_corrected);
  CHECK(back.trace[0].accuracy == ckpt.trace[0].accuracy);
  CHECK(!back.trace[1].accuracy.has_value());

  CHECK_THROWS(load_checkpoint("/tmp/definitely_not_here.bin"));
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("svg scatter") {
  SUBCASE("four points render four markers") {
    std::vector<EmbeddingPoint> pts = {{0, 0, 0, 0},
                                       {1, 0, 0, 0},
                                       {0, 1, 1, 1},
                                       {1, 1, 1, 1}};
    const std::string svg = render_scatter_svg(pts);
    CHECK(count_occurrences(svg, "class=\"pt\"") == 4);
    CHECK(svg.find("<svg") != std::string::npos);
  }
  SUBCASE("deterministic output") {
    std::vector<EmbeddingPoint> pts = {{0.123, -4.5, 2, 1},
                                       {3.14, 2.71, 0, 0}};
    CHECK(render_scatter_svg(pts) == render_scatter_svg(pts));
  }
  SUBCASE("three label classes give three marker shapes") {
    std::vector<EmbeddingPoint> pts = {{0, 0, 0, 0}, {1, 0, 0, 1},
                                       {2, 0, 0, 2}};
    const std::string svg = render_scatter_svg(pts);
    CHECK(svg.find("<circle") != std::string::npos);
    CHECK(svg.find("<rect class") != std::string::npos);
    CHECK(svg.find("<polygon") != std::string::npos);
  }
  SUBCASE("csv plotting enforces two latent dimensions") {
    const std::string csv = "/tmp/sgpmix_embed.csv";
    {
      std::ofstream out(csv);
      out << "x1,x2,x3,cluster,label\n1,2,3,0,0\n";
    }
    CHECK_THROWS_AS(plot_embedding_csv(csv, "/tmp/sgpmix_embed.svg"),
                    std::invalid_argument);
    {
      std::ofstream out(csv);
      out << "x1,x2,cluster,label\n1,2,0,0\n3,4,1,1\n";
    }
    plot_embedding_csv(csv, "/tmp/sgpmix_embed.svg");
    CHECK(count_occurrences(slurp("/tmp/sgpmix_embed.svg"), "class=\"pt\"") ==
          2);
    std::remove(csv.c_str());
    std::remove("/tmp/sgpmix_embed.svg");
  }
}

TEST_CASE("run records") {
  namespace fs = std::filesystem;
  const std::string dir = "/tmp/sgpmix_runrec_test";
  fs::remove_all(dir);

  ExperimentConfig config;
  config.synth = "arcs";
  config.synth_n = 12;
  config.kernel = KernelFamily::kRbf;
  config.clusters = 5;
  config.q = 2;
  config.inducing = 12;
  config.iterations = 3;
  config.seeds = {1, 2};
  config.output_dir = dir;
  config.threads = 2;

  const RunRecord record = cmd_fit(config);
  CHECK(record.per_seed.size() == 2);
  CHECK(record.resolved_q == 2);
  CHECK(record.resolved_clusters == 5);
  CHECK(fs::exists(dir + "/run_record.json"));
  CHECK(fs::exists(dir + "/seed1_trace.csv"));
  CHECK(fs::exists(dir + "/seed2_embedding.csv"));

  SUBCASE("aggregates recompute from the per-seed entries") {
    double acc = 0.0;
    for (const auto &s : record.per_seed) acc += s.acc.value();
    CHECK(record.acc_mean.value() ==
          doctest::Approx(acc / 2.0).epsilon(1e-12));
  }
  SUBCASE("trace row count equals the iteration count") {
    const std::string trace = slurp(dir + "/seed1_trace.csv");
    CHECK(count_occurrences(trace, "\n") == 4);  // header + 3 iterations
  }
  SUBCASE("reruns reproduce the record and the embeddings exactly") {
    const std::string record_a = record.to_json(false);
    const std::string embed_a = slurp(dir + "/seed1_embedding.csv");
    fs::remove_all(dir);
    const RunRecord again = cmd_fit(config);
    CHECK(again.to_json(false) == record_a);
    CHECK(slurp(dir + "/seed1_embedding.csv") == embed_a);
  }
  fs::remove_all(dir);
}

TEST_CASE("seed list parsing") {
  CHECK(parse_seed_list("1..4") == std::vector<std::uint64_t>{1, 2, 3, 4});
  CHECK(parse_seed_list("7") == std::vector<std::uint64_t>{7});
  CHECK(parse_seed_list("3,1,2") == std::vector<std::uint64_t>{3, 1, 2});
  CHECK_THROWS(parse_seed_list("9..2"));
}
