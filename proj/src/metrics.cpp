// src/metrics.cpp

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

#include "sgpmix/metrics.hpp"

#include <cmath>
#include <map>
#include <utility>

namespace sgpmix {

namespace {

void check_pair(const LabelPair &pair) {
  require(!pair.truth.empty(), "metrics: empty label vectors");
  require(pair.truth.size() == pair.predicted_clusters.size(),
          "metrics: label vectors differ in length");
}

}  // namespace

double clustering_accuracy(const LabelPair &pair) {
  check_pair(pair);
  // counts[cluster][label]
  std::map<int, std::map<int, int>> counts;
  for (std::size_t i = 0; i < pair.truth.size(); ++i)
    ++counts[pair.predicted_clusters[i]][pair.truth[i]];

  std::map<int, int> majority;
  for (const auto &[cluster, by_label] : counts) {
    int best_label = 0, best_count = -1;
    for (const auto &[label, count] : by_label) {
      // std::map iterates labels in increasing order, so strict inequality
      // breaks ties toward the smallest label value.
      if (count > best_count) {
        best_count = count;
        best_label = label;
      }
    }
    majority[cluster] = best_label;
  }

  int correct = 0;
  for (std::size_t i = 0; i < pair.truth.size(); ++i)
    if (majority.at(pair.predicted_clusters[i]) == pair.truth[i]) ++correct;
  return 100.0 * correct / static_cast<double>(pair.truth.size());
}

double nmi(const LabelPair &pair) {
  check_pair(pair);
  const double n = static_cast<double>(pair.truth.size());
  std::map<int, int> truth_counts, cluster_counts;
  std::map<std::pair<int, int>, int> joint_counts;
  for (std::size_t i = 0; i < pair.truth.size(); ++i) {
    ++truth_counts[pair.truth[i]];
    ++cluster_counts[pair.predicted_clusters[i]];
    ++joint_counts[{pair.truth[i], pair.predicted_clusters[i]}];
  }

  double h_truth = 0.0, h_cluster = 0.0;
  for (const auto &[label, count] : truth_counts) {
    const double p = count / n;
    h_truth -= p * std::log(p);
  }
  for (const auto &[cluster, count] : cluster_counts) {
    const double p = count / n;
    h_cluster -= p * std::log(p);
  }

  if (h_truth <= 0.0 && h_cluster <= 0.0) return 100.0;  // both degenerate
  if (h_truth <= 0.0 || h_cluster <= 0.0) return 0.0;

  double mi = 0.0;
  for (const auto &[key, count] : joint_counts) {
    const double p_joint = count / n;
    const double p_truth = truth_counts.at(key.first) / n;
    const double p_cluster = cluster_counts.at(key.second) / n;
    mi += p_joint * std::log(p_joint / (p_truth * p_cluster));
  }
  return 200.0 * mi / (h_truth + h_cluster);
}

}  // namespace sgpmix
