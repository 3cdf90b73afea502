// include/sgpmix/metrics.hpp

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

#ifndef SGPMIX_METRICS_HPP_
#define SGPMIX_METRICS_HPP_

#include <vector>

#include "sgpmix/common.hpp"

namespace sgpmix {

struct LabelPair {
  std::vector<int> truth;
  std::vector<int> predicted_clusters;
};

/// Majority-label clustering accuracy in [0, 100]: every cluster is mapped
/// to its most frequent true label (ties resolved to the smallest label
/// value), then the fraction of matching points is scaled by 100.
double clustering_accuracy(const LabelPair &pair);

/// Normalized mutual information scaled to [0, 100]:
/// 200 * I(truth; clusters) / (H(truth) + H(clusters)) with natural-log
/// entropies. If exactly one partition is degenerate (single value) the
/// score is 0; if both are, the partitions agree trivially and the score
/// is 100.
double nmi(const LabelPair &pair);

}  // namespace sgpmix

#endif  // SGPMIX_METRICS_HPP_
