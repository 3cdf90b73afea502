// include/sgpmix/fcm.hpp

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

#ifndef SGPMIX_FCM_HPP_
#define SGPMIX_FCM_HPP_

#include <cstdint>
#include <vector>

#include "sgpmix/common.hpp"

namespace sgpmix {

struct FcmResult {
  Matrix centers;      // M x Q
  Matrix memberships;  // N x M, rows sum to 1
  std::vector<double> objective_trace;  // non-increasing
};

/// Fuzzy c-means by alternating membership/center updates. Centers start
/// from a seeded draw of distinct data rows; iteration stops when the
/// largest center displacement drops below tol. A point coinciding with one
/// or more centers gets its membership split evenly among them.
FcmResult fcm_cluster(const Eigen::Ref<const Matrix> &x, int m_clusters,
                      double fuzzifier, int max_iters, double tol,
                      std::uint64_t seed);

}  // namespace sgpmix

#endif  // SGPMIX_FCM_HPP_
