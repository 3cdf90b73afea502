// include/sgpmix/manifold.hpp

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

#ifndef SGPMIX_MANIFOLD_HPP_
#define SGPMIX_MANIFOLD_HPP_

#include <cstdint>

#include "sgpmix/common.hpp"

namespace sgpmix {

/// Geodesic embedding: symmetric k-NN graph on Euclidean distances,
/// all-pairs shortest paths, then classical MDS on the double-centered
/// squared geodesic matrix. Disconnected graphs are repaired by joining
/// each smaller component to the largest one through their closest
/// inter-component pair. If fewer than q positive eigenvalues exist the
/// remaining coordinates are zero-padded (with a warning on stderr).
Matrix isomap_embed(const Eigen::Ref<const Matrix> &y, int k_neighbors, int q,
                    std::uint64_t seed);

}  // namespace sgpmix

#endif  // SGPMIX_MANIFOLD_HPP_
