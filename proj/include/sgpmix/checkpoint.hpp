// include/sgpmix/checkpoint.hpp

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

#ifndef SGPMIX_CHECKPOINT_HPP_
#define SGPMIX_CHECKPOINT_HPP_

#include <string>
#include <vector>

#include "sgpmix/mixture.hpp"

namespace sgpmix {

/// Self-describing binary model archive; see docs/checkpoint_format.md for
/// the byte layout. Save followed by load is bit-exact.
struct Checkpoint {
  ModelState state;
  Index observed_dim = 0;  // P
  std::uint64_t seed = 0;
  std::vector<TracePoint> trace;
};

void save_checkpoint(const Checkpoint &ckpt, const std::string &path);
Checkpoint load_checkpoint(const std::string &path);

}  // namespace sgpmix

#endif  // SGPMIX_CHECKPOINT_HPP_
