// include/sgpmix/common.hpp

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

#ifndef SGPMIX_COMMON_HPP_
#define SGPMIX_COMMON_HPP_

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace sgpmix {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Raised when a computation goes numerically bad (singular kernel matrix,
/// non-finite bound, responsibility underflow). The CLI maps this to exit
/// code 3, as opposed to usage errors (std::invalid_argument, exit code 2).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string &what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string &msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLog2Pi = 1.8378770664093454836;

}  // namespace sgpmix

#endif  // SGPMIX_COMMON_HPP_
