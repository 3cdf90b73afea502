// include/sgpmix/data.hpp

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

#ifndef SGPMIX_DATA_HPP_
#define SGPMIX_DATA_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sgpmix/common.hpp"

namespace sgpmix {

/// Observed data matrix plus optional ground-truth labels. Labels are only
/// ever consumed by the evaluation metrics, never by the model.
struct Dataset {
  Matrix y;                          // N x P
  std::optional<std::vector<int>> labels;  // length N when present
  std::string name;

  Index n() const { return y.rows(); }
  Index p() const { return y.cols(); }
  int num_classes() const;
};

/// Reads a numeric CSV (comma delimiter, optional header row, UTF-8).
/// When label_column is "last" the final column holds labels; label strings
/// are mapped to integer codes in lexicographic order so runs are
/// reproducible regardless of row order. Empty label_column means
/// "no labels". Throws std::invalid_argument on unreadable files or
/// malformed rows, NumericalError on non-finite entries.
Dataset load_csv(const std::string &path, const std::string &label_column);

/// Writes y (and labels, when present) back out with full double precision,
/// producing byte-identical files for identical inputs.
void save_csv(const Dataset &data, const std::string &path);

/// Shifts every column to zero mean and rescales to unit sample variance.
/// Zero-variance columns are centered but left unscaled.
Matrix standardize_columns(const Eigen::Ref<const Matrix> &y);

/// Smallest Q such that the top-Q covariance eigenvalues of the
/// column-centered data account for at least pct percent of the total
/// variance.
int pca_variance_dims(const Eigen::Ref<const Matrix> &y, double pct);

/// Uniform sample of n_prime distinct rows of x under the seeded generator.
Matrix select_inducing(const Eigen::Ref<const Matrix> &x, Index n_prime,
                       std::uint64_t seed);
std::vector<Index> select_inducing_rows(Index n, Index n_prime,
                                        std::uint64_t seed);

/// Noisy 3-D spiral (t cos t, t sin t, t), t equally spaced over [0, 4pi],
/// labeled by equal angular segments.
Dataset synth_spiral3d(Index n, double noise_sd, std::uint64_t seed);

/// Five non-overlapping circular arcs in the plane, one label per arc,
/// lightly jittered so the points are not exactly on the curves.
Dataset synth_circle_arcs(Index n_per_arc, std::uint64_t seed);

}  // namespace sgpmix

#endif  // SGPMIX_DATA_HPP_
