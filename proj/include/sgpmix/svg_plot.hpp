// include/sgpmix/svg_plot.hpp

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

#ifndef SGPMIX_SVG_PLOT_HPP_
#define SGPMIX_SVG_PLOT_HPP_

#include <optional>
#include <string>
#include <vector>

#include "sgpmix/common.hpp"

namespace sgpmix {

struct EmbeddingPoint {
  double x = 0.0;
  double y = 0.0;
  int cluster = 0;
  std::optional<int> label;
};

/// Self-contained scatter plot: marker shape encodes the true label (when
/// present), fill color the assigned cluster. Axes autoscale with a 5%
/// margin. Output is deterministic for identical input.
std::string render_scatter_svg(const std::vector<EmbeddingPoint> &points);

/// Reads an embedding CSV (header x1,x2,cluster,label) and writes the SVG.
/// Only 2-D embeddings can be plotted; anything else is rejected.
void plot_embedding_csv(const std::string &csv_path,
                        const std::string &svg_path);

}  // namespace sgpmix

#endif  // SGPMIX_SVG_PLOT_HPP_
