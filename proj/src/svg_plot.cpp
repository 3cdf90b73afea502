// src/svg_plot.cpp

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

#include "sgpmix/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace sgpmix {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 480;
constexpr double kMarkerSize = 4.0;

const char *const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                "#bcbd22", "#17becf"};
constexpr int kPaletteSize = 10;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// shape index cycles: circle, square, triangle, diamond, cross
void emit_marker(std::ostringstream &out, int shape, double cx, double cy,
                 const std::string &color) {
  const double s = kMarkerSize;
  switch (shape % 5) {
    case 0:
      out << "<circle class=\"pt\" cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy)
          << "\" r=\"" << fmt(s) << "\" fill=\"" << color << "\"/>\n";
      break;
    case 1:
      out << "<rect class=\"pt\" x=\"" << fmt(cx - s) << "\" y=\""
          << fmt(cy - s) << "\" width=\"" << fmt(2 * s) << "\" height=\""
          << fmt(2 * s) << "\" fill=\"" << color << "\"/>\n";
      break;
    case 2:
      out << "<polygon class=\"pt\" points=\"" << fmt(cx) << "," << fmt(cy - s)
          << " " << fmt(cx - s) << "," << fmt(cy + s) << " " << fmt(cx + s)
          << "," << fmt(cy + s) << "\" fill=\"" << color << "\"/>\n";
      break;
    case 3:
      out << "<polygon class=\"pt\" points=\"" << fmt(cx) << "," << fmt(cy - s)
          << " " << fmt(cx + s) << "," << fmt(cy) << " " << fmt(cx) << ","
          << fmt(cy + s) << " " << fmt(cx - s) << "," << fmt(cy)
          << "\" fill=\"" << color << "\"/>\n";
      break;
    default:
      out << "<path class=\"pt\" d=\"M" << fmt(cx - s) << " " << fmt(cy - s)
          << "L" << fmt(cx + s) << " " << fmt(cy + s) << "M" << fmt(cx - s)
          << " " << fmt(cy + s) << "L" << fmt(cx + s) << " " << fmt(cy - s)
          << "\" stroke=\"" << color << "\" stroke-width=\"2\" fill=\"none\"/>\n";
      break;
  }
}

}  // namespace

std::string render_scatter_svg(const std::vector<EmbeddingPoint> &points) {
  require(!points.empty(), "render_scatter_svg: no points");
  double xmin = points[0].x, xmax = points[0].x;
  double ymin = points[0].y, ymax = points[0].y;
  for (const auto &p : points) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const double xpad = (xmax - xmin) > 0 ? 0.05 * (xmax - xmin) : 1.0;
  const double ypad = (ymax - ymin) > 0 ? 0.05 * (ymax - ymin) : 1.0;
  xmin -= xpad;
  xmax += xpad;
  ymin -= ypad;
  ymax += ypad;

  std::map<int, int> label_shape;  // stable shape per distinct label
  for (const auto &p : points)
    if (p.label) label_shape.emplace(*p.label, 0);
  int next_shape = 0;
  for (auto &kv : label_shape) kv.second = next_shape++;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n";
  for (const auto &p : points) {
    const double cx = (p.x - xmin) / (xmax - xmin) * kWidth;
    const double cy = kHeight - (p.y - ymin) / (ymax - ymin) * kHeight;
    const std::string color =
        kPalette[((p.cluster % kPaletteSize) + kPaletteSize) % kPaletteSize];
    const int shape = p.label ? label_shape.at(*p.label) : 0;
    emit_marker(out, shape, cx, cy, color);
  }
  out << "</svg>\n";
  return out.str();
}

void plot_embedding_csv(const std::string &csv_path,
                        const std::string &svg_path) {
  std::ifstream in(csv_path);
  require(in.good(), "cannot open embedding file: " + csv_path);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)),
          "empty embedding file: " + csv_path);
  // header must be exactly two latent columns: x1,x2,cluster[,label]
  {
    std::stringstream hs(line);
    std::vector<std::string> cols;
    std::string c;
    while (std::getline(hs, c, ',')) cols.push_back(c);
    const bool two_latent =
        cols.size() >= 3 && cols[0] == "x1" && cols[1] == "x2" &&
        cols[2] == "cluster";
    require(two_latent, "plot needs a 2-D embedding (header x1,x2,cluster)");
  }
  std::vector<EmbeddingPoint> points;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string field;
    EmbeddingPoint p;
    std::getline(ls, field, ',');
    p.x = std::stod(field);
    std::getline(ls, field, ',');
    p.y = std::stod(field);
    std::getline(ls, field, ',');
    p.cluster = std::stoi(field);
    if (std::getline(ls, field, ',') && !field.empty())
      p.label = std::stoi(field);
    points.push_back(p);
  }
  std::ofstream out(svg_path);
  require(out.good(), "cannot write svg: " + svg_path);
  out << render_scatter_svg(points);
}

}  // namespace sgpmix
