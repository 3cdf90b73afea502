// src/data.cpp

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

#include "sgpmix/data.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace sgpmix {

int Dataset::num_classes() const {
  if (!labels) return 0;
  return static_cast<int>(std::set<int>(labels->begin(), labels->end()).size());
}

namespace {

std::vector<std::string> split_csv_line(const std::string &line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // trim surrounding whitespace
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? ""
                                            : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

bool parse_double(const std::string &s, double *out) {
  if (s.empty()) return false;
  char *end = nullptr;
  *out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Dataset load_csv(const std::string &path, const std::string &label_column) {
  std::ifstream in(path);
  require(in.good(), "cannot open dataset file: " + path);
  const bool want_labels = label_column == "last";
  require(label_column.empty() || want_labels,
          "unsupported label column spec: " + label_column);

  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(split_csv_line(line));
  }
  require(!rows.empty(), "empty dataset file: " + path);

  // Header detection: if any field of the first row fails numeric parsing
  // while later rows parse (label column excluded), treat it as a header.
  std::size_t start = 0;
  {
    const auto &first = rows.front();
    const std::size_t numeric_cols = first.size() - (want_labels ? 1 : 0);
    double tmp;
    bool all_numeric = true;
    for (std::size_t c = 0; c < numeric_cols; ++c)
      all_numeric = all_numeric && parse_double(first[c], &tmp);
    if (!all_numeric) start = 1;
  }
  require(rows.size() > start, "dataset has no data rows: " + path);

  const std::size_t ncols = rows[start].size();
  require(ncols >= (want_labels ? 2u : 1u), "dataset has too few columns");
  const std::size_t pcols = ncols - (want_labels ? 1 : 0);

  Dataset data;
  data.name = path;
  data.y.resize(static_cast<Index>(rows.size() - start),
                static_cast<Index>(pcols));
  std::vector<std::string> raw_labels;
  for (std::size_t r = start; r < rows.size(); ++r) {
    require(rows[r].size() == ncols,
            "ragged CSV row " + std::to_string(r + 1) + " in " + path);
    for (std::size_t c = 0; c < pcols; ++c) {
      double v;
      require(parse_double(rows[r][c], &v),
              "non-numeric field in row " + std::to_string(r + 1) + " of " +
                  path);
      if (!std::isfinite(v))
        throw NumericalError("non-finite value in " + path);
      data.y(static_cast<Index>(r - start), static_cast<Index>(c)) = v;
    }
    if (want_labels) raw_labels.push_back(rows[r].back());
  }
  if (want_labels) {
    std::map<std::string, int> codes;
    for (const auto &s : raw_labels) codes.emplace(s, 0);
    int next = 0;
    for (auto &kv : codes) kv.second = next++;  // lexicographic coding
    std::vector<int> labels;
    labels.reserve(raw_labels.size());
    for (const auto &s : raw_labels) labels.push_back(codes.at(s));
    data.labels = std::move(labels);
  }
  return data;
}

void save_csv(const Dataset &data, const std::string &path) {
  std::ofstream out(path);
  require(out.good(), "cannot write dataset file: " + path);
  for (Index c = 0; c < data.p(); ++c) {
    if (c) out << ",";
    out << "y" << (c + 1);
  }
  if (data.labels) out << ",label";
  out << "\n";
  for (Index r = 0; r < data.n(); ++r) {
    for (Index c = 0; c < data.p(); ++c) {
      if (c) out << ",";
      out << format_double(data.y(r, c));
    }
    if (data.labels) out << "," << (*data.labels)[static_cast<size_t>(r)];
    out << "\n";
  }
}

Matrix standardize_columns(const Eigen::Ref<const Matrix> &y) {
  require(y.rows() >= 2, "standardize_columns: need at least two rows");
  Matrix out = y.rowwise() - y.colwise().mean();
  const double denom = static_cast<double>(y.rows() - 1);
  for (Index c = 0; c < out.cols(); ++c) {
    const double sd = std::sqrt(out.col(c).squaredNorm() / denom);
    if (sd > 0.0) out.col(c) /= sd;
  }
  return out;
}

int pca_variance_dims(const Eigen::Ref<const Matrix> &y, double pct) {
  require(pct > 0.0 && pct <= 100.0, "pca_variance_dims: pct out of (0,100]");
  require(y.cols() >= 2, "pca_variance_dims: need at least two columns");
  require(y.rows() >= 2, "pca_variance_dims: need at least two rows");
  const Matrix centered = y.rowwise() - y.colwise().mean();
  const Matrix cov = centered.transpose() * centered /
                     static_cast<double>(y.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  Vector ev = eig.eigenvalues().reverse();  // descending
  ev = ev.cwiseMax(0.0);
  const double total = ev.sum();
  if (!(total > 0.0))
    throw std::invalid_argument("pca_variance_dims: zero-variance data");
  double acc = 0.0;
  for (Index q = 0; q < ev.size(); ++q) {
    acc += ev(q);
    if (acc / total * 100.0 >= pct - 1e-12) return static_cast<int>(q + 1);
  }
  return static_cast<int>(ev.size());
}

std::vector<Index> select_inducing_rows(Index n, Index n_prime,
                                        std::uint64_t seed) {
  require(n_prime >= 1 && n_prime <= n,
          "select_inducing: n_prime out of [1, N]");
  std::mt19937_64 rng(seed);
  std::vector<Index> idx(static_cast<size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  // Partial Fisher-Yates; std::sample is avoided so the draw is identical
  // across standard library implementations.
  for (Index i = 0; i < n_prime; ++i) {
    std::uniform_int_distribution<Index> pick(i, n - 1);
    std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(pick(rng))]);
  }
  idx.resize(static_cast<size_t>(n_prime));
  return idx;
}

Matrix select_inducing(const Eigen::Ref<const Matrix> &x, Index n_prime,
                       std::uint64_t seed) {
  const auto rows = select_inducing_rows(x.rows(), n_prime, seed);
  Matrix out(n_prime, x.cols());
  for (Index i = 0; i < n_prime; ++i) out.row(i) = x.row(rows[static_cast<size_t>(i)]);
  return out;
}

Dataset synth_spiral3d(Index n, double noise_sd, std::uint64_t seed) {
  require(n >= 1, "synth_spiral3d: n must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  Dataset data;
  data.name = "spiral3d";
  data.y.resize(n, 3);
  std::vector<int> labels(static_cast<size_t>(n));
  const double t_max = 4.0 * kPi;
  constexpr int kSegments = 5;
  for (Index i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0
                            : t_max * static_cast<double>(i) /
                                  static_cast<double>(n - 1);
    data.y(i, 0) = t * std::cos(t);
    data.y(i, 1) = t * std::sin(t);
    data.y(i, 2) = t;
    if (noise_sd > 0.0)
      for (Index c = 0; c < 3; ++c) data.y(i, c) += noise_sd * noise(rng);
    labels[static_cast<size_t>(i)] =
        std::min(kSegments - 1, static_cast<int>(t / (t_max / kSegments)));
  }
  data.labels = std::move(labels);
  return data;
}

Dataset synth_circle_arcs(Index n_per_arc, std::uint64_t seed) {
  require(n_per_arc >= 1, "synth_circle_arcs: n_per_arc must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  constexpr int kArcs = 5;
  constexpr double kRingRadius = 4.0;
  constexpr double kArcRadius = 1.0;
  constexpr double kArcSpan = 5.0 * kPi / 6.0;  // 150 degrees
  constexpr double kJitterSd = 0.02;
  Dataset data;
  data.name = "arcs";
  data.y.resize(kArcs * n_per_arc, 2);
  std::vector<int> labels(static_cast<size_t>(kArcs * n_per_arc));
  Index row = 0;
  for (int arc = 0; arc < kArcs; ++arc) {
    const double phi = 2.0 * kPi * arc / kArcs;
    const double cx = kRingRadius * std::cos(phi);
    const double cy = kRingRadius * std::sin(phi);
    for (Index i = 0; i < n_per_arc; ++i, ++row) {
      const double frac = n_per_arc == 1
                              ? 0.5
                              : static_cast<double>(i) /
                                    static_cast<double>(n_per_arc - 1);
      // arc opens outward, centered on the ring direction
      const double theta = phi + (frac - 0.5) * kArcSpan;
      data.y(row, 0) = cx + kArcRadius * std::cos(theta) + kJitterSd * noise(rng);
      data.y(row, 1) = cy + kArcRadius * std::sin(theta) + kJitterSd * noise(rng);
      labels[static_cast<size_t>(row)] = arc;
    }
  }
  data.labels = std::move(labels);
  return data;
}

}  // namespace sgpmix
