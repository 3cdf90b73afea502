// src/manifold.cpp

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

#include "sgpmix/manifold.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <queue>
#include <vector>

namespace sgpmix {

namespace {

struct Edge {
  int to;
  double w;
};

using Graph = std::vector<std::vector<Edge>>;

Matrix pairwise_distances(const Eigen::Ref<const Matrix> &y) {
  const Vector sq = y.rowwise().squaredNorm();
  Matrix d2 = (-2.0 * (y * y.transpose())).colwise() + sq;
  d2.rowwise() += sq.transpose();
  return d2.array().max(0.0).sqrt().matrix();
}

void add_edge(Graph &g, int a, int b, double w) {
  for (const Edge &e : g[static_cast<size_t>(a)])
    if (e.to == b) return;
  g[static_cast<size_t>(a)].push_back({b, w});
  g[static_cast<size_t>(b)].push_back({a, w});
}

std::vector<int> components(const Graph &g) {
  const int n = static_cast<int>(g.size());
  std::vector<int> comp(static_cast<size_t>(n), -1);
  int next = 0;
  for (int s = 0; s < n; ++s) {
    if (comp[static_cast<size_t>(s)] >= 0) continue;
    std::vector<int> stack{s};
    comp[static_cast<size_t>(s)] = next;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (const Edge &e : g[static_cast<size_t>(u)])
        if (comp[static_cast<size_t>(e.to)] < 0) {
          comp[static_cast<size_t>(e.to)] = next;
          stack.push_back(e.to);
        }
    }
    ++next;
  }
  return comp;
}

// Binary-heap Dijkstra from one source.
void dijkstra(const Graph &g, int source, Vector *dist) {
  const double inf = std::numeric_limits<double>::infinity();
  dist->setConstant(inf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  (*dist)(source) = 0.0;
  heap.push({0.0, source});
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > (*dist)(u)) continue;
    for (const Edge &e : g[static_cast<size_t>(u)]) {
      const double nd = d + e.w;
      if (nd < (*dist)(e.to)) {
        (*dist)(e.to) = nd;
        heap.push({nd, e.to});
      }
    }
  }
}

}  // namespace

Matrix isomap_embed(const Eigen::Ref<const Matrix> &y, int k_neighbors, int q,
                    std::uint64_t /*seed*/) {
  require(k_neighbors >= 1, "isomap_embed: k_neighbors must be positive");
  require(q >= 1, "isomap_embed: q must be positive");
  const int n = static_cast<int>(y.rows());
  require(n >= 2, "isomap_embed: need at least two points");
  const Matrix dist = pairwise_distances(y);

  // Symmetric k-NN graph (union of directed neighborhoods).
  Graph g(static_cast<size_t>(n));
  const int k = std::min(k_neighbors, n - 1);
  std::vector<int> order(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::iota(order.begin(), order.end(), 0);
    std::nth_element(order.begin(), order.begin() + k, order.end(),
                     [&](int a, int b) {
                       if (a == i) return false;
                       if (b == i) return true;
                       if (dist(i, a) != dist(i, b))
                         return dist(i, a) < dist(i, b);
                       return a < b;
                     });
    for (int j = 0; j < k; ++j) {
      const int nb = order[static_cast<size_t>(j)];
      if (nb != i) add_edge(g, i, nb, dist(i, nb));
    }
  }

  // Repair disconnected graphs: attach every smaller component to the
  // largest through the closest inter-component pair.
  {
    std::vector<int> comp = components(g);
    const int n_comp = 1 + *std::max_element(comp.begin(), comp.end());
    if (n_comp > 1) {
      std::vector<int> size(static_cast<size_t>(n_comp), 0);
      for (int c : comp) ++size[static_cast<size_t>(c)];
      const int main_comp = static_cast<int>(std::distance(
          size.begin(), std::max_element(size.begin(), size.end())));
      for (int c = 0; c < n_comp; ++c) {
        if (c == main_comp) continue;
        double best = std::numeric_limits<double>::infinity();
        int bi = -1, bj = -1;
        for (int i = 0; i < n; ++i) {
          if (comp[static_cast<size_t>(i)] != c) continue;
          for (int j = 0; j < n; ++j) {
            if (comp[static_cast<size_t>(j)] != main_comp) continue;
            if (dist(i, j) < best) {
              best = dist(i, j);
              bi = i;
              bj = j;
            }
          }
        }
        add_edge(g, bi, bj, best);
      }
    }
  }

  // All-pairs geodesics.
  Matrix geo(n, n);
  {
    Vector d(n);
    for (int s = 0; s < n; ++s) {
      dijkstra(g, s, &d);
      geo.row(s) = d.transpose();
    }
  }
  if (!geo.allFinite())
    throw NumericalError("isomap_embed: graph still disconnected");

  // Classical MDS on the squared geodesic matrix.
  const Matrix d2 = geo.array().square().matrix();
  const Vector row_mean = d2.rowwise().mean();
  const double grand_mean = row_mean.mean();
  Matrix b = -0.5 * d2;
  b.colwise() += 0.5 * row_mean;
  b.rowwise() += 0.5 * row_mean.transpose();
  b.array() -= 0.5 * grand_mean;

  Eigen::SelfAdjointEigenSolver<Matrix> eig(b);
  Matrix embedding = Matrix::Zero(n, q);
  // eigenvalues that should be zero come out as rounding noise; anything
  // below this share of the leading eigenvalue counts as non-positive
  const double ev_floor = std::max(0.0, eig.eigenvalues()(n - 1)) * 1e-12;
  int filled = 0;
  for (int r = 0; r < q && r < n; ++r) {
    const Index idx = static_cast<Index>(n - 1 - r);  // descending order
    const double ev = eig.eigenvalues()(idx);
    if (ev <= ev_floor) break;
    Vector col = eig.eigenvectors().col(idx) * std::sqrt(ev);
    // canonical sign: largest-magnitude coordinate is positive
    Index arg = 0;
    col.cwiseAbs().maxCoeff(&arg);
    if (col(arg) < 0.0) col = -col;
    embedding.col(r) = col;
    ++filled;
  }
  if (filled < q)
    std::cerr << "isomap_embed: only " << filled
              << " positive eigenvalues; padding " << (q - filled)
              << " coordinate(s) with zeros\n";
  return embedding;
}

}  // namespace sgpmix
