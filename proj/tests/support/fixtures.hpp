// Copyright 2026 The hcglad Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Test-side graph generators and reference computations. Everything here is
// written independently of the library routines it is used to check.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <queue>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "hcglad/graph_io.hpp"
#include "hcglad/tensor.hpp"

namespace fixtures {

using hcglad::Corpus;
using hcglad::Graph;
using hcglad::Matrix;

using Edges = std::vector<std::pair<int, int>>;

inline Edges erdos_renyi_edges(int n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  Edges e;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (coin(rng)) e.emplace_back(u, v);
    }
  }
  return e;
}

/// Random labelled tree: node v > 0 attaches to a uniform earlier node.
inline Edges random_tree_edges(int n, std::mt19937_64& rng) {
  Edges e;
  for (int v = 1; v < n; ++v) {
    std::uniform_int_distribution<int> pick(0, v - 1);
    e.emplace_back(pick(rng), v);
  }
  return e;
}

inline Edges cycle_edges(int n) {
  Edges e;
  for (int v = 0; v < n; ++v) e.emplace_back(v, (v + 1) % n);
  return e;
}

inline Edges complete_edges(int n) {
  Edges e;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) e.emplace_back(u, v);
  }
  return e;
}

inline Edges path_edges(int n) {
  Edges e;
  for (int v = 0; v + 1 < n; ++v) e.emplace_back(v, v + 1);
  return e;
}

/// Normal graphs are sparse trees-with-a-chord (few triangles); anomalies
/// are dense random graphs (many triangles). Anomalies get label 1 and are
/// the minority. Node labels cycle through {0, 1, 2}.
inline Corpus planted_corpus(std::uint64_t seed, int normal = 24, int anomalous = 8) {
  std::mt19937_64 rng(seed);
  Corpus c;
  c.name = "PLANTED";
  std::uniform_int_distribution<int> size(6, 12);
  for (int k = 0; k < normal + anomalous; ++k) {
    const bool anomaly = k >= normal;
    const int n = size(rng);
    Edges e = anomaly ? erdos_renyi_edges(n, 0.7, rng) : random_tree_edges(n, rng);
    if (!anomaly) e.emplace_back(0, n - 1);
    Graph g = hcglad::make_graph(k, n, e, anomaly ? 1 : 0);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) labels[static_cast<std::size_t>(v)] = (v + k) % 3;
    g.node_labels = labels;
    c.graphs.push_back(std::move(g));
  }
  return c;
}

/// Triangles through each ordered edge by explicit enumeration of third
/// vertices.
inline Matrix triangle_counts(const Graph& g) {
  const int n = g.num_nodes();
  auto adj = [&](int a, int b) {
    const auto& nb = g.neighbors[static_cast<std::size_t>(a)];
    return std::binary_search(nb.begin(), nb.end(), b);
  };
  Matrix t = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j || !adj(i, j)) continue;
      for (int k = 0; k < n; ++k) {
        if (k != i && k != j && adj(i, k) && adj(j, k)) t(i, j) += 1.0;
      }
    }
  }
  return t;
}

/// Hop distances by BFS; -1 when unreachable.
inline std::vector<std::vector<int>> all_pairs_hops(const Graph& g) {
  const int n = g.num_nodes();
  std::vector<std::vector<int>> d(static_cast<std::size_t>(n),
                                  std::vector<int>(static_cast<std::size_t>(n), -1));
  for (int s = 0; s < n; ++s) {
    auto& row = d[static_cast<std::size_t>(s)];
    std::queue<int> q;
    row[static_cast<std::size_t>(s)] = 0;
    q.push(s);
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int v : g.neighbors[static_cast<std::size_t>(u)]) {
        if (row[static_cast<std::size_t>(v)] < 0) {
          row[static_cast<std::size_t>(v)] = row[static_cast<std::size_t>(u)] + 1;
          q.push(v);
        }
      }
    }
  }
  return d;
}

/// Central differences of a scalar function of one matrix.
inline Matrix numeric_gradient(const std::function<double(const Matrix&)>& f, Matrix x,
                               double h = 1e-6) {
  Matrix g(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const double orig = x(i, j);
      x(i, j) = orig + h;
      const double fp = f(x);
      x(i, j) = orig - h;
      const double fm = f(x);
      x(i, j) = orig;
      g(i, j) = (fp - fm) / (2.0 * h);
    }
  }
  return g;
}

inline Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng,
                            double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(r, c);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = u(rng);
  return m;
}

inline std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("hcglad_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixtures
