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

// Triangle-motif hypergraphs.
//
// Hyperedges come from three sources:
//   1. for each node i with triangle-supported edges, the set {i} plus
//      every j with relation(i, j) > 0;
//   2. identical vertex sets from (1) collapse to one hyperedge;
//   3. every edge carried by no triangle becomes a 2-node hyperedge.
// Single-vertex hyperedges are dropped, except that a 1-node graph gets a
// self-hyperedge so the convolution stays defined.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "hcglad/error.hpp"
#include "hcglad/graph_io.hpp"
#include "hcglad/tensor.hpp"

namespace hcglad {

inline void require_simple_adjacency(const Matrix& a) {
  if (a.rows() != a.cols()) {
    fail(ErrorKind::kPrecondition,
         "adjacency must be square, got " + shape_string(a));
  }
  for (Index i = 0; i < a.rows(); ++i) {
    if (a(i, i) != 0.0) {
      fail(ErrorKind::kPrecondition,
           "adjacency has a self loop at node " + std::to_string(i));
    }
    for (Index j = i + 1; j < a.cols(); ++j) {
      if (a(i, j) != a(j, i)) {
        fail(ErrorKind::kPrecondition,
             "adjacency is not symmetric at (" + std::to_string(i) + ", " +
                 std::to_string(j) + ")");
      }
      if (a(i, j) != 0.0 && a(i, j) != 1.0) {
        fail(ErrorKind::kPrecondition, "adjacency entries must be 0 or 1");
      }
    }
  }
}

/// (A A) ⊙ A: entry (i, j) counts the triangles through edge (i, j).
inline Matrix relation_matrix(const Matrix& a) {
  require_simple_adjacency(a);
  return (a * a).cwiseProduct(a);
}

struct Hypergraph {
  int num_vertices = 0;
  /// Member vertices of each hyperedge, sorted; column order of `incidence`.
  std::vector<std::vector<int>> hyperedges;
  Matrix incidence;               // N x M, 0/1
  Eigen::VectorXd vertex_degrees;     // D_ii = sum_e W_ee H_ie
  Eigen::VectorXd hyperedge_degrees;  // B_ee = sum_i H_ie
  Eigen::VectorXd hyperedge_weights;  // W_ee, identity
  std::vector<bool> isolated;     // vertex in no hyperedge
  std::size_t motif_hyperedges = 0;
  std::size_t pairwise_hyperedges = 0;

  int num_hyperedges() const { return static_cast<int>(hyperedges.size()); }
};

inline Hypergraph build_hypergraph(const Matrix& a) {
  const Matrix rel = relation_matrix(a);
  const int n = static_cast<int>(a.rows());

  std::set<std::vector<int>> motif;
  for (int i = 0; i < n; ++i) {
    std::vector<int> members{i};
    for (int j = 0; j < n; ++j) {
      if (j != i && rel(i, j) > 0.0) members.push_back(j);
    }
    if (members.size() < 2) continue;
    std::sort(members.begin(), members.end());
    motif.insert(std::move(members));
  }
  std::vector<std::vector<int>> pairwise;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (a(u, v) != 0.0 && rel(u, v) == 0.0) pairwise.push_back({u, v});
    }
  }

  Hypergraph hg;
  hg.num_vertices = n;
  hg.motif_hyperedges = motif.size();
  hg.pairwise_hyperedges = pairwise.size();
  hg.hyperedges.assign(motif.begin(), motif.end());
  hg.hyperedges.insert(hg.hyperedges.end(), pairwise.begin(), pairwise.end());
  if (n == 1) hg.hyperedges.push_back({0});
  std::sort(hg.hyperedges.begin(), hg.hyperedges.end(),
            [](const std::vector<int>& x, const std::vector<int>& y) {
              if (x.front() != y.front()) return x.front() < y.front();
              if (x.size() != y.size()) return x.size() < y.size();
              return x < y;
            });

  const int m = hg.num_hyperedges();
  hg.incidence = Matrix::Zero(n, m);
  hg.hyperedge_weights = Eigen::VectorXd::Ones(m);
  hg.hyperedge_degrees = Eigen::VectorXd::Zero(m);
  for (int e = 0; e < m; ++e) {
    for (int v : hg.hyperedges[e]) hg.incidence(v, e) = 1.0;
    hg.hyperedge_degrees(e) = static_cast<double>(hg.hyperedges[e].size());
  }
  hg.vertex_degrees = hg.incidence * hg.hyperedge_weights;
  hg.isolated.resize(n);
  for (int v = 0; v < n; ++v) hg.isolated[v] = hg.vertex_degrees(v) == 0.0;
  return hg;
}

inline Hypergraph build_hypergraph(const Graph& g) {
  return build_hypergraph(g.adjacency());
}

/// D^-1/2 H W B^-1 H^T D^-1/2. Isolated vertices get a zero row and column.
inline Matrix hypergraph_operator(const Hypergraph& hg) {
  const int n = hg.num_vertices;
  Eigen::VectorXd dinv(n);
  for (int v = 0; v < n; ++v) {
    const double d = hg.vertex_degrees(v);
    dinv(v) = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
  }
  Eigen::VectorXd edge_scale =
      hg.hyperedge_weights.cwiseQuotient(hg.hyperedge_degrees);
  Matrix left = dinv.asDiagonal() * hg.incidence;
  return left * edge_scale.asDiagonal() * left.transpose();
}

/// D̂^-1/2 (A + I) D̂^-1/2.
inline Matrix gcn_operator(const Graph& g) {
  const int n = g.num_nodes();
  Matrix op = g.adjacency() + Matrix::Identity(n, n);
  Eigen::VectorXd dinv(n);
  for (int v = 0; v < n; ++v) dinv(v) = 1.0 / std::sqrt(g.degree(v) + 1.0);
  return dinv.asDiagonal() * op * dinv.asDiagonal();
}

struct MotifStats {
  int graph_id = 0;
  int n = 0;
  std::size_t edges = 0;
  std::size_t triangles = 0;
  std::size_t motif_hyperedges = 0;
  std::size_t pairwise_hyperedges = 0;
};

inline MotifStats motif_stats(const Graph& g) {
  const Matrix a = g.adjacency();
  const Matrix rel = relation_matrix(a);
  const Hypergraph hg = build_hypergraph(a);
  MotifStats s;
  s.graph_id = g.id;
  s.n = g.num_nodes();
  s.edges = g.num_edges();
  // Each triangle contributes 1 to six ordered edge entries.
  s.triangles = static_cast<std::size_t>(std::llround(rel.sum() / 6.0));
  s.motif_hyperedges = hg.motif_hyperedges;
  s.pairwise_hyperedges = hg.pairwise_hyperedges;
  return s;
}

}  // namespace hcglad
