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

#pragma once

#include <string>
#include <utility>

#include "hcglad/error.hpp"
#include "hcglad/graph_io.hpp"
#include "hcglad/tensor.hpp"

namespace hcglad {

enum class ViewTag { kAttribute = 0, kStructure = 1 };

/// Node features of one augmented view. Views never edit structure: both
/// views of a graph point at the same source graph.
struct GraphView {
  ViewTag tag = ViewTag::kAttribute;
  Matrix features;
  const Graph* source = nullptr;

  const Graph& graph() const { return *source; }
  int num_nodes() const { return static_cast<int>(features.rows()); }
};

/// Attribute-centric view: the base features as they are.
inline GraphView build_view1(const Graph& g, Matrix base_features) {
  if (base_features.rows() != g.num_nodes()) {
    fail(ErrorKind::kDimension,
         "base features have " + std::to_string(base_features.rows()) +
             " rows for a graph of " + std::to_string(g.num_nodes()) + " nodes");
  }
  return GraphView{ViewTag::kAttribute, std::move(base_features), &g};
}

/// Row-stochastic random-walk matrix D^-1 A; isolated nodes get zero rows.
inline Matrix random_walk_matrix(const Graph& g) {
  const int n = g.num_nodes();
  Matrix p = Matrix::Zero(n, n);
  for (int u = 0; u < n; ++u) {
    const auto& nb = g.neighbors[u];
    if (nb.empty()) continue;
    const double w = 1.0 / static_cast<double>(nb.size());
    for (int v : nb) p(u, v) = w;
  }
  return p;
}

/// Structure-centric view: column k-1 holds the k-step random-walk return
/// probability diag(P^k), k = 1..walk_length.
inline GraphView build_view2(const Graph& g, int walk_length) {
  if (walk_length < 1) {
    fail(ErrorKind::kConfig, "walk_length must be >= 1, got " +
                                 std::to_string(walk_length));
  }
  const int n = g.num_nodes();
  const Matrix p = random_walk_matrix(g);
  Matrix features(n, walk_length);
  Matrix power = p;
  for (int k = 0; k < walk_length; ++k) {
    if (k > 0) power = (power * p).eval();
    features.col(k) = power.diagonal();
  }
  return GraphView{ViewTag::kStructure, std::move(features), &g};
}

}  // namespace hcglad
