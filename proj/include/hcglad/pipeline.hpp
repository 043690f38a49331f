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

// One forward pass over a batch: both views through both channels, node and
// graph-level contrast per channel, and the weighted total.

#pragma once

#include <array>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hcglad/contrast.hpp"
#include "hcglad/encoders.hpp"
#include "hcglad/graph_io.hpp"
#include "hcglad/motif_hypergraph.hpp"
#include "hcglad/tensor.hpp"
#include "hcglad/views.hpp"

namespace hcglad {

/// Everything the encoders need from one graph, computed once up front:
/// both view feature matrices and both channel operators.
struct PreparedGraph {
  int id = 0;
  int label = 0;
  Index num_nodes = 0;
  std::array<Matrix, 2> features;   // [view]
  std::array<Matrix, 2> operators;  // [channel]
};

inline PreparedGraph prepare_graph(const Graph& g, const FeatureOptions& features,
                                   int walk_length) {
  PreparedGraph p;
  p.id = g.id;
  p.label = g.label;
  p.num_nodes = g.num_nodes();
  p.features[0] = build_view1(g, derive_base_features(g, features)).features;
  p.features[1] = build_view2(g, walk_length).features;
  p.operators[0] = gcn_operator(g);
  // Both views share adjacency, so one hypergraph serves both.
  p.operators[1] = hypergraph_operator(build_hypergraph(g));
  return p;
}

inline std::vector<PreparedGraph> prepare_corpus(const Corpus& c,
                                                 const FeatureOptions& features,
                                                 int walk_length) {
  std::vector<PreparedGraph> out;
  out.reserve(c.size());
  for (const auto& g : c.graphs) out.push_back(prepare_graph(g, features, walk_length));
  return out;
}

/// Stacked rows of a batch of prepared graphs.
struct BatchInput {
  std::vector<int> graph_ids;
  std::vector<Index> sizes;
  std::array<Matrix, 2> features;                // [view], stacked rows
  std::array<std::vector<Matrix>, 2> operators;  // [channel][graph]
};

inline BatchInput assemble_batch(std::span<const PreparedGraph* const> graphs) {
  if (graphs.empty()) fail(ErrorKind::kBatch, "cannot assemble an empty batch");
  BatchInput b;
  Index total = 0;
  for (const auto* g : graphs) {
    b.graph_ids.push_back(g->id);
    b.sizes.push_back(g->num_nodes);
    total += g->num_nodes;
  }
  for (int v = 0; v < 2; ++v) {
    const Index width = graphs.front()->features[v].cols();
    b.features[v].resize(total, width);
    Index off = 0;
    for (const auto* g : graphs) {
      if (g->features[v].cols() != width) {
        fail(ErrorKind::kDimension,
             "graph " + std::to_string(g->id) + " has view" + std::to_string(v + 1) +
                 " width " + std::to_string(g->features[v].cols()) +
                 ", batch expects " + std::to_string(width));
      }
      b.features[v].middleRows(off, g->num_nodes) = g->features[v];
      off += g->num_nodes;
    }
  }
  for (int c = 0; c < 2; ++c) {
    for (const auto* g : graphs) b.operators[c].push_back(g->operators[c]);
  }
  return b;
}

inline BatchInput assemble_batch(const std::vector<PreparedGraph>& prepared,
                                 std::span<const int> ids) {
  std::vector<const PreparedGraph*> ptrs;
  ptrs.reserve(ids.size());
  for (int id : ids) ptrs.push_back(&prepared.at(static_cast<std::size_t>(id)));
  return assemble_batch(ptrs);
}

struct BatchForward {
  Tensor total;
  BatchLossReport report;
  /// Node embeddings per [channel][view], kept for inspection.
  std::array<std::array<Tensor, 2>, 2> embeddings;
  std::size_t singleton_graphs = 0;
};

inline BatchForward forward_batch(Tape& tape, const BatchInput& batch,
                                  const EncoderParams& params,
                                  const ContrastConfig& contrast) {
  contrast.validate();
  const Manifold m = params.config.manifold;
  const std::array<double, 2> lambda{contrast.lambda1, contrast.lambda2};
  BatchForward out;
  out.report.graph_ids = batch.graph_ids;
  std::array<Tensor, 2> channel_loss;
  for (int c = 0; c < 2; ++c) {
    const std::size_t b = batch.graph_ids.size();
    if (lambda[c] == 0.0) {
      // A zero-weight channel contributes nothing to loss, gradient or score.
      out.report.node_parts[c].assign(b, 0.0);
      out.report.graph_parts[c].assign(b, 0.0);
      channel_loss[c] = Tensor::scalar(0.0);
      continue;
    }
    std::array<Tensor, 2> node_z, graph_z;
    for (int v = 0; v < 2; ++v) {
      Tensor emb = propagate(tape, batch.features[v], batch.operators[c],
                             params.layers[c][v], params.config);
      out.embeddings[c][v] = emb;
      node_z[v] = project_head(tape, emb, params.node_heads[c], m);
      graph_z[v] = project_head(tape, pool_graph(tape, emb, batch.sizes, m),
                                params.graph_heads[c], m);
    }
    LevelLoss node = node_level_loss(tape, node_z[0], node_z[1], batch.sizes,
                                     contrast.tau, m);
    LevelLoss graph = graph_level_loss(tape, graph_z[0], graph_z[1], contrast.tau, m);
    out.singleton_graphs = node.singleton_graphs;
    out.report.node_parts[c] = node.per_graph;
    out.report.graph_parts[c] = graph.per_graph;
    out.report.node_loss[c] = node.loss.item();
    out.report.graph_loss[c] = graph.loss.item();
    channel_loss[c] = combine(tape, node.loss, graph.loss, contrast.xi1, contrast.xi2);
  }
  out.total = total_loss(tape, channel_loss[0], channel_loss[1], contrast.lambda1,
                         contrast.lambda2);
  out.report.total = out.total.item();
  return out;
}

}  // namespace hcglad
