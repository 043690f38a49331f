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

// Hyperbolic graph and hypergraph encoders.
//
// Both channels share one shape: lift the view features onto the
// hyperboloid at the origin, map back to the origin tangent space, run L
// propagation layers sigma(Op · H · W), then exp-map the result at the
// origin. The channels differ only in Op: the symmetric-normalized
// adjacency with self loops (graph) or the hypergraph mixing operator.
//
// All manifold <-> tangent transitions are anchored at the origin. With
// Manifold::kFlat every map is the identity and embeddings stay Euclidean;
// that variant exists for ablations.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hcglad/error.hpp"
#include "hcglad/graph_io.hpp"
#include "hcglad/motif_hypergraph.hpp"
#include "hcglad/random.hpp"
#include "hcglad/tensor.hpp"
#include "hcglad/views.hpp"

namespace hcglad {

enum class Channel { kGraph = 0, kHypergraph = 1 };
enum class Manifold { kLorentz, kFlat };

inline std::string channel_name(Channel c) {
  return c == Channel::kGraph ? "graph" : "hypergraph";
}
inline std::string view_name(ViewTag v) {
  return v == ViewTag::kAttribute ? "view1" : "view2";
}

struct EncoderConfig {
  int num_layers = 2;
  int hidden_dim = 16;
  int mlp_layers = 2;
  bool final_activation = true;
  Manifold manifold = Manifold::kLorentz;
};

/// Projection head: mlp_layers affine maps with relu between them.
struct Head {
  std::vector<Tensor> weights;
  std::vector<Tensor> biases;
};

struct NamedParameter {
  std::string name;
  Tensor tensor;
};

/// Trainable state. Each (channel, view) pair owns its propagation weights
/// because the two views have different input widths; projection heads are
/// per (channel, level) and shared by both views.
struct EncoderParams {
  EncoderConfig config;
  std::array<Index, 2> input_dims{0, 0};
  std::array<std::array<std::vector<Tensor>, 2>, 2> layers;
  std::array<Head, 2> node_heads;
  std::array<Head, 2> graph_heads;

  static EncoderParams init(const EncoderConfig& config, Index view1_dim,
                            Index view2_dim, std::uint64_t seed) {
    if (config.num_layers < 1 || config.hidden_dim < 1 || config.mlp_layers < 1) {
      fail(ErrorKind::kConfig, "encoder depth, width and head depth must be >= 1");
    }
    if (view1_dim < 1 || view2_dim < 1) {
      fail(ErrorKind::kConfig, "view feature widths must be >= 1");
    }
    EncoderParams p;
    p.config = config;
    p.input_dims = {view1_dim, view2_dim};
    Rng rng = make_rng(seed, "init");
    const Index h = config.hidden_dim;
    auto glorot = [&rng](Index fan_in, Index fan_out) {
      const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
      Matrix w(fan_in, fan_out);
      for (Index i = 0; i < w.size(); ++i) {
        w.data()[i] = uniform_real(rng, -bound, bound);
      }
      return Tensor::parameter(std::move(w));
    };
    for (int c = 0; c < 2; ++c) {
      for (int v = 0; v < 2; ++v) {
        Index in = p.input_dims[v];
        for (int l = 0; l < config.num_layers; ++l) {
          p.layers[c][v].push_back(glorot(in, h));
          in = h;
        }
      }
      for (Head* head : {&p.node_heads[c], &p.graph_heads[c]}) {
        for (int l = 0; l < config.mlp_layers; ++l) {
          head->weights.push_back(glorot(h, h));
          head->biases.push_back(Tensor::parameter(Matrix::Zero(1, h)));
        }
      }
    }
    return p;
  }

  /// Stable order: channel, then encoder layers per view, then heads.
  std::vector<NamedParameter> named_parameters() const {
    std::vector<NamedParameter> out;
    for (int c = 0; c < 2; ++c) {
      const std::string ch = channel_name(static_cast<Channel>(c));
      const char* sym = c == 0 ? "W" : "P";
      for (int v = 0; v < 2; ++v) {
        const std::string vw = view_name(static_cast<ViewTag>(v));
        for (std::size_t l = 0; l < layers[c][v].size(); ++l) {
          out.push_back({ch + "/" + vw + "/" + sym + std::to_string(l),
                         layers[c][v][l]});
        }
      }
      auto add_head = [&](const Head& head, const std::string& level) {
        for (std::size_t l = 0; l < head.weights.size(); ++l) {
          out.push_back({ch + "/" + level + "_head/W" + std::to_string(l),
                         head.weights[l]});
          out.push_back({ch + "/" + level + "_head/b" + std::to_string(l),
                         head.biases[l]});
        }
      };
      add_head(node_heads[c], "node");
      add_head(graph_heads[c], "graph");
    }
    return out;
  }

  void zero_grad() const {
    for (auto& np : named_parameters()) {
      Tensor t = np.tensor;
      t.zero_grad();
    }
  }

  /// Deep copy with fresh parameter storage.
  EncoderParams clone() const {
    EncoderParams p = *this;
    auto copy = [](Tensor& t) { t = Tensor::parameter(t.value()); };
    for (auto& ch : p.layers) {
      for (auto& view : ch) {
        for (auto& t : view) copy(t);
      }
    }
    for (auto* heads : {&p.node_heads, &p.graph_heads}) {
      for (auto& head : *heads) {
        for (auto& t : head.weights) copy(t);
        for (auto& t : head.biases) copy(t);
      }
    }
    return p;
  }

  std::size_t parameter_count() const {
    std::size_t total = 0;
    for (const auto& np : named_parameters()) {
      total += static_cast<std::size_t>(np.tensor.value().size());
    }
    return total;
  }
};

/// Per-node embeddings of one (channel, view): rows are hyperboloid points
/// (or Euclidean vectors under Manifold::kFlat).
struct NodeEmbedding {
  Tensor points;
  Channel channel = Channel::kGraph;
  ViewTag view = ViewTag::kAttribute;
};

inline Tensor to_tangent(Tape& tape, const Tensor& points, Manifold m) {
  return m == Manifold::kLorentz ? tape.log_origin(points) : points;
}

inline Tensor to_manifold(Tape& tape, const Tensor& tangent, Manifold m) {
  return m == Manifold::kLorentz ? tape.exp_origin(tangent) : tangent;
}

/// Stacked-rows propagation: `features` holds the nodes of several graphs
/// back to back and `operators[j]` is graph j's n_j x n_j mixing operator.
inline Tensor propagate(Tape& tape, const Matrix& features,
                        std::span<const Matrix> operators,
                        std::span<const Tensor> weights,
                        const EncoderConfig& config) {
  if (features.rows() == 0 || features.cols() == 0) {
    fail(ErrorKind::kPrecondition, "propagate: empty feature matrix");
  }
  Tensor x = Tensor::constant(features);
  // Initial hyperbolic state e0 = exp_o([0, x]), then back to the tangent
  // space at the origin.
  Tensor h = to_tangent(tape, to_manifold(tape, x, config.manifold), config.manifold);
  for (std::size_t l = 0; l < weights.size(); ++l) {
    h = tape.block_diag_matmul(operators, tape.matmul(h, weights[l]));
    const bool last = l + 1 == weights.size();
    if (!last || config.final_activation) h = tape.relu(h);
  }
  return to_manifold(tape, h, config.manifold);
}

inline NodeEmbedding graph_propagate(Tape& tape, const GraphView& view,
                                     const EncoderParams& params) {
  const Matrix op = gcn_operator(view.graph());
  const auto& w = params.layers[0][static_cast<int>(view.tag)];
  return {propagate(tape, view.features, std::span<const Matrix>(&op, 1), w,
                    params.config),
          Channel::kGraph, view.tag};
}

inline NodeEmbedding hypergraph_propagate(Tape& tape, const GraphView& view,
                                          const Hypergraph& hg,
                                          const EncoderParams& params) {
  if (hg.num_vertices != view.num_nodes()) {
    fail(ErrorKind::kPrecondition,
         "hypergraph has " + std::to_string(hg.num_vertices) +
             " vertices but the view has " + std::to_string(view.num_nodes()) +
             " nodes");
  }
  const Matrix op = hypergraph_operator(hg);
  const auto& w = params.layers[1][static_cast<int>(view.tag)];
  return {propagate(tape, view.features, std::span<const Matrix>(&op, 1), w,
                    params.config),
          Channel::kHypergraph, view.tag};
}

/// Mean pooling in the origin tangent space: one pooled point per segment.
inline Tensor pool_graph(Tape& tape, const Tensor& points,
                         std::span<const Index> sizes, Manifold m) {
  return to_manifold(tape, tape.segment_mean(to_tangent(tape, points, m), sizes), m);
}

inline Tensor pool_graph(Tape& tape, const NodeEmbedding& emb, Manifold m) {
  const Index n = emb.points.rows();
  return pool_graph(tape, emb.points, std::span<const Index>(&n, 1), m);
}

/// log_o -> MLP (relu between layers, linear output) -> exp_o.
inline Tensor project_head(Tape& tape, const Tensor& points, const Head& head,
                           Manifold m) {
  Tensor h = to_tangent(tape, points, m);
  for (std::size_t l = 0; l < head.weights.size(); ++l) {
    h = tape.add_row(tape.matmul(h, head.weights[l]), head.biases[l]);
    if (l + 1 < head.weights.size()) h = tape.relu(h);
  }
  return to_manifold(tape, h, m);
}

}  // namespace hcglad
