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

// Multi-level contrastive objective.
//
// For anchors a_i (one view) and candidates b_k (the other view),
//   l(a_i, b_i) = d(a_i, b_i)/tau + log sum_{k != i} exp(-d(a_i, b_k)/tau),
// i.e. -log of the positive similarity over the negatives only. Node level
// contrasts nodes of the same graph; graph level contrasts the pooled
// embeddings of a batch. Both directions (view1 -> view2 and view2 -> view1)
// are summed.
//
// Per-graph parts:
//   node_j  = 1/(2|V_j|) sum_{i in V_j} [l12_i + l21_i]
//   graph_j = 1/2 [l12_j + l21_j]
// so L_node = mean_j node_j and L_graph = mean_j graph_j over the batch.

#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "hcglad/encoders.hpp"
#include "hcglad/error.hpp"
#include "hcglad/tensor.hpp"

namespace hcglad {

struct ContrastConfig {
  double tau = 0.2;
  double xi1 = 1.0;  // node level
  double xi2 = 1.0;  // graph level
  double lambda1 = 0.5;  // graph channel
  double lambda2 = 0.5;  // hypergraph channel

  void validate() const {
    if (!(tau > 0.0)) fail(ErrorKind::kConfig, "tau must be > 0");
    if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0)) {
      fail(ErrorKind::kConfig, "lambda1 and lambda2 must be >= 0");
    }
    if (lambda1 == 0.0 && lambda2 == 0.0) {
      fail(ErrorKind::kConfig, "lambda1 and lambda2 cannot both be 0");
    }
    if (!(xi1 >= 0.0) || !(xi2 >= 0.0)) {
      fail(ErrorKind::kConfig, "xi1 and xi2 must be >= 0");
    }
  }
};

/// A level loss (batch scalar) plus each graph's part.
struct LevelLoss {
  Tensor loss;                  // 1 x 1
  Tensor parts;                 // B x 1
  std::vector<double> per_graph;
  std::size_t singleton_graphs = 0;  // node level: graphs skipped with n < 2
};

inline Tensor pairwise_distance(Tape& tape, const Tensor& x, const Tensor& y,
                                Manifold m) {
  return m == Manifold::kLorentz ? tape.lorentz_dist(x, y)
                                 : tape.euclidean_dist(x, y);
}

namespace detail {

/// sum_i [l12_i + l21_i] for a square distance matrix d (rows view1).
inline Tensor symmetric_contrast_sum(Tape& tape, const Tensor& d, double tau) {
  const Index n = d.rows();
  Matrix off_diag = Matrix::Ones(n, n) - Matrix::Identity(n, n);
  Tensor s = tape.scale(d, -1.0 / tau);
  Tensor lse12 = tape.masked_row_logsumexp(s, off_diag);
  Tensor lse21 = tape.masked_row_logsumexp(tape.transpose(s), off_diag);
  Tensor positives = tape.scale(tape.sum(tape.diagonal(d)), 2.0 / tau);
  return tape.add(positives, tape.add(tape.sum(lse12), tape.sum(lse21)));
}

inline void require_tau(double tau) {
  if (!(tau > 0.0)) {
    fail(ErrorKind::kConfig, "temperature tau must be > 0, got " + std::to_string(tau));
  }
}

}  // namespace detail

/// Node-level loss over graphs stored as consecutive row segments of `z1`
/// and `z2`. Graphs with a single node contribute 0.
inline LevelLoss node_level_loss(Tape& tape, const Tensor& z1, const Tensor& z2,
                                 std::span<const Index> sizes, double tau,
                                 Manifold m) {
  detail::require_tau(tau);
  if (z1.rows() != z2.rows() || z1.cols() != z2.cols()) {
    fail(ErrorKind::kDimension, "node_level_loss: views are not aligned: " +
                                    shape_string(z1.value()) + " vs " +
                                    shape_string(z2.value()));
  }
  if (sizes.empty()) fail(ErrorKind::kEmptyReduction, "node_level_loss: empty batch");
  LevelLoss out;
  std::vector<Tensor> parts;
  parts.reserve(sizes.size());
  Index off = 0;
  for (Index n : sizes) {
    if (n < 2) {
      ++out.singleton_graphs;
      parts.push_back(Tensor::scalar(0.0));
    } else {
      Tensor a = tape.slice_rows(z1, off, n);
      Tensor b = tape.slice_rows(z2, off, n);
      Tensor total = detail::symmetric_contrast_sum(
          tape, pairwise_distance(tape, a, b, m), tau);
      parts.push_back(tape.scale(total, 1.0 / (2.0 * static_cast<double>(n))));
    }
    off += n;
  }
  if (off != z1.rows()) {
    fail(ErrorKind::kDimension, "node_level_loss: segment sizes cover " +
                                    std::to_string(off) + " of " +
                                    std::to_string(z1.rows()) + " rows");
  }
  out.parts = tape.concat_rows(parts);
  out.loss = tape.mean(out.parts);
  const Matrix& v = out.parts.value();
  out.per_graph.assign(v.data(), v.data() + v.size());
  return out;
}

/// Graph-level loss over pooled embeddings, one row per graph of the batch.
inline LevelLoss graph_level_loss(Tape& tape, const Tensor& g1, const Tensor& g2,
                                  double tau, Manifold m) {
  detail::require_tau(tau);
  if (g1.rows() < 2 || g1.rows() != g2.rows()) {
    fail(ErrorKind::kBatch, "graph_level_loss needs >= 2 aligned graphs, got " +
                                shape_string(g1.value()) + " and " +
                                shape_string(g2.value()));
  }
  const Index b = g1.rows();
  Tensor d = pairwise_distance(tape, g1, g2, m);
  Matrix off_diag = Matrix::Ones(b, b) - Matrix::Identity(b, b);
  Tensor s = tape.scale(d, -1.0 / tau);
  Tensor positives = tape.scale(tape.diagonal(d), 1.0 / tau);
  Tensor l12 = tape.add(positives, tape.masked_row_logsumexp(s, off_diag));
  Tensor l21 = tape.add(
      positives, tape.masked_row_logsumexp(tape.transpose(s), off_diag));
  LevelLoss out;
  out.parts = tape.scale(tape.add(l12, l21), 0.5);
  out.loss = tape.mean(out.parts);
  const Matrix& v = out.parts.value();
  out.per_graph.assign(v.data(), v.data() + v.size());
  return out;
}

inline Tensor combine(Tape& tape, const Tensor& node_loss, const Tensor& graph_loss,
                      double xi1, double xi2) {
  return tape.add(tape.scale(node_loss, xi1), tape.scale(graph_loss, xi2));
}

inline double combine(double node_loss, double graph_loss, double xi1, double xi2) {
  return xi1 * node_loss + xi2 * graph_loss;
}

inline Tensor total_loss(Tape& tape, const Tensor& graph_channel,
                         const Tensor& hypergraph_channel, double lambda1,
                         double lambda2) {
  return tape.add(tape.scale(graph_channel, lambda1),
                  tape.scale(hypergraph_channel, lambda2));
}

inline double total_loss(double graph_channel, double hypergraph_channel,
                         double lambda1, double lambda2) {
  return lambda1 * graph_channel + lambda2 * hypergraph_channel;
}

/// Loss bookkeeping of one batch, indexed [channel].
struct BatchLossReport {
  std::vector<int> graph_ids;
  std::array<std::vector<double>, 2> node_parts;
  std::array<std::vector<double>, 2> graph_parts;
  std::array<double, 2> node_loss{0.0, 0.0};
  std::array<double, 2> graph_loss{0.0, 0.0};
  double total = 0.0;
};

/// Each graph's additive share of L_total within its batch, before the
/// 1/|B| batch average: mean(scores) == report.total.
inline std::vector<double> anomaly_scores(const BatchLossReport& r,
                                          const ContrastConfig& c) {
  const std::size_t b = r.graph_ids.size();
  std::vector<double> scores(b, 0.0);
  const std::array<double, 2> lambda{c.lambda1, c.lambda2};
  for (int ch = 0; ch < 2; ++ch) {
    if (lambda[ch] == 0.0) continue;
    for (std::size_t j = 0; j < b; ++j) {
      scores[j] += lambda[ch] * combine(r.node_parts[ch][j], r.graph_parts[ch][j],
                                        c.xi1, c.xi2);
    }
  }
  return scores;
}

}  // namespace hcglad
