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

// Training on normal graphs, per-graph scoring and AUC.
//
// Every trainable tensor (propagation weights, head weights and biases) is
// a flat matrix; embeddings reach the hyperboloid only through exp maps of
// computed features. The optimizer is therefore plain SGD with momentum and
// decoupled-into-the-gradient weight decay, kept behind Optimizer so a
// manifold-aware step can replace it.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "hcglad/contrast.hpp"
#include "hcglad/encoders.hpp"
#include "hcglad/error.hpp"
#include "hcglad/graph_io.hpp"
#include "hcglad/pipeline.hpp"
#include "hcglad/random.hpp"
#include "hcglad/tensor.hpp"

namespace hcglad {

struct TrainConfig {
  int epochs = 200;
  int batch_size = 64;
  double learning_rate = 1e-3;
  double weight_decay = 0.01;
  double momentum = 0.95;
  std::uint64_t seed = 0;
  EncoderConfig encoder;
  ContrastConfig contrast;
  int walk_length = 8;
  double train_fraction = 0.8;
  int inference_batch_size = 128;
  /// Score the whole test set as one batch instead of seeded mini-batches.
  bool whole_set_scoring = false;
  AnomalyClass anomaly_class;
  FeatureSource feature_source = FeatureSource::kAuto;
  int max_degree_bucket = 32;
};

// ---- optimizer ----------------------------------------------------------

/// g' = g + wd*w; v = momentum*v + g'; w -= lr*v. Updates `w` and `v` in place.
inline void sgd_step(Matrix& w, const Matrix& g, Matrix& v, double lr,
                     double weight_decay, double momentum) {
  if (w.rows() != g.rows() || w.cols() != g.cols() || w.rows() != v.rows() ||
      w.cols() != v.cols()) {
    fail(ErrorKind::kDimension, "sgd_step: weight " + shape_string(w) + ", grad " +
                                    shape_string(g) + ", velocity " + shape_string(v));
  }
  v = momentum * v + (g + weight_decay * w);
  w -= lr * v;
}

class Optimizer {
 public:
  virtual ~Optimizer() = default;
  /// Applies one update to every parameter from its accumulated gradient.
  virtual void step(std::span<const NamedParameter> params) = 0;
};

class SgdOptimizer final : public Optimizer {
 public:
  SgdOptimizer(double lr, double weight_decay, double momentum)
      : lr_(lr), weight_decay_(weight_decay), momentum_(momentum) {}

  void step(std::span<const NamedParameter> params) override {
    if (velocity_.empty()) {
      for (const auto& p : params) {
        velocity_.push_back(Matrix::Zero(p.tensor.rows(), p.tensor.cols()));
      }
    }
    if (velocity_.size() != params.size()) {
      fail(ErrorKind::kPrecondition, "optimizer parameter set changed between steps");
    }
    for (std::size_t k = 0; k < params.size(); ++k) {
      Tensor t = params[k].tensor;
      sgd_step(t.mutable_value(), t.grad(), velocity_[k], lr_, weight_decay_,
               momentum_);
    }
  }

  const std::vector<Matrix>& velocity() const { return velocity_; }

 private:
  double lr_;
  double weight_decay_;
  double momentum_;
  std::vector<Matrix> velocity_;
};

// ---- training -------------------------------------------------------------

struct LossRecord {
  int epoch = 0;
  int batch = 0;
  double node_graph = 0.0;       // L_node, graph channel
  double graph_graph = 0.0;      // L_graph, graph channel
  double node_hypergraph = 0.0;  // L_node, hypergraph channel
  double graph_hypergraph = 0.0;
  double total = 0.0;
};

struct TrainResult {
  EncoderParams params;
  std::vector<LossRecord> loss_curve;
  /// Every graph id fed to a forward pass, in order.
  std::vector<int> access_log;
};

inline FeatureOptions feature_options(const Corpus& c, const TrainConfig& cfg) {
  FeatureOptions opt;
  opt.source = cfg.feature_source;
  opt.max_degree_bucket = cfg.max_degree_bucket;
  // Node labels only (never graph labels), so the vocabulary leaks nothing
  // about the anomaly class and keeps view1 width fixed across splits.
  opt.label_vocabulary = c.node_label_vocabulary();
  return opt;
}

/// Prepared graphs keyed by id.
using PreparedSet = std::map<int, PreparedGraph>;

inline PreparedSet prepare_ids(const Corpus& c, std::span<const int> ids,
                               const FeatureOptions& opt, int walk_length) {
  PreparedSet out;
  for (int id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= c.size()) {
      fail(ErrorKind::kSplit, "graph id " + std::to_string(id) + " is not in corpus " +
                                  c.name);
    }
    out.emplace(id, prepare_graph(c.graphs[static_cast<std::size_t>(id)], opt,
                                  walk_length));
  }
  return out;
}

inline BatchInput assemble_batch(const PreparedSet& set, std::span<const int> ids) {
  std::vector<const PreparedGraph*> ptrs;
  ptrs.reserve(ids.size());
  for (int id : ids) ptrs.push_back(&set.at(id));
  return assemble_batch(ptrs);
}

inline EncoderParams init_params(const PreparedSet& set, const TrainConfig& cfg) {
  if (set.empty()) fail(ErrorKind::kSplit, "cannot size encoders from an empty set");
  const PreparedGraph& any = set.begin()->second;
  return EncoderParams::init(cfg.encoder, any.features[0].cols(),
                             any.features[1].cols(), cfg.seed);
}

inline std::string join_ids(std::span<const int> ids) {
  std::string s;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (k) s += ',';
    s += std::to_string(ids[k]);
  }
  return s;
}

using LossCallback = std::function<void(const LossRecord&)>;

inline TrainResult train(const Corpus& corpus, const SplitPlan& split,
                         const TrainConfig& cfg, Optimizer* optimizer = nullptr,
                         const LossCallback& on_batch = {}) {
  cfg.contrast.validate();
  if (cfg.epochs < 0) fail(ErrorKind::kConfig, "epochs must be >= 0");
  if (split.train_ids.empty()) fail(ErrorKind::kSplit, "training set is empty");
  for (int id : split.train_ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= corpus.size() ||
        corpus.graphs[static_cast<std::size_t>(id)].label == split.anomaly_class) {
      fail(ErrorKind::kSplit, "training set contains graph " + std::to_string(id) +
                                  " of the anomaly class or outside the corpus");
    }
  }
  const PreparedSet prepared = prepare_ids(corpus, split.train_ids,
                                           feature_options(corpus, cfg), cfg.walk_length);
  TrainResult result;
  result.params = init_params(prepared, cfg);
  SgdOptimizer sgd(cfg.learning_rate, cfg.weight_decay, cfg.momentum);
  Optimizer& opt = optimizer ? *optimizer : sgd;
  const auto params = result.params.named_parameters();

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto batches =
        make_batches(split.train_ids, static_cast<std::size_t>(cfg.batch_size),
                     derive_seed(cfg.seed, "batching", static_cast<std::uint64_t>(epoch)));
    for (std::size_t b = 0; b < batches.size(); ++b) {
      const auto& ids = batches[b];
      result.access_log.insert(result.access_log.end(), ids.begin(), ids.end());
      Tape tape;
      BatchForward fwd = forward_batch(tape, assemble_batch(prepared, ids),
                                       result.params, cfg.contrast);
      if (!std::isfinite(fwd.report.total)) {
        fail(ErrorKind::kDivergence,
             "non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                 std::to_string(b) + " (graphs " + join_ids(ids) + ")");
      }
      result.params.zero_grad();
      tape.backward(fwd.total);
      opt.step(params);
      LossRecord rec{epoch,
                     static_cast<int>(b),
                     fwd.report.node_loss[0],
                     fwd.report.graph_loss[0],
                     fwd.report.node_loss[1],
                     fwd.report.graph_loss[1],
                     fwd.report.total};
      result.loss_curve.push_back(rec);
      if (on_batch) on_batch(rec);
    }
  }
  return result;
}

// ---- evaluation ---------------------------------------------------------------

/// Rank-based AUC with average ranks on ties. labels: 1 anomaly, 0 normal.
inline double compute_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    fail(ErrorKind::kMetric, "compute_auc: " + std::to_string(scores.size()) +
                                 " scores for " + std::to_string(labels.size()) +
                                 " labels");
  }
  const std::size_t n = scores.size();
  std::size_t pos = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (labels[k] != 0 && labels[k] != 1) {
      fail(ErrorKind::kMetric, "compute_auc: labels must be 0 or 1");
    }
    if (std::isnan(scores[k])) fail(ErrorKind::kMetric, "compute_auc: NaN score");
    pos += static_cast<std::size_t>(labels[k]);
  }
  const std::size_t neg = n - pos;
  if (pos == 0 || neg == 0) {
    fail(ErrorKind::kMetric, "AUC is undefined: only one class among " +
                                 std::to_string(n) + " graphs");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Ranks are 1-based; a tie group over positions [i, j) shares (i + 1 + j) / 2.
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg = static_cast<double>(i + 1 + j) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) rank_sum += avg;
    }
    i = j;
  }
  const double p = static_cast<double>(pos);
  const double u = rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(neg));
}

struct ScoredGraph {
  int graph_id = 0;
  double score = 0.0;
  bool is_anomaly = false;
};

struct SplitSummary {
  int anomaly_class = 0;
  std::size_t train_graphs = 0;
  std::size_t test_graphs = 0;
  std::size_t test_anomalies = 0;
  std::uint64_t seed = 0;
};

struct EvalReport {
  std::string dataset;
  std::vector<ScoredGraph> scores;  // sorted by graph id
  double auc = 0.0;
  SplitSummary split;
  TrainConfig config;
};

/// Scores each graph in `ids` by its share of L_total within its inference
/// batch. Result is sorted by graph id.
inline std::vector<ScoredGraph> score_graphs(const EncoderParams& params,
                                             const Corpus& corpus,
                                             std::span<const int> ids,
                                             const TrainConfig& cfg, int anomaly_class) {
  cfg.contrast.validate();
  if (ids.size() < 2) {
    fail(ErrorKind::kBatch, "scoring needs at least 2 graphs, got " +
                                std::to_string(ids.size()));
  }
  const PreparedSet prepared =
      prepare_ids(corpus, ids, feature_options(corpus, cfg), cfg.walk_length);
  for (const auto& [id, pg] : prepared) {
    if (pg.features[0].cols() != params.input_dims[0] ||
        pg.features[1].cols() != params.input_dims[1]) {
      fail(ErrorKind::kDimension,
           "graph " + std::to_string(id) + " view widths (" +
               std::to_string(pg.features[0].cols()) + ", " +
               std::to_string(pg.features[1].cols()) + ") do not match parameters (" +
               std::to_string(params.input_dims[0]) + ", " +
               std::to_string(params.input_dims[1]) + ")");
    }
  }
  std::vector<std::vector<int>> batches;
  if (cfg.whole_set_scoring) {
    batches.emplace_back(ids.begin(), ids.end());
  } else {
    batches = make_batches(std::vector<int>(ids.begin(), ids.end()),
                           static_cast<std::size_t>(cfg.inference_batch_size),
                           derive_seed(cfg.seed, "inference", 0));
  }
  std::vector<ScoredGraph> out;
  for (const auto& batch : batches) {
    Tape tape;
    BatchForward fwd =
        forward_batch(tape, assemble_batch(prepared, batch), params, cfg.contrast);
    const auto s = anomaly_scores(fwd.report, cfg.contrast);
    for (std::size_t k = 0; k < batch.size(); ++k) {
      const bool anomaly =
          corpus.graphs[static_cast<std::size_t>(batch[k])].label == anomaly_class;
      out.push_back({batch[k], s[k], anomaly});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const ScoredGraph& a, const ScoredGraph& b) { return a.graph_id < b.graph_id; });
  return out;
}

/// Scores the test split, then the AUC of anomaly-class membership.
inline EvalReport evaluate(const EncoderParams& params, const Corpus& corpus,
                           const SplitPlan& split, const TrainConfig& cfg) {
  EvalReport report;
  report.dataset = corpus.name;
  report.config = cfg;
  report.scores = score_graphs(params, corpus, split.test_ids, cfg, split.anomaly_class);
  std::vector<double> s;
  std::vector<int> y;
  for (const auto& g : report.scores) {
    s.push_back(g.score);
    y.push_back(g.is_anomaly ? 1 : 0);
    report.split.test_anomalies += g.is_anomaly ? 1 : 0;
  }
  report.split.anomaly_class = split.anomaly_class;
  report.split.train_graphs = split.train_ids.size();
  report.split.test_graphs = split.test_ids.size();
  report.split.seed = split.seed;
  report.auc = compute_auc(s, y);
  return report;
}

}  // namespace hcglad
