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

// Central finite-difference check of the full training loss against the
// tape's backward pass, over every parameter entry.
//
// Error per entry: |analytic - numeric| / max(|analytic|, |numeric|, floor).
// Entries whose +h or -h evaluation takes a different piecewise branch
// (relu sign, distance clamp, series switch) than the base point are not
// differentiable along that segment and are excluded, with a count.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hcglad/contrast.hpp"
#include "hcglad/encoders.hpp"
#include "hcglad/graph_io.hpp"
#include "hcglad/pipeline.hpp"
#include "hcglad/random.hpp"
#include "hcglad/tensor.hpp"

namespace hcglad {

struct GradcheckOptions {
  std::uint64_t seed = 0;
  double step = 1e-4;
  double tolerance = 1e-4;
  double floor = 1e-4;
  EncoderConfig encoder;
  ContrastConfig contrast;
  int walk_length = 4;
  /// Test fixture: corrupt this op's backward rule by `fault_factor`.
  std::optional<OpKind> fault;
  double fault_factor = 2.0;
};

struct ParameterCheck {
  std::string name;
  std::size_t entries = 0;
  std::size_t excluded = 0;
  double max_abs_error = 0.0;
  double max_rel_error = 0.0;
  Index worst_row = 0;
  Index worst_col = 0;
};

struct GradcheckReport {
  std::vector<ParameterCheck> parameters;
  double max_rel_error = 0.0;
  std::string worst_parameter;
  std::size_t excluded = 0;
  double loss = 0.0;
  bool passed = false;
};

/// Two seeded Erdos-Renyi graphs (5-8 nodes, p = 0.5) with node labels in
/// {0, 1, 2}; each keeps at least one triangle so both hyperedge kinds can occur.
inline Corpus gradcheck_corpus(std::uint64_t seed) {
  Corpus c;
  c.name = "gradcheck";
  Rng rng = make_rng(seed, "gradcheck");
  for (int id = 0; id < 2; ++id) {
    const int n = 5 + static_cast<int>(uniform_index(rng, 4));
    std::vector<std::pair<int, int>> edges{{0, 1}, {1, 2}, {0, 2}};
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        if (uniform_unit(rng) < 0.5) edges.emplace_back(u, v);
      }
    }
    Graph g = make_graph(id, n, edges, 0);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (auto& l : labels) l = static_cast<int>(uniform_index(rng, 3));
    g.node_labels = labels;
    c.graphs.push_back(std::move(g));
  }
  return c;
}

inline GradcheckReport run_gradcheck(const GradcheckOptions& opt) {
  const Corpus corpus = gradcheck_corpus(opt.seed);
  FeatureOptions fo;
  fo.label_vocabulary = corpus.node_label_vocabulary();
  std::vector<PreparedGraph> prepared;
  for (const auto& g : corpus.graphs) prepared.push_back(prepare_graph(g, fo, opt.walk_length));
  const std::vector<int> ids{0, 1};
  const BatchInput batch = assemble_batch(prepared, ids);
  EncoderParams params = EncoderParams::init(opt.encoder, prepared[0].features[0].cols(),
                                             prepared[0].features[1].cols(), opt.seed);

  auto evaluate = [&](std::uint64_t* signature) {
    Tape tape;
    const double v = forward_batch(tape, batch, params, opt.contrast).report.total;
    if (signature) *signature = tape.branch_signature();
    return v;
  };

  GradcheckReport report;
  std::uint64_t base_sig = 0;
  {
    Tape tape;
    if (opt.fault) tape.inject_backward_fault(*opt.fault, opt.fault_factor);
    BatchForward fwd = forward_batch(tape, batch, params, opt.contrast);
    params.zero_grad();
    tape.backward(fwd.total);
    report.loss = fwd.report.total;
    base_sig = tape.branch_signature();
  }

  for (auto& np : params.named_parameters()) {
    ParameterCheck pc;
    pc.name = np.name;
    Matrix& w = np.tensor.mutable_value();
    const Matrix analytic = np.tensor.grad();
    for (Index i = 0; i < w.rows(); ++i) {
      for (Index j = 0; j < w.cols(); ++j) {
        const double orig = w(i, j);
        std::uint64_t sig_plus = 0, sig_minus = 0;
        w(i, j) = orig + opt.step;
        const double fp = evaluate(&sig_plus);
        w(i, j) = orig - opt.step;
        const double fm = evaluate(&sig_minus);
        w(i, j) = orig;
        ++pc.entries;
        if (sig_plus != base_sig || sig_minus != base_sig) {
          ++pc.excluded;
          continue;
        }
        const double numeric = (fp - fm) / (2.0 * opt.step);
        const double a = analytic(i, j);
        const double abs_err = std::abs(a - numeric);
        const double rel =
            abs_err / std::max({std::abs(a), std::abs(numeric), opt.floor});
        pc.max_abs_error = std::max(pc.max_abs_error, abs_err);
        if (rel > pc.max_rel_error || !std::isfinite(rel)) {
          pc.max_rel_error = std::isfinite(rel) ? rel : INFINITY;
          pc.worst_row = i;
          pc.worst_col = j;
        }
      }
    }
    report.excluded += pc.excluded;
    if (pc.max_rel_error >= report.max_rel_error) {
      report.max_rel_error = pc.max_rel_error;
      report.worst_parameter = pc.name;
    }
    report.parameters.push_back(std::move(pc));
  }
  report.passed = report.max_rel_error < opt.tolerance;
  return report;
}

}  // namespace hcglad
