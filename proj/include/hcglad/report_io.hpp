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

// CSV renderings of run artifacts. Reals use %.17g so equal runs give equal
// bytes.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>

#include "hcglad/error.hpp"
#include "hcglad/hyperbolicity.hpp"
#include "hcglad/motif_hypergraph.hpp"
#include "hcglad/trainer.hpp"

namespace hcglad {

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// graph_id,score,label with label 1 for the anomaly class, 0 otherwise.
inline std::string scores_csv(std::span<const ScoredGraph> scores) {
  std::string s = "graph_id,score,label\n";
  for (const auto& g : scores) {
    s += std::to_string(g.graph_id) + "," + format_double(g.score) + "," +
         (g.is_anomaly ? "1" : "0") + "\n";
  }
  return s;
}

inline std::string scores_csv(const EvalReport& r) { return scores_csv(r.scores); }

inline std::string loss_csv(std::span<const LossRecord> curve) {
  std::string s = "epoch,batch,L_node_g,L_graph_g,L_node_hg,L_graph_hg,L_total\n";
  for (const auto& r : curve) {
    s += std::to_string(r.epoch) + "," + std::to_string(r.batch) + "," +
         format_double(r.node_graph) + "," + format_double(r.graph_graph) + "," +
         format_double(r.node_hypergraph) + "," + format_double(r.graph_hypergraph) +
         "," + format_double(r.total) + "\n";
  }
  return s;
}

inline std::string motif_stats_csv(const Corpus& c) {
  std::string s = "graph_id,n,edges,triangles,motif_hyperedges,pairwise_hyperedges\n";
  for (const auto& g : c.graphs) {
    const MotifStats m = motif_stats(g);
    s += std::to_string(m.graph_id) + "," + std::to_string(m.n) + "," +
         std::to_string(m.edges) + "," + std::to_string(m.triangles) + "," +
         std::to_string(m.motif_hyperedges) + "," + std::to_string(m.pairwise_hyperedges) +
         "\n";
  }
  return s;
}

inline std::string hyperbolicity_csv(const CorpusHyperbolicity& h) {
  std::string s = "dataset,graph_id,delta_worst,delta_avg,quadruples,mode\n";
  for (const auto& r : h.graphs) {
    s += h.dataset + "," + std::to_string(r.graph_id) + "," + format_double(r.delta_worst) +
         "," + format_double(r.delta_avg) + "," + std::to_string(r.quadruples) + "," +
         mode_name(r.mode) + "\n";
  }
  return s;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIngestion, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorKind::kIngestion, "write failed for " + path.string());
}

}  // namespace hcglad
