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

// Gromov four-point hyperbolicity of unweighted graphs.
//
// For a quadruple, the three pair sums d(a,b)+d(c,e), d(a,c)+d(b,e),
// d(a,e)+d(b,c) sorted as S <= M <= L give delta+ = (L - M) / 2. A graph's
// delta_worst is the max over quadruples, delta_avg the mean.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "hcglad/error.hpp"
#include "hcglad/graph_io.hpp"
#include "hcglad/random.hpp"

namespace hcglad {

/// All-pairs hop distances, one BFS per source on first use.
class DistanceOracle {
 public:
  explicit DistanceOracle(const Graph& g)
      : g_(&g), rows_(static_cast<std::size_t>(g.num_nodes())) {}

  /// -1 when u and v lie in different components.
  int operator()(int u, int v) { return row(u)[static_cast<std::size_t>(v)]; }

  const std::vector<int>& row(int source) {
    auto& r = rows_[static_cast<std::size_t>(source)];
    if (r.empty()) r = bfs(source);
    return r;
  }

  int num_nodes() const { return g_->num_nodes(); }

 private:
  std::vector<int> bfs(int source) const {
    std::vector<int> dist(static_cast<std::size_t>(g_->num_nodes()), -1);
    std::queue<int> q;
    dist[static_cast<std::size_t>(source)] = 0;
    q.push(source);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v : g_->neighbors[static_cast<std::size_t>(u)]) {
        if (dist[static_cast<std::size_t>(v)] < 0) {
          dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
          q.push(v);
        }
      }
    }
    return dist;
  }

  const Graph* g_;
  std::vector<std::vector<int>> rows_;
};

/// delta+ of four distinct nodes; nullopt if they are not all connected.
inline std::optional<double> delta_plus(DistanceOracle& d, int a, int b, int c, int e) {
  const std::array<int, 4> q{a, b, c, e};
  for (int i = 0; i < 4; ++i) {
    if (q[i] < 0 || q[i] >= d.num_nodes()) {
      fail(ErrorKind::kPrecondition, "quadruple node " + std::to_string(q[i]) +
                                         " out of range");
    }
    for (int j = i + 1; j < 4; ++j) {
      if (q[i] == q[j]) fail(ErrorKind::kPrecondition, "quadruple nodes must be distinct");
    }
  }
  const int ab = d(a, b), cd = d(c, e), ac = d(a, c), bd = d(b, e), ad = d(a, e),
            bc = d(b, c);
  if (ab < 0 || cd < 0 || ac < 0 || bd < 0 || ad < 0 || bc < 0) return std::nullopt;
  std::array<int, 3> sums{ab + cd, ac + bd, ad + bc};
  std::sort(sums.begin(), sums.end());
  return static_cast<double>(sums[2] - sums[1]) / 2.0;
}

enum class HyperbolicityMode { kAuto, kExhaustive, kSampled };

inline std::string mode_name(HyperbolicityMode m) {
  switch (m) {
    case HyperbolicityMode::kAuto: return "auto";
    case HyperbolicityMode::kExhaustive: return "exhaustive";
    case HyperbolicityMode::kSampled: return "sampled";
  }
  return "unknown";
}

struct HyperbolicityReport {
  int graph_id = 0;
  double delta_worst = 0.0;
  double delta_avg = 0.0;
  std::uint64_t quadruples = 0;  // connected quadruples evaluated
  std::uint64_t skipped_disconnected = 0;
  HyperbolicityMode mode = HyperbolicityMode::kExhaustive;
  std::uint64_t seed = 0;  // sampled mode only
};

constexpr int kDefaultExhaustiveCap = 40;
constexpr std::uint64_t kDefaultSamples = 100000;

inline HyperbolicityReport exhaustive(const Graph& g, int cap = kDefaultExhaustiveCap) {
  const int n = g.num_nodes();
  if (n > cap) {
    fail(ErrorKind::kCapExceeded,
         "graph " + std::to_string(g.id) + " has " + std::to_string(n) +
             " nodes, above the exhaustive cap of " + std::to_string(cap) +
             "; use sampled mode");
  }
  HyperbolicityReport r;
  r.graph_id = g.id;
  r.mode = HyperbolicityMode::kExhaustive;
  DistanceOracle d(g);
  double sum = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      for (int c = b + 1; c < n; ++c) {
        for (int e = c + 1; e < n; ++e) {
          const auto dp = delta_plus(d, a, b, c, e);
          if (!dp) {
            ++r.skipped_disconnected;
            continue;
          }
          ++r.quadruples;
          sum += *dp;
          r.delta_worst = std::max(r.delta_worst, *dp);
        }
      }
    }
  }
  if (r.quadruples) r.delta_avg = sum / static_cast<double>(r.quadruples);
  return r;
}

/// Seeded uniform draws over connected quadruples (rejection on repeated or
/// disconnected nodes). The draw sequence depends only on the seed, so a
/// larger budget extends a smaller one and delta_worst never decreases.
inline HyperbolicityReport sampled(const Graph& g, std::uint64_t samples,
                                   std::uint64_t seed) {
  if (samples < 1) fail(ErrorKind::kConfig, "samples must be >= 1");
  HyperbolicityReport r;
  r.graph_id = g.id;
  r.mode = HyperbolicityMode::kSampled;
  r.seed = seed;
  const int n = g.num_nodes();
  if (n < 4) return r;
  DistanceOracle d(g);
  // Some component must hold 4 nodes, or no draw can ever be accepted.
  {
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    int largest = 0;
    for (int s = 0; s < n; ++s) {
      if (seen[static_cast<std::size_t>(s)]) continue;
      int size = 0;
      const auto& row = d.row(s);
      for (int v = 0; v < n; ++v) {
        if (row[static_cast<std::size_t>(v)] >= 0) {
          seen[static_cast<std::size_t>(v)] = true;
          ++size;
        }
      }
      largest = std::max(largest, size);
    }
    if (largest < 4) return r;
  }
  Rng rng(seed);
  double sum = 0.0;
  while (r.quadruples < samples) {
    std::array<int, 4> q{};
    for (int k = 0; k < 4; ++k) {
      q[k] = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(n)));
    }
    if (q[0] == q[1] || q[0] == q[2] || q[0] == q[3] || q[1] == q[2] || q[1] == q[3] ||
        q[2] == q[3]) {
      continue;
    }
    const auto dp = delta_plus(d, q[0], q[1], q[2], q[3]);
    if (!dp) {
      ++r.skipped_disconnected;
      continue;
    }
    ++r.quadruples;
    sum += *dp;
    r.delta_worst = std::max(r.delta_worst, *dp);
  }
  r.delta_avg = sum / static_cast<double>(r.quadruples);
  return r;
}

enum class Aggregate { kMax, kMean };

struct CorpusHyperbolicityOptions {
  HyperbolicityMode mode = HyperbolicityMode::kAuto;
  int cap = kDefaultExhaustiveCap;
  std::uint64_t samples = kDefaultSamples;
  std::uint64_t seed = 0;
  Aggregate delta_aggregate = Aggregate::kMax;
  Aggregate delta_avg_aggregate = Aggregate::kMean;
};

struct CorpusHyperbolicity {
  std::string dataset;
  std::vector<HyperbolicityReport> graphs;
  double delta = 0.0;
  double delta_avg = 0.0;
  /// Graphs with at least one connected quadruple; means run over these.
  std::size_t contributing_graphs = 0;
};

inline CorpusHyperbolicity corpus_report(const Corpus& c,
                                         const CorpusHyperbolicityOptions& opt = {}) {
  CorpusHyperbolicity out;
  out.dataset = c.name;
  for (const auto& g : c.graphs) {
    const bool use_exhaustive =
        opt.mode == HyperbolicityMode::kExhaustive ||
        (opt.mode == HyperbolicityMode::kAuto && g.num_nodes() <= opt.cap);
    out.graphs.push_back(
        use_exhaustive
            ? exhaustive(g, opt.cap)
            : sampled(g, opt.samples,
                      derive_seed(opt.seed, "sampling", static_cast<std::uint64_t>(g.id))));
  }
  auto aggregate = [&](Aggregate how, double HyperbolicityReport::*field) {
    double acc = 0.0;
    std::size_t k = 0;
    for (const auto& r : out.graphs) {
      if (!r.quadruples) continue;
      ++k;
      acc = how == Aggregate::kMax ? std::max(acc, r.*field) : acc + r.*field;
    }
    if (how == Aggregate::kMean && k) acc /= static_cast<double>(k);
    return acc;
  };
  for (const auto& r : out.graphs) out.contributing_graphs += r.quadruples ? 1 : 0;
  out.delta = aggregate(opt.delta_aggregate, &HyperbolicityReport::delta_worst);
  out.delta_avg = aggregate(opt.delta_avg_aggregate, &HyperbolicityReport::delta_avg);
  return out;
}

}  // namespace hcglad
