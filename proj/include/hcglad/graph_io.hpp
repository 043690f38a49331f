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

// TUDataset corpora: parsing, writing, base node features, anomaly-aware
// train/test splits and contrastive batching.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "hcglad/error.hpp"
#include "hcglad/random.hpp"
#include "hcglad/tensor.hpp"

namespace hcglad {

/// Undirected simple graph. Neighbor lists are sorted and never contain the
/// node itself, so the dense adjacency is symmetric 0/1 with zero diagonal.
struct Graph {
  int id = 0;
  std::vector<std::vector<int>> neighbors;
  std::optional<Matrix> node_attributes;
  std::optional<std::vector<int>> node_labels;
  int label = 0;

  int num_nodes() const { return static_cast<int>(neighbors.size()); }

  std::size_t num_edges() const {
    std::size_t total = 0;
    for (const auto& nb : neighbors) total += nb.size();
    return total / 2;
  }

  int degree(int v) const { return static_cast<int>(neighbors[v].size()); }

  Matrix adjacency() const {
    const int n = num_nodes();
    Matrix a = Matrix::Zero(n, n);
    for (int u = 0; u < n; ++u) {
      for (int v : neighbors[u]) a(u, v) = 1.0;
    }
    return a;
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    auto same_attr = [&] {
      if (a.node_attributes.has_value() != b.node_attributes.has_value()) {
        return false;
      }
      return !a.node_attributes || *a.node_attributes == *b.node_attributes;
    };
    return a.id == b.id && a.neighbors == b.neighbors && same_attr() &&
           a.node_labels == b.node_labels && a.label == b.label;
  }
};

/// Builds a Graph from an undirected edge list over nodes [0, n).
inline Graph make_graph(int id, int n, const std::vector<std::pair<int, int>>& edges,
                        int label = 0) {
  Graph g;
  g.id = id;
  g.label = label;
  g.neighbors.assign(static_cast<std::size_t>(n), {});
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n) {
      fail(ErrorKind::kPrecondition, "edge endpoint out of range");
    }
    if (u == v) continue;
    g.neighbors[u].push_back(v);
    g.neighbors[v].push_back(u);
  }
  for (auto& nb : g.neighbors) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return g;
}

struct Corpus {
  std::string name;
  std::vector<Graph> graphs;

  std::size_t size() const { return graphs.size(); }

  /// Sorted distinct node labels over every graph.
  std::vector<int> node_label_vocabulary() const {
    std::set<int> seen;
    for (const auto& g : graphs) {
      if (g.node_labels) seen.insert(g.node_labels->begin(), g.node_labels->end());
    }
    return {seen.begin(), seen.end()};
  }

  std::map<int, std::size_t> label_counts() const {
    std::map<int, std::size_t> counts;
    for (const auto& g : graphs) ++counts[g.label];
    return counts;
  }

  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.name == b.name && a.graphs == b.graphs;
  }
};

struct IngestionReport {
  std::size_t graphs = 0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t dropped_self_loops = 0;
  std::size_t dropped_duplicates = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view text, const std::filesystem::path& file,
               std::size_t line) {
  text = trim(text);
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    fail(ErrorKind::kIngestion, file.string() + ":" + std::to_string(line) +
                                    ": cannot parse '" + std::string(text) + "'");
  }
  return value;
}

inline std::vector<std::string> read_lines(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) fail(ErrorKind::kIngestion, "cannot open " + file.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) lines.push_back(std::move(line));
  }
  return lines;
}

inline std::filesystem::path required_file(const std::filesystem::path& dir,
                                           const std::string& name,
                                           const std::string& suffix) {
  auto p = dir / (name + suffix);
  if (!std::filesystem::exists(p)) {
    fail(ErrorKind::kIngestion, "missing required file " + p.string());
  }
  return p;
}

inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

/// Parses `<dir>/<name>_{A,graph_indicator,graph_labels}.txt` plus the
/// optional node label and node attribute files. Node ids in `_A.txt` are
/// 1-based and global; every edge must stay inside one graph.
inline Corpus parse_tudataset(const std::filesystem::path& dir,
                              const std::string& name,
                              IngestionReport* report = nullptr) {
  if (!std::filesystem::is_directory(dir)) {
    fail(ErrorKind::kIngestion, "dataset directory not found: " + dir.string());
  }
  const auto a_path = detail::required_file(dir, name, "_A.txt");
  const auto ind_path = detail::required_file(dir, name, "_graph_indicator.txt");
  const auto lab_path = detail::required_file(dir, name, "_graph_labels.txt");

  const auto ind_lines = detail::read_lines(ind_path);
  const auto lab_lines = detail::read_lines(lab_path);
  const std::size_t num_graphs = lab_lines.size();
  const std::size_t num_nodes = ind_lines.size();

  std::vector<int> graph_of(num_nodes);
  for (std::size_t k = 0; k < num_nodes; ++k) {
    const auto g = detail::parse_number<long long>(ind_lines[k], ind_path, k + 1);
    if (g < 1 || static_cast<std::size_t>(g) > num_graphs) {
      fail(ErrorKind::kConsistency,
           ind_path.string() + ":" + std::to_string(k + 1) + ": graph id " +
               std::to_string(g) + " outside [1, " + std::to_string(num_graphs) +
               "]");
    }
    graph_of[k] = static_cast<int>(g - 1);
  }

  Corpus corpus;
  corpus.name = name;
  corpus.graphs.resize(num_graphs);
  std::vector<int> local(num_nodes);
  for (std::size_t k = 0; k < num_nodes; ++k) {
    auto& g = corpus.graphs[graph_of[k]];
    local[k] = g.num_nodes();
    g.neighbors.emplace_back();
  }
  for (std::size_t gi = 0; gi < num_graphs; ++gi) {
    auto& g = corpus.graphs[gi];
    g.id = static_cast<int>(gi);
    g.label = detail::parse_number<int>(lab_lines[gi], lab_path, gi + 1);
    if (g.num_nodes() == 0) {
      fail(ErrorKind::kConsistency,
           "graph " + std::to_string(gi + 1) + " has no nodes in " +
               ind_path.string());
    }
  }

  IngestionReport rep;
  std::set<std::pair<long long, long long>> seen;
  const auto a_lines = detail::read_lines(a_path);
  for (std::size_t k = 0; k < a_lines.size(); ++k) {
    const std::string_view line = a_lines[k];
    const auto comma = line.find(',');
    if (comma == std::string_view::npos) {
      fail(ErrorKind::kIngestion, a_path.string() + ":" + std::to_string(k + 1) +
                                      ": expected 'i, j'");
    }
    const auto i = detail::parse_number<long long>(line.substr(0, comma), a_path, k + 1);
    const auto j = detail::parse_number<long long>(line.substr(comma + 1), a_path, k + 1);
    if (i < 1 || j < 1 || static_cast<std::size_t>(i) > num_nodes ||
        static_cast<std::size_t>(j) > num_nodes) {
      fail(ErrorKind::kConsistency,
           a_path.string() + ":" + std::to_string(k + 1) + ": node id outside [1, " +
               std::to_string(num_nodes) + "]");
    }
    if (graph_of[i - 1] != graph_of[j - 1]) {
      fail(ErrorKind::kConsistency,
           a_path.string() + ":" + std::to_string(k + 1) + ": edge " +
               std::to_string(i) + ", " + std::to_string(j) +
               " crosses graphs " + std::to_string(graph_of[i - 1] + 1) +
               " and " + std::to_string(graph_of[j - 1] + 1));
    }
    if (i == j) {
      ++rep.dropped_self_loops;
      continue;
    }
    if (!seen.insert({i, j}).second) {
      ++rep.dropped_duplicates;
      continue;
    }
    auto& g = corpus.graphs[graph_of[i - 1]];
    const int u = local[i - 1], v = local[j - 1];
    g.neighbors[u].push_back(v);
    g.neighbors[v].push_back(u);
  }
  for (auto& g : corpus.graphs) {
    for (auto& nb : g.neighbors) {
      std::sort(nb.begin(), nb.end());
      nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }
  }

  const auto nl_path = dir / (name + "_node_labels.txt");
  if (std::filesystem::exists(nl_path)) {
    const auto lines = detail::read_lines(nl_path);
    if (lines.size() != num_nodes) {
      fail(ErrorKind::kConsistency,
           nl_path.string() + " has " + std::to_string(lines.size()) +
               " lines, expected " + std::to_string(num_nodes));
    }
    for (auto& g : corpus.graphs) g.node_labels.emplace(g.num_nodes(), 0);
    for (std::size_t k = 0; k < num_nodes; ++k) {
      // Multi-column label files keep their first column.
      std::string_view line = lines[k];
      line = line.substr(0, line.find(','));
      (*corpus.graphs[graph_of[k]].node_labels)[local[k]] =
          detail::parse_number<int>(line, nl_path, k + 1);
    }
  }

  const auto na_path = dir / (name + "_node_attributes.txt");
  if (std::filesystem::exists(na_path)) {
    const auto lines = detail::read_lines(na_path);
    if (lines.size() != num_nodes) {
      fail(ErrorKind::kConsistency,
           na_path.string() + " has " + std::to_string(lines.size()) +
               " lines, expected " + std::to_string(num_nodes));
    }
    std::vector<std::vector<double>> rows(num_nodes);
    for (std::size_t k = 0; k < num_nodes; ++k) {
      std::string_view rest = lines[k];
      while (true) {
        const auto c = rest.find(',');
        rows[k].push_back(detail::parse_number<double>(rest.substr(0, c), na_path, k + 1));
        if (c == std::string_view::npos) break;
        rest = rest.substr(c + 1);
      }
      if (rows[k].size() != rows[0].size()) {
        fail(ErrorKind::kConsistency, na_path.string() + ":" +
                                          std::to_string(k + 1) +
                                          ": attribute width differs");
      }
    }
    const auto width = static_cast<Index>(rows[0].size());
    for (auto& g : corpus.graphs) g.node_attributes.emplace(g.num_nodes(), width);
    for (std::size_t k = 0; k < num_nodes; ++k) {
      auto& m = *corpus.graphs[graph_of[k]].node_attributes;
      for (Index c = 0; c < width; ++c) m(local[k], c) = rows[k][c];
    }
  }

  rep.graphs = num_graphs;
  rep.nodes = num_nodes;
  for (const auto& g : corpus.graphs) rep.edges += g.num_edges();
  if (report) *report = rep;
  return corpus;
}

/// Writes the corpus in TUDataset layout. Each undirected edge is written
/// in both directions, ordered by global source then target id.
inline void write_tudataset(const Corpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto base = dir / corpus.name;
  auto open = [](const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) fail(ErrorKind::kIngestion, "cannot write " + p.string());
    return out;
  };
  auto a = open(base.string() + "_A.txt");
  auto ind = open(base.string() + "_graph_indicator.txt");
  auto lab = open(base.string() + "_graph_labels.txt");
  const bool has_labels = !corpus.graphs.empty() && corpus.graphs[0].node_labels;
  const bool has_attrs = !corpus.graphs.empty() && corpus.graphs[0].node_attributes;
  std::ofstream nl, na;
  if (has_labels) nl = open(base.string() + "_node_labels.txt");
  if (has_attrs) na = open(base.string() + "_node_attributes.txt");

  long long offset = 0;
  for (const auto& g : corpus.graphs) {
    lab << g.label << "\n";
    for (int u = 0; u < g.num_nodes(); ++u) {
      ind << (g.id + 1) << "\n";
      for (int v : g.neighbors[u]) {
        a << (offset + u + 1) << ", " << (offset + v + 1) << "\n";
      }
      if (has_labels) nl << (*g.node_labels)[u] << "\n";
      if (has_attrs) {
        const auto& m = *g.node_attributes;
        for (Index c = 0; c < m.cols(); ++c) {
          na << (c ? ", " : "") << detail::format_real(m(u, c));
        }
        na << "\n";
      }
    }
    offset += g.num_nodes();
  }
}

// ---- base features ------------------------------------------------------

enum class FeatureSource { kAuto, kAttributes, kLabels, kDegree };

struct FeatureOptions {
  FeatureSource source = FeatureSource::kAuto;
  /// Degrees >= max_degree_bucket share the last one-hot column.
  int max_degree_bucket = 32;
  /// Corpus node-label vocabulary (sorted); required for label one-hots.
  std::vector<int> label_vocabulary;
};

inline Matrix degree_one_hot(const Graph& g, int max_bucket) {
  Matrix x = Matrix::Zero(g.num_nodes(), max_bucket + 1);
  for (int v = 0; v < g.num_nodes(); ++v) {
    x(v, std::min(g.degree(v), max_bucket)) = 1.0;
  }
  return x;
}

inline Matrix label_one_hot(const Graph& g, const std::vector<int>& vocabulary) {
  Matrix x = Matrix::Zero(g.num_nodes(), static_cast<Index>(vocabulary.size()));
  for (int v = 0; v < g.num_nodes(); ++v) {
    const int label = (*g.node_labels)[v];
    auto it = std::lower_bound(vocabulary.begin(), vocabulary.end(), label);
    if (it == vocabulary.end() || *it != label) {
      fail(ErrorKind::kConsistency,
           "node label " + std::to_string(label) + " missing from vocabulary");
    }
    x(v, it - vocabulary.begin()) = 1.0;
  }
  return x;
}

/// Attributes if present, else node-label one-hot, else degree one-hot.
/// An explicit source that the graph cannot provide falls through the same
/// chain.
inline Matrix derive_base_features(const Graph& g, const FeatureOptions& opt) {
  const bool want_attrs =
      opt.source == FeatureSource::kAuto || opt.source == FeatureSource::kAttributes;
  const bool want_labels = opt.source != FeatureSource::kDegree;
  if (want_attrs && g.node_attributes) return *g.node_attributes;
  if (want_labels && g.node_labels && !opt.label_vocabulary.empty()) {
    return label_one_hot(g, opt.label_vocabulary);
  }
  return degree_one_hot(g, opt.max_degree_bucket);
}

// ---- splits and batches -------------------------------------------------

/// Anomaly class selector: a concrete graph label, or the minority class
/// (fewest graphs, ties toward the smaller label).
struct AnomalyClass {
  std::optional<int> label;
  static AnomalyClass minority() { return {}; }
  static AnomalyClass of(int l) { return {l}; }
};

struct SplitPlan {
  int anomaly_class = 0;
  std::vector<int> train_ids;  // normal graphs only
  std::vector<int> test_ids;   // held-out normal graphs plus every anomaly
  std::uint64_t seed = 0;

  friend bool operator==(const SplitPlan&, const SplitPlan&) = default;
};

inline int resolve_anomaly_class(const Corpus& c, const AnomalyClass& which) {
  const auto counts = c.label_counts();
  if (counts.empty()) fail(ErrorKind::kSplit, "corpus has no graphs");
  if (which.label) {
    if (!counts.count(*which.label)) {
      fail(ErrorKind::kSplit, "anomaly class " + std::to_string(*which.label) +
                                  " does not occur in corpus " + c.name);
    }
    return *which.label;
  }
  int best = counts.begin()->first;
  std::size_t best_count = counts.begin()->second;
  for (auto [label, n] : counts) {
    if (n < best_count) {
      best = label;
      best_count = n;
    }
  }
  return best;
}

/// Seeded shuffle of the normal graphs; the first floor(f * #normal) train,
/// the rest join every anomaly-class graph in the test set. Both id lists
/// are returned sorted.
inline SplitPlan make_split(const Corpus& c, const AnomalyClass& which,
                            double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    fail(ErrorKind::kConfig, "train_fraction must lie in (0, 1), got " +
                                 std::to_string(train_fraction));
  }
  SplitPlan plan;
  plan.seed = seed;
  plan.anomaly_class = resolve_anomaly_class(c, which);
  std::vector<int> normal;
  for (const auto& g : c.graphs) {
    if (g.label == plan.anomaly_class) {
      plan.test_ids.push_back(g.id);
    } else {
      normal.push_back(g.id);
    }
  }
  if (normal.empty()) {
    fail(ErrorKind::kSplit, "degenerate split: class " +
                                std::to_string(plan.anomaly_class) +
                                " covers every graph of " + c.name);
  }
  Rng rng = make_rng(seed, "split");
  shuffle(normal, rng);
  const auto n_train = static_cast<std::size_t>(
      std::floor(train_fraction * static_cast<double>(normal.size())));
  plan.train_ids.assign(normal.begin(), normal.begin() + n_train);
  plan.test_ids.insert(plan.test_ids.end(), normal.begin() + n_train, normal.end());
  std::sort(plan.train_ids.begin(), plan.train_ids.end());
  std::sort(plan.test_ids.begin(), plan.test_ids.end());
  return plan;
}

/// Seeded permutation chunked into batches of `size`; a final chunk shorter
/// than 2 is merged into the previous batch.
inline std::vector<std::vector<int>> make_batches(std::vector<int> ids,
                                                  std::size_t size,
                                                  std::uint64_t seed) {
  if (size < 2) fail(ErrorKind::kBatch, "batch size must be at least 2");
  if (ids.size() < 2) {
    fail(ErrorKind::kBatch, "need at least 2 ids to batch, got " +
                                std::to_string(ids.size()));
  }
  Rng rng(seed);
  shuffle(ids, rng);
  std::vector<std::vector<int>> out;
  for (std::size_t b = 0; b < ids.size(); b += size) {
    const std::size_t e = std::min(ids.size(), b + size);
    out.emplace_back(ids.begin() + static_cast<std::ptrdiff_t>(b),
                     ids.begin() + static_cast<std::ptrdiff_t>(e));
  }
  if (out.size() > 1 && out.back().size() < 2) {
    auto tail = std::move(out.back());
    out.pop_back();
    out.back().insert(out.back().end(), tail.begin(), tail.end());
  }
  return out;
}

}  // namespace hcglad
