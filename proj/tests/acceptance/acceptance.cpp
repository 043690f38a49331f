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

// Acceptance suite. Prints one line per criterion:
//
//   criterion <n> <PASS|FAIL|SKIP> <measured> (<threshold>) [<seconds>s]
//
// Usage: acceptance [--criterion N]. Exit 0 when every requested criterion
// passes, 1 on any failure, 77 when the only requested criterion was skipped.
// Criteria 1, 2 and 8 need the public TUDataset corpora AIDS and ENZYMES
// under $HCGLAD_DATA_DIR (either DIR/AIDS/AIDS_A.txt or DIR/AIDS_A.txt).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hcglad/hcglad.hpp"
#include "support/fixtures.hpp"

namespace {

namespace fs = std::filesystem;
using namespace hcglad;
using lorentz::Vector;

// ---- tolerances ------------------------------------------------------------

constexpr double kAidsGate = 0.90;
constexpr double kEnzymesGate = 0.55;
constexpr double kAblationSlack = 0.02;
constexpr double kGradcheckTolerance = 1e-4;
constexpr double kManifoldTolerance = 1e-8;
constexpr double kMaxTangentNorm = 5.0;
constexpr int kSeeds = 5;
constexpr double kAidsSeconds = 30 * 60;
constexpr double kEnzymesSeconds = 20 * 60;
constexpr double kGradcheckSeconds = 120;
constexpr double kQuickSeconds = 60;

enum class Status { kPass, kFail, kSkip };

struct Outcome {
  Status status = Status::kFail;
  std::string detail;
};

Outcome pass_if(bool ok, std::string detail) {
  return {ok ? Status::kPass : Status::kFail, std::move(detail)};
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// ---- datasets ---------------------------------------------------------------

std::optional<Corpus> load_public(const std::string& name) {
  const char* root = std::getenv("HCGLAD_DATA_DIR");
  if (!root || !*root) return std::nullopt;
  for (const fs::path& dir : {fs::path(root) / name, fs::path(root)}) {
    if (fs::exists(dir / (name + "_A.txt"))) return parse_tudataset(dir, name);
  }
  return std::nullopt;
}

Outcome missing(const std::string& name) {
  return {Status::kSkip, name + " not found under $HCGLAD_DATA_DIR"};
}

struct SeedRuns {
  std::vector<double> aucs;
  double mean = 0.0;
  double seconds = 0.0;
};

SeedRuns run_seeds(const Corpus& c, TrainConfig cfg) {
  SeedRuns r;
  Stopwatch sw;
  for (int s = 0; s < kSeeds; ++s) {
    cfg.seed = static_cast<std::uint64_t>(s);
    const SplitPlan split = make_split(c, cfg.anomaly_class, cfg.train_fraction, cfg.seed);
    const TrainResult t = train(c, split, cfg);
    r.aucs.push_back(evaluate(t.params, c, split, cfg).auc);
    r.mean += r.aucs.back() / kSeeds;
  }
  r.seconds = sw.seconds();
  return r;
}

std::string auc_list(const SeedRuns& r) {
  std::string s = "[";
  for (std::size_t k = 0; k < r.aucs.size(); ++k) {
    s += (k ? " " : "") + fmt("%.4f", r.aucs[k]);
  }
  return s + "]";
}

// ---- criteria ---------------------------------------------------------------

Outcome criterion_end_to_end(const std::string& name, double gate, double budget) {
  const auto c = load_public(name);
  if (!c) return missing(name);
  const SeedRuns r = run_seeds(*c, TrainConfig{});
  return pass_if(r.mean >= gate && r.seconds <= budget,
                 name + " mean AUC " + fmt("%.4f", r.mean) + " " + auc_list(r) + " (>= " +
                     fmt("%.2f", gate) + ", <= " + fmt("%.0f", budget) + "s; took " +
                     fmt("%.0f", r.seconds) + "s)");
}

Outcome criterion_gradcheck() {
  Stopwatch sw;
  const GradcheckReport r = run_gradcheck(GradcheckOptions{});
  const double t = sw.seconds();
  std::size_t entries = 0;
  for (const auto& p : r.parameters) entries += p.entries;
  return pass_if(r.max_rel_error < kGradcheckTolerance && t <= kGradcheckSeconds,
                 "max relative error " + fmt("%.3e", r.max_rel_error) + " at " +
                     r.worst_parameter + " over " + std::to_string(r.parameters.size()) +
                     " parameters / " + std::to_string(entries) + " entries, " +
                     std::to_string(r.excluded) + " kink-excluded (< " +
                     fmt("%.0e", kGradcheckTolerance) + ", " + fmt("%.1f", t) + "s)");
}

Vector random_direction(Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vector v(d);
  for (Index i = 0; i < d; ++i) v(i) = n(rng);
  return v / v.norm();
}

// Tangent vector at x with Lorentzian norm `len`.
Vector tangent_at(const lorentz::LorentzPoint& x, double len, std::mt19937_64& rng) {
  Vector v = Vector::Zero(x.coords().size());
  v.tail(v.size() - 1) = random_direction(v.size() - 1, rng);
  v += lorentz::inner(x.coords(), v) * x.coords();
  return v * (len / std::sqrt(lorentz::inner(v, v)));
}

Outcome criterion_manifold() {
  Stopwatch sw;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_constraint = 0.0;
  double worst_roundtrip = 0.0;
  int evaluations = 0;
  auto constraint = [&](const Matrix& rows) {
    for (Index i = 0; i < rows.rows(); ++i) {
      worst_constraint = std::max(
          worst_constraint, lorentz::constraint_violation(rows.row(i).transpose()));
    }
  };
  for (int k = 0; k < 2500; ++k) {
    const Index d = 2 + k % 15;
    // Lift at the origin and back.
    const Vector u = random_direction(d, rng) * kMaxTangentNorm * unit(rng);
    const auto p = lorentz::lift(u);
    constraint(p.coords().transpose());
    worst_roundtrip = std::max(worst_roundtrip, (lorentz::log_origin(p) - u).norm());
    ++evaluations;

    // exp/log at a random base point.
    const auto x = lorentz::lift(random_direction(d, rng) * 2.0 * unit(rng));
    const Vector v = tangent_at(x, kMaxTangentNorm * unit(rng), rng);
    const auto y = lorentz::exp_map(lorentz::TangentVector::at(x, v));
    constraint(y.coords().transpose());
    worst_roundtrip =
        std::max(worst_roundtrip, (lorentz::log_map(x, y).coords() - v).norm());
    ++evaluations;

    // Tangent-space pooling of a batch of lifted points.
    Matrix us(3 + k % 5, d);
    for (Index i = 0; i < us.rows(); ++i) {
      us.row(i) = (random_direction(d, rng) * kMaxTangentNorm * unit(rng)).transpose();
    }
    Tape tape;
    const Tensor pts = tape.exp_origin(Tensor::constant(us));
    constraint(pts.value());
    const Tensor pooled = pool_graph(tape, pts, std::vector<Index>{us.rows()},
                                     Manifold::kLorentz);
    constraint(pooled.value());
    ++evaluations;

    // Projection head with operator norms below 1, so outputs stay within the
    // tangent-norm budget.
    Head head;
    for (int l = 0; l < 2; ++l) {
      Matrix w = fixtures::random_matrix(d, d, rng, -1.0, 1.0);
      const double s = Eigen::JacobiSVD<Matrix>(w).singularValues()(0);
      head.weights.push_back(Tensor::constant(w * (0.9 / s)));
      head.biases.push_back(Tensor::constant(
          (random_direction(d, rng) * 0.2 * unit(rng)).transpose()));
    }
    const Tensor z = project_head(tape, pts, head, Manifold::kLorentz);
    constraint(z.value());
    ++evaluations;
  }
  const double t = sw.seconds();
  return pass_if(worst_constraint <= kManifoldTolerance &&
                     worst_roundtrip <= kManifoldTolerance && t <= kQuickSeconds,
                 std::to_string(evaluations) + " evaluations: max |<x,x>+1| " +
                     fmt("%.2e", worst_constraint) + ", max roundtrip " +
                     fmt("%.2e", worst_roundtrip) + " (<= " +
                     fmt("%.0e", kManifoldTolerance) + ", tangent norms <= " +
                     fmt("%.0f", kMaxTangentNorm) + ", " + fmt("%.1f", t) + "s)");
}

Outcome criterion_motif() {
  Stopwatch sw;
  std::mt19937_64 rng(5);
  const double ps[] = {0.2, 0.5, 0.8};
  int mismatched = 0, uncovered = 0;
  for (int k = 0; k < 100; ++k) {
    const int n = 1 + static_cast<int>(rng() % 12);
    const Graph g = make_graph(k, n, fixtures::erdos_renyi_edges(n, ps[k % 3], rng));
    if (relation_matrix(g.adjacency()) != fixtures::triangle_counts(g)) ++mismatched;
    const Hypergraph hg = build_hypergraph(g);
    for (int u = 0; u < n; ++u) {
      for (int v : g.neighbors[static_cast<std::size_t>(u)]) {
        const bool covered = std::any_of(
            hg.hyperedges.begin(), hg.hyperedges.end(), [&](const std::vector<int>& e) {
              return std::count(e.begin(), e.end(), u) && std::count(e.begin(), e.end(), v);
            });
        uncovered += covered ? 0 : 1;
      }
    }
  }
  const double t = sw.seconds();
  return pass_if(mismatched == 0 && uncovered == 0 && t <= kQuickSeconds,
                 "100 graphs: " + std::to_string(mismatched) + " relation mismatches, " +
                     std::to_string(uncovered) + " uncovered edges (0, 0, " +
                     fmt("%.2f", t) + "s)");
}

double pairwise_auc(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0) continue;
      pairs += 1.0;
      wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  }
  return wins / pairs;
}

Outcome criterion_auc() {
  Stopwatch sw;
  std::mt19937_64 rng(6);
  int unequal = 0;
  for (int k = 0; k < 1000; ++k) {
    const int n = 2 + static_cast<int>(rng() % 199);
    std::vector<double> s(static_cast<std::size_t>(n));
    std::vector<int> y(static_cast<std::size_t>(n));
    const int levels = 1 + static_cast<int>(rng() % 20);  // few levels = many ties
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
      s[i] = k % 2 ? static_cast<double>(rng() % levels) : u(rng);
      y[i] = static_cast<int>(rng() % 2);
    }
    if (k % 2 == 0) {
      for (int i = 0; i + 1 < n; i += 3) s[i + 1] = s[i];  // inject ties
    }
    y[0] = 0;
    y[1] = 1;
    if (compute_auc(s, y) != pairwise_auc(s, y)) ++unequal;
  }
  const double t = sw.seconds();
  return pass_if(unequal == 0 && t <= kQuickSeconds,
                 "1000 instances: " + std::to_string(unequal) +
                     " differ from pairwise counting (exact, " + fmt("%.2f", t) + "s)");
}

Outcome criterion_hyperbolicity() {
  Stopwatch sw;
  std::mt19937_64 rng(7);
  double tree_max = 0.0;
  for (int k = 0; k < 50; ++k) {
    const int n = 4 + static_cast<int>(rng() % 9);
    tree_max = std::max(
        tree_max, exhaustive(make_graph(k, n, fixtures::random_tree_edges(n, rng))).delta_worst);
  }
  const double c4 = exhaustive(make_graph(0, 4, fixtures::cycle_edges(4))).delta_worst;
  const double c5 = exhaustive(make_graph(0, 5, fixtures::cycle_edges(5))).delta_worst;
  const double k4 = exhaustive(make_graph(0, 4, fixtures::complete_edges(4))).delta_worst;
  int sampled_above = 0;
  for (int k = 0; k < 20; ++k) {
    const int n = 4 + static_cast<int>(rng() % 7);
    const Graph g = make_graph(k, n, fixtures::erdos_renyi_edges(n, 0.5, rng));
    if (sampled(g, 2000, static_cast<std::uint64_t>(k)).delta_worst >
        exhaustive(g).delta_worst) {
      ++sampled_above;
    }
  }
  std::string detail = "trees max " + fmt("%g", tree_max) + ", C4 " + fmt("%g", c4) +
                       ", C5 " + fmt("%g", c5) + ", K4 " + fmt("%g", k4) + ", " +
                       std::to_string(sampled_above) +
                       " sampled > exhaustive (0, 1, 0.5, 0, 0)";
  // Reported next to the reference per-dataset value; no gate.
  if (const auto aids = load_public("AIDS")) {
    const auto h = corpus_report(*aids);
    detail += "; AIDS delta " + fmt("%.2f", h.delta) + " (max), delta_avg " +
              fmt("%.3f", h.delta_avg) + " (reference 0.74, not gated)";
  }
  detail += ", " + fmt("%.1f", sw.seconds()) + "s";
  return pass_if(tree_max == 0.0 && c4 == 1.0 && c5 == 0.5 && k4 == 0.0 && sampled_above == 0,
                 detail);
}

Outcome criterion_ablation() {
  const auto c = load_public("AIDS");
  if (!c) return missing("AIDS");
  const SeedRuns full = run_seeds(*c, TrainConfig{});
  TrainConfig no_hyper;
  no_hyper.contrast.lambda2 = 0.0;
  const SeedRuns a = run_seeds(*c, no_hyper);
  TrainConfig flat;
  flat.encoder.manifold = Manifold::kFlat;
  const SeedRuns b = run_seeds(*c, flat);
  return pass_if(a.mean <= full.mean + kAblationSlack && b.mean <= full.mean + kAblationSlack,
                 "full " + fmt("%.4f", full.mean) + ", lambda2=0 " + fmt("%.4f", a.mean) +
                     ", flat " + fmt("%.4f", b.mean) + " (ablations <= full + " +
                     fmt("%.2f", kAblationSlack) + ")");
}

Outcome criterion_determinism() {
  Stopwatch sw;
  const fs::path dir = fs::temp_directory_path() / "hcglad_acceptance_determinism";
  fs::remove_all(dir);
  write_tudataset(fixtures::planted_corpus(9), dir);
  TrainConfig cfg;
  cfg.anomaly_class = AnomalyClass::of(1);
  cfg.seed = 17;
  auto run = [&] {
    const Corpus c = parse_tudataset(dir, "PLANTED");
    const SplitPlan split = make_split(c, cfg.anomaly_class, cfg.train_fraction, cfg.seed);
    const TrainResult t = train(c, split, cfg);
    return scores_csv(evaluate(t.params, c, split, cfg));
  };
  const std::string a = run();
  const std::string b = run();
  fs::remove_all(dir);
  return pass_if(a == b && !a.empty(),
                 std::string(a == b ? "identical" : "different") + " scores CSV (" +
                     std::to_string(a.size()) + " bytes, byte-identical, " +
                     fmt("%.1f", sw.seconds()) + "s)");
}

const std::map<int, std::function<Outcome()>>& criteria() {
  static const std::map<int, std::function<Outcome()>> table = {
      {1, [] { return criterion_end_to_end("AIDS", kAidsGate, kAidsSeconds); }},
      {2, [] { return criterion_end_to_end("ENZYMES", kEnzymesGate, kEnzymesSeconds); }},
      {3, criterion_gradcheck},
      {4, criterion_manifold},
      {5, criterion_motif},
      {6, criterion_auc},
      {7, criterion_hyperbolicity},
      {8, criterion_ablation},
      {9, criterion_determinism},
  };
  return table;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) {
      which.push_back(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: acceptance [--criterion N]\n");
      return 2;
    }
  }
  if (which.empty()) {
    for (const auto& [n, f] : criteria()) which.push_back(n);
  }
  int failed = 0, skipped = 0;
  for (int n : which) {
    const auto it = criteria().find(n);
    if (it == criteria().end()) {
      std::fprintf(stderr, "no criterion %d\n", n);
      return 2;
    }
    Outcome o;
    try {
      o = it->second();
    } catch (const std::exception& e) {
      o = {Status::kFail, std::string("error: ") + e.what()};
    }
    const char* tag = o.status == Status::kPass ? "PASS" : o.status == Status::kSkip ? "SKIP" : "FAIL";
    std::printf("criterion %d %s %s\n", n, tag, o.detail.c_str());
    std::fflush(stdout);
    failed += o.status == Status::kFail;
    skipped += o.status == Status::kSkip;
  }
  if (failed) return 1;
  if (skipped == static_cast<int>(which.size())) return 77;
  return 0;
}
