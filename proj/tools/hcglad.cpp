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

// hcglad command-line driver.
//
//   hcglad train         --config run.conf --out out/
//   hcglad eval          --config run.conf --params out/params.hcglad
//   hcglad score         --config run.conf --params out/params.hcglad
//   hcglad motif-stats   --dataset AIDS --data-dir data/
//   hcglad hyperbolicity --dataset AIDS --data-dir data/
//   hcglad gradcheck
//
// Exit codes: 0 ok, 1 internal, 2 config, 3 data or snapshot, 4 divergence,
// 5 metric undefined (single-class test split), 6 gradcheck failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hcglad/hcglad.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

enum ExitCode {
  kOk = 0,
  kInternal = 1,
  kConfigError = 2,
  kDataError = 3,
  kDivergence = 4,
  kMetricUndefined = 5,
  kGradcheckFailed = 6,
};

int exit_code_for(hcglad::ErrorKind kind) {
  using hcglad::ErrorKind;
  switch (kind) {
    case ErrorKind::kConfig:
      return kConfigError;
    case ErrorKind::kIngestion:
    case ErrorKind::kConsistency:
    case ErrorKind::kSnapshot:
    case ErrorKind::kSplit:
    case ErrorKind::kBatch:
    case ErrorKind::kDimension:
    case ErrorKind::kCapExceeded:
      return kDataError;
    case ErrorKind::kDivergence:
      return kDivergence;
    case ErrorKind::kMetric:
      return kMetricUndefined;
    default:
      return kInternal;
  }
}

struct Flags {
  std::string config;
  std::string dataset;
  std::string data_dir;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
  std::string params;
  std::string fault;
  double fault_factor = 2.0;
};

hcglad::RunConfig resolve_config(const Flags& f) {
  hcglad::RunConfig rc;
  if (!f.config.empty()) hcglad::apply_config_file(rc, f.config);
  if (!f.dataset.empty()) rc.dataset = f.dataset;
  if (!f.data_dir.empty()) rc.data_dir = f.data_dir;
  if (!f.out.empty()) rc.out_dir = f.out;
  if (f.seed) rc.train.seed = *f.seed;
  for (const auto& s : f.sets) hcglad::apply_assignment(rc, s);
  hcglad::validate(rc);
  return rc;
}

hcglad::Corpus load_corpus(const hcglad::RunConfig& rc,
                           hcglad::IngestionReport* report = nullptr) {
  if (rc.dataset.empty()) {
    hcglad::fail(hcglad::ErrorKind::kConfig, "no dataset given (--dataset or dataset = ...)");
  }
  fs::path dir = fs::path(rc.data_dir) / rc.dataset;
  // Accept both <data_dir>/<name>/<name>_A.txt and <data_dir>/<name>_A.txt.
  if (!fs::is_directory(dir)) dir = fs::path(rc.data_dir);
  if (!fs::exists(dir / (rc.dataset + "_A.txt"))) {
    hcglad::fail(hcglad::ErrorKind::kIngestion,
                 "dataset " + rc.dataset + " not found: expected " +
                     (fs::path(rc.data_dir) / rc.dataset / (rc.dataset + "_A.txt")).string());
  }
  return hcglad::parse_tudataset(dir, rc.dataset, report);
}

fs::path ensure_out_dir(const hcglad::RunConfig& rc) {
  const fs::path out(rc.out_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) {
    hcglad::fail(hcglad::ErrorKind::kIngestion,
                 "cannot create output directory " + out.string() + ": " + ec.message());
  }
  return out;
}

json config_json(const hcglad::TrainConfig& t) {
  json j = json::object();
  for (const auto& [k, v] : hcglad::config_entries(t)) j[k] = v;
  return j;
}

json split_json(const hcglad::SplitPlan& s) {
  return json{{"anomaly_class", s.anomaly_class},
              {"train_graphs", s.train_ids.size()},
              {"test_graphs", s.test_ids.size()},
              {"seed", s.seed}};
}

std::string config_text(const hcglad::TrainConfig& t) {
  std::string s;
  for (const auto& [k, v] : hcglad::config_entries(t)) s += k + " = " + v + "\n";
  return s;
}

int cmd_train(const Flags& f) {
  const hcglad::RunConfig rc = resolve_config(f);
  hcglad::IngestionReport ing;
  const hcglad::Corpus corpus = load_corpus(rc, &ing);
  const hcglad::SplitPlan split = hcglad::make_split(
      corpus, rc.train.anomaly_class, rc.train.train_fraction, rc.train.seed);
  const fs::path out = ensure_out_dir(rc);

  json ij{{"dataset", corpus.name},
          {"graphs", ing.graphs},
          {"nodes", ing.nodes},
          {"edges", ing.edges},
          {"dropped_self_loops", ing.dropped_self_loops},
          {"dropped_duplicates", ing.dropped_duplicates},
          {"label_counts", json::object()},
          {"split", split_json(split)}};
  for (const auto& [label, count] : corpus.label_counts()) {
    ij["label_counts"][std::to_string(label)] = count;
  }
  hcglad::write_text(out / "ingestion.json", ij.dump(2) + "\n");

  const hcglad::TrainResult r = hcglad::train(corpus, split, rc.train);
  hcglad::save_params(r.params, out / "params.hcglad");
  hcglad::write_text(out / "loss.csv", hcglad::loss_csv(r.loss_curve));
  hcglad::write_text(out / "config.txt", config_text(rc.train));
  std::printf("trained %d epochs on %zu graphs of %s\n", rc.train.epochs,
              split.train_ids.size(), corpus.name.c_str());
  if (!r.loss_curve.empty()) {
    std::printf("final_loss=%.6f\n", r.loss_curve.back().total);
  }
  return kOk;
}

fs::path params_path(const Flags& f, const hcglad::RunConfig& rc) {
  return f.params.empty() ? fs::path(rc.out_dir) / "params.hcglad" : fs::path(f.params);
}

int cmd_eval(const Flags& f) {
  const hcglad::RunConfig rc = resolve_config(f);
  const hcglad::EncoderParams params = hcglad::load_params(params_path(f, rc));
  const hcglad::Corpus corpus = load_corpus(rc);
  const auto counts = corpus.label_counts();
  if (counts.size() < 2) {
    hcglad::fail(hcglad::ErrorKind::kMetric,
                 "every graph of " + corpus.name + " has label " +
                     std::to_string(counts.begin()->first) +
                     ": the test split has a single class and AUC is undefined");
  }
  const hcglad::SplitPlan split = hcglad::make_split(
      corpus, rc.train.anomaly_class, rc.train.train_fraction, rc.train.seed);
  const hcglad::EvalReport rep = hcglad::evaluate(params, corpus, split, rc.train);
  const fs::path out = ensure_out_dir(rc);

  json scores = json::array();
  for (const auto& g : rep.scores) {
    scores.push_back({{"graph_id", g.graph_id}, {"score", g.score},
                      {"is_anomaly", g.is_anomaly}});
  }
  json j{{"dataset", rep.dataset},
         {"auc", rep.auc},
         {"split", {{"anomaly_class", rep.split.anomaly_class},
                    {"train_graphs", rep.split.train_graphs},
                    {"test_graphs", rep.split.test_graphs},
                    {"test_anomalies", rep.split.test_anomalies},
                    {"seed", rep.split.seed}}},
         {"config", config_json(rep.config)},
         {"scores", scores}};
  hcglad::write_text(out / "eval_report.json", j.dump(2) + "\n");
  hcglad::write_text(out / "scores.csv", hcglad::scores_csv(rep));
  std::printf("AUC=%.4f\n", rep.auc);
  return kOk;
}

int cmd_score(const Flags& f) {
  const hcglad::RunConfig rc = resolve_config(f);
  const hcglad::EncoderParams params = hcglad::load_params(params_path(f, rc));
  const hcglad::Corpus corpus = load_corpus(rc);
  const int anomaly = hcglad::resolve_anomaly_class(corpus, rc.train.anomaly_class);
  std::vector<int> ids(corpus.size());
  std::iota(ids.begin(), ids.end(), 0);
  const auto scores = hcglad::score_graphs(params, corpus, ids, rc.train, anomaly);
  const fs::path out = ensure_out_dir(rc);
  hcglad::write_text(out / "scores.csv", hcglad::scores_csv(scores));
  std::printf("scored %zu graphs of %s\n", scores.size(), corpus.name.c_str());
  return kOk;
}

int cmd_motif_stats(const Flags& f) {
  const hcglad::RunConfig rc = resolve_config(f);
  const hcglad::Corpus corpus = load_corpus(rc);
  const fs::path out = ensure_out_dir(rc);
  hcglad::write_text(out / "motif_stats.csv", hcglad::motif_stats_csv(corpus));
  std::size_t triangles = 0;
  for (const auto& g : corpus.graphs) triangles += hcglad::motif_stats(g).triangles;
  std::printf("graphs=%zu triangles=%zu\n", corpus.size(), triangles);
  return kOk;
}

int cmd_hyperbolicity(const Flags& f) {
  const hcglad::RunConfig rc = resolve_config(f);
  const hcglad::Corpus corpus = load_corpus(rc);
  hcglad::CorpusHyperbolicityOptions opt = rc.hyperbolicity;
  opt.seed = rc.train.seed;
  const hcglad::CorpusHyperbolicity h = hcglad::corpus_report(corpus, opt);
  const fs::path out = ensure_out_dir(rc);
  hcglad::write_text(out / "hyperbolicity.csv", hcglad::hyperbolicity_csv(h));
  std::printf("delta=%.4f delta_avg=%.4f graphs=%zu\n", h.delta, h.delta_avg,
              h.contributing_graphs);
  return kOk;
}

std::optional<hcglad::OpKind> parse_op(const std::string& name) {
  for (int k = 0;; ++k) {
    const auto op = static_cast<hcglad::OpKind>(k);
    const std::string_view n = hcglad::op_name(op);
    if (n == "unknown") return std::nullopt;
    if (n == name) return op;
  }
}

int cmd_gradcheck(const Flags& f) {
  const hcglad::RunConfig rc = resolve_config(f);
  hcglad::GradcheckOptions opt;
  opt.seed = rc.train.seed;
  opt.encoder = rc.train.encoder;
  opt.contrast = rc.train.contrast;
  if (!f.fault.empty()) {
    opt.fault = parse_op(f.fault);
    if (!opt.fault) {
      hcglad::fail(hcglad::ErrorKind::kConfig, "unknown op for --fault: " + f.fault);
    }
    opt.fault_factor = f.fault_factor;
  }
  const hcglad::GradcheckReport r = hcglad::run_gradcheck(opt);
  for (const auto& p : r.parameters) {
    std::printf("%-28s entries=%-4zu excluded=%-2zu max_abs=%.3e max_rel=%.3e\n",
                p.name.c_str(), p.entries, p.excluded, p.max_abs_error, p.max_rel_error);
  }
  std::printf("max_rel_error=%.3e worst=%s\n", r.max_rel_error, r.worst_parameter.c_str());
  if (!r.passed) {
    std::fprintf(stderr, "gradcheck failed: %s has relative error %.3e >= %.0e\n",
                 r.worst_parameter.c_str(), r.max_rel_error, opt.tolerance);
    return kGradcheckFailed;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hcglad: hyperbolic contrastive graph-level anomaly detection"};
  app.require_subcommand(1);
  Flags flags;

  auto common = [&flags](CLI::App* sub) {
    sub->add_option("--config", flags.config, "key = value config file");
    sub->add_option("--dataset", flags.dataset, "TUDataset name");
    sub->add_option("--data-dir", flags.data_dir, "directory holding the dataset");
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--seed", flags.seed, "master seed");
    sub->add_option("--set", flags.sets, "override, key=value (repeatable)");
  };

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const Flags&);
  };
  const Command commands[] = {
      {"train", "train on the normal graphs of the split", cmd_train},
      {"eval", "score the test split and report AUC", cmd_eval},
      {"score", "score every graph of the dataset", cmd_score},
      {"motif-stats", "per-graph triangle and hyperedge counts", cmd_motif_stats},
      {"hyperbolicity", "Gromov delta per graph and per corpus", cmd_hyperbolicity},
      {"gradcheck", "finite-difference check of every parameter gradient", cmd_gradcheck},
  };
  int (*selected)(const Flags&) = nullptr;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    common(sub);
    const std::string name = c.name;
    if (name == "eval" || name == "score") {
      sub->add_option("--params", flags.params, "parameter snapshot");
    }
    if (name == "gradcheck") {
      sub->add_option("--fault", flags.fault, "corrupt one op's backward rule (testing)");
      sub->add_option("--fault-factor", flags.fault_factor, "gradient scale for --fault");
    }
    sub->callback([&selected, run = c.run] { selected = run; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    return selected(flags);
  } catch (const hcglad::Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", std::string(hcglad::to_string(e.kind())).c_str(),
                 e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInternal;
  }
}
