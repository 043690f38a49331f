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

// Run configuration as flat `key = value` text with `#` comments.
//
// Hyper-parameters with a known search range are checked against it;
// values outside need `allow_out_of_range = true`. Structural constraints
// (batch size >= 2, tau > 0, ...) always apply.

#pragma once

#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hcglad/error.hpp"
#include "hcglad/graph_io.hpp"
#include "hcglad/hyperbolicity.hpp"
#include "hcglad/trainer.hpp"

namespace hcglad {

struct RunConfig {
  TrainConfig train;
  std::string dataset;
  std::string data_dir = ".";
  std::string out_dir = "out";
  CorpusHyperbolicityOptions hyperbolicity;
  bool allow_out_of_range = false;
};

namespace config_detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(x)) {
    fail(ErrorKind::kConfig, "key '" + key + "': '" + v + "' is not a finite number");
  }
  return x;
}

inline long long parse_int(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) {
    fail(ErrorKind::kConfig, "key '" + key + "': '" + v + "' is not an integer");
  }
  return x;
}

inline int parse_small_int(const std::string& key, const std::string& v) {
  const long long x = parse_int(key, v);
  if (x < -1000000000LL || x > 1000000000LL) {
    fail(ErrorKind::kConfig, "key '" + key + "': " + v + " is out of integer range");
  }
  return static_cast<int>(x);
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  if (!v.empty() && v[0] == '-') {
    fail(ErrorKind::kConfig, "key '" + key + "': '" + v + "' must be non-negative");
  }
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) {
    fail(ErrorKind::kConfig, "key '" + key + "': '" + v + "' is not an unsigned integer");
  }
  return static_cast<std::uint64_t>(x);
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(ErrorKind::kConfig, "key '" + key + "': '" + v + "' is not a boolean");
}

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace config_detail

/// Sets one key. Unknown keys and malformed values throw kConfig.
inline void apply_setting(RunConfig& rc, const std::string& key, const std::string& value) {
  using namespace config_detail;
  static const std::map<std::string, std::function<void(RunConfig&, const std::string&,
                                                        const std::string&)>>
      setters = {
          {"epochs", [](RunConfig& r, auto& k, auto& v) { r.train.epochs = parse_small_int(k, v); }},
          {"batch_size", [](RunConfig& r, auto& k, auto& v) { r.train.batch_size = parse_small_int(k, v); }},
          {"learning_rate", [](RunConfig& r, auto& k, auto& v) { r.train.learning_rate = parse_double(k, v); }},
          {"weight_decay", [](RunConfig& r, auto& k, auto& v) { r.train.weight_decay = parse_double(k, v); }},
          {"momentum", [](RunConfig& r, auto& k, auto& v) { r.train.momentum = parse_double(k, v); }},
          {"seed", [](RunConfig& r, auto& k, auto& v) { r.train.seed = parse_u64(k, v); }},
          {"num_layers", [](RunConfig& r, auto& k, auto& v) { r.train.encoder.num_layers = parse_small_int(k, v); }},
          {"hidden_dim", [](RunConfig& r, auto& k, auto& v) { r.train.encoder.hidden_dim = parse_small_int(k, v); }},
          {"mlp_layers", [](RunConfig& r, auto& k, auto& v) { r.train.encoder.mlp_layers = parse_small_int(k, v); }},
          {"final_activation", [](RunConfig& r, auto& k, auto& v) { r.train.encoder.final_activation = parse_bool(k, v); }},
          {"manifold", [](RunConfig& r, auto& k, auto& v) {
             if (v == "lorentz") r.train.encoder.manifold = Manifold::kLorentz;
             else if (v == "flat") r.train.encoder.manifold = Manifold::kFlat;
             else fail(ErrorKind::kConfig, "key '" + k + "': expected lorentz or flat, got '" + v + "'");
           }},
          {"graph_encoder", [](RunConfig&, auto& k, auto& v) {
             if (v != "gcn") fail(ErrorKind::kConfig, "key '" + k + "': only gcn is implemented, got '" + v + "'");
           }},
          {"hypergraph_encoder", [](RunConfig&, auto& k, auto& v) {
             if (v != "hgnn" && v != "hgcn") {
               fail(ErrorKind::kConfig, "key '" + k + "': only hgnn (alias hgcn) is implemented, got '" + v + "'");
             }
           }},
          {"tau", [](RunConfig& r, auto& k, auto& v) { r.train.contrast.tau = parse_double(k, v); }},
          {"xi1", [](RunConfig& r, auto& k, auto& v) { r.train.contrast.xi1 = parse_double(k, v); }},
          {"xi2", [](RunConfig& r, auto& k, auto& v) { r.train.contrast.xi2 = parse_double(k, v); }},
          {"lambda1", [](RunConfig& r, auto& k, auto& v) { r.train.contrast.lambda1 = parse_double(k, v); }},
          {"lambda2", [](RunConfig& r, auto& k, auto& v) { r.train.contrast.lambda2 = parse_double(k, v); }},
          {"walk_length", [](RunConfig& r, auto& k, auto& v) { r.train.walk_length = parse_small_int(k, v); }},
          {"train_fraction", [](RunConfig& r, auto& k, auto& v) { r.train.train_fraction = parse_double(k, v); }},
          {"inference_batch_size", [](RunConfig& r, auto& k, auto& v) { r.train.inference_batch_size = parse_small_int(k, v); }},
          {"whole_set_scoring", [](RunConfig& r, auto& k, auto& v) { r.train.whole_set_scoring = parse_bool(k, v); }},
          {"anomaly_class", [](RunConfig& r, auto& k, auto& v) {
             r.train.anomaly_class = v == "minority" ? AnomalyClass::minority()
                                                     : AnomalyClass::of(parse_small_int(k, v));
           }},
          {"feature_source", [](RunConfig& r, auto& k, auto& v) {
             if (v == "auto") r.train.feature_source = FeatureSource::kAuto;
             else if (v == "attributes") r.train.feature_source = FeatureSource::kAttributes;
             else if (v == "labels") r.train.feature_source = FeatureSource::kLabels;
             else if (v == "degree") r.train.feature_source = FeatureSource::kDegree;
             else fail(ErrorKind::kConfig, "key '" + k + "': unknown feature source '" + v + "'");
           }},
          {"max_degree_bucket", [](RunConfig& r, auto& k, auto& v) { r.train.max_degree_bucket = parse_small_int(k, v); }},
          {"dataset", [](RunConfig& r, auto&, auto& v) { r.dataset = v; }},
          {"data_dir", [](RunConfig& r, auto&, auto& v) { r.data_dir = v; }},
          {"out", [](RunConfig& r, auto&, auto& v) { r.out_dir = v; }},
          {"allow_out_of_range", [](RunConfig& r, auto& k, auto& v) { r.allow_out_of_range = parse_bool(k, v); }},
          {"hyperbolicity_mode", [](RunConfig& r, auto& k, auto& v) {
             if (v == "auto") r.hyperbolicity.mode = HyperbolicityMode::kAuto;
             else if (v == "exhaustive") r.hyperbolicity.mode = HyperbolicityMode::kExhaustive;
             else if (v == "sampled") r.hyperbolicity.mode = HyperbolicityMode::kSampled;
             else fail(ErrorKind::kConfig, "key '" + k + "': unknown mode '" + v + "'");
           }},
          {"hyperbolicity_cap", [](RunConfig& r, auto& k, auto& v) { r.hyperbolicity.cap = parse_small_int(k, v); }},
          {"hyperbolicity_samples", [](RunConfig& r, auto& k, auto& v) { r.hyperbolicity.samples = parse_u64(k, v); }},
          {"delta_aggregate", [](RunConfig& r, auto& k, auto& v) {
             if (v == "max") r.hyperbolicity.delta_aggregate = Aggregate::kMax;
             else if (v == "mean") r.hyperbolicity.delta_aggregate = Aggregate::kMean;
             else fail(ErrorKind::kConfig, "key '" + k + "': expected max or mean");
           }},
          {"delta_avg_aggregate", [](RunConfig& r, auto& k, auto& v) {
             if (v == "max") r.hyperbolicity.delta_avg_aggregate = Aggregate::kMax;
             else if (v == "mean") r.hyperbolicity.delta_avg_aggregate = Aggregate::kMean;
             else fail(ErrorKind::kConfig, "key '" + k + "': expected max or mean");
           }},
      };
  auto it = setters.find(key);
  if (it == setters.end()) fail(ErrorKind::kConfig, "unknown config key '" + key + "'");
  it->second(rc, key, value);
}

/// Parses `key=value` (as given to --set).
inline void apply_assignment(RunConfig& rc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    fail(ErrorKind::kConfig, "expected key=value, got '" + std::string(assignment) + "'");
  }
  const std::string key = config_detail::trim(assignment.substr(0, eq));
  if (key.empty()) fail(ErrorKind::kConfig, "empty key in '" + std::string(assignment) + "'");
  apply_setting(rc, key, config_detail::trim(assignment.substr(eq + 1)));
}

inline void apply_config_text(RunConfig& rc, std::string_view text,
                              const std::string& origin = "config") {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (config_detail::trim(line).empty()) continue;
    try {
      apply_assignment(rc, line);
    } catch (const Error& e) {
      fail(ErrorKind::kConfig, origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

inline void apply_config_file(RunConfig& rc, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kConfig, "cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  apply_config_text(rc, ss.str(), path.string());
}

struct RangeViolation {
  std::string key;
  std::string value;
  std::string range;
};

/// Keys whose value lies outside the configured search range.
inline std::vector<RangeViolation> search_range_violations(const RunConfig& rc) {
  using config_detail::fmt;
  const TrainConfig& t = rc.train;
  std::vector<RangeViolation> out;
  auto check = [&out](const std::string& key, double v, double lo, double hi) {
    if (v < lo || v > hi) {
      out.push_back({key, fmt(v), "[" + fmt(lo) + ", " + fmt(hi) + "]"});
    }
  };
  // epochs = 0 is the "initialize only" run and is always allowed.
  if (t.epochs != 0) check("epochs", t.epochs, 10, 2500);
  check("learning_rate", t.learning_rate, 1e-5, 1e-2);
  check("num_layers", t.encoder.num_layers, 2, 7);
  check("hidden_dim", t.encoder.hidden_dim, 2, 64);
  check("mlp_layers", t.encoder.mlp_layers, 1, 5);
  check("lambda1", t.contrast.lambda1, 0.1, 1.0);
  check("lambda2", t.contrast.lambda2, 0.1, 1.0);
  check("weight_decay", t.weight_decay, 0.001, 0.30);
  check("momentum", t.momentum, 0.90, 0.99);
  check("tau", t.contrast.tau, 0.1, 1.2);
  return out;
}

/// Structural checks always; search ranges unless allow_out_of_range.
inline void validate(const RunConfig& rc) {
  const TrainConfig& t = rc.train;
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) fail(ErrorKind::kConfig, msg);
  };
  require(t.epochs >= 0, "epochs must be >= 0");
  require(t.batch_size >= 2, "batch_size must be >= 2");
  require(t.inference_batch_size >= 2, "inference_batch_size must be >= 2");
  require(t.learning_rate > 0.0, "learning_rate must be > 0");
  require(t.weight_decay >= 0.0, "weight_decay must be >= 0");
  require(t.momentum >= 0.0 && t.momentum < 1.0, "momentum must lie in [0, 1)");
  require(t.encoder.num_layers >= 1, "num_layers must be >= 1");
  require(t.encoder.hidden_dim >= 1, "hidden_dim must be >= 1");
  require(t.encoder.mlp_layers >= 1, "mlp_layers must be >= 1");
  require(t.walk_length >= 1, "walk_length must be >= 1");
  require(t.train_fraction > 0.0 && t.train_fraction < 1.0,
          "train_fraction must lie in (0, 1)");
  require(t.max_degree_bucket >= 1, "max_degree_bucket must be >= 1");
  require(rc.hyperbolicity.cap >= 4, "hyperbolicity_cap must be >= 4");
  require(rc.hyperbolicity.samples >= 1, "hyperbolicity_samples must be >= 1");
  t.contrast.validate();
  if (rc.allow_out_of_range) return;
  const auto bad = search_range_violations(rc);
  if (!bad.empty()) {
    std::string msg = "outside the search range (set allow_out_of_range = true):";
    for (const auto& v : bad) msg += " " + v.key + "=" + v.value + " not in " + v.range + ";";
    fail(ErrorKind::kConfig, msg);
  }
}

/// Canonical key=value echo of the training-relevant settings.
inline std::vector<std::pair<std::string, std::string>> config_entries(const TrainConfig& t) {
  using config_detail::fmt;
  auto source = [](FeatureSource s) {
    switch (s) {
      case FeatureSource::kAuto: return "auto";
      case FeatureSource::kAttributes: return "attributes";
      case FeatureSource::kLabels: return "labels";
      case FeatureSource::kDegree: return "degree";
    }
    return "auto";
  };
  return {
      {"epochs", std::to_string(t.epochs)},
      {"batch_size", std::to_string(t.batch_size)},
      {"learning_rate", fmt(t.learning_rate)},
      {"weight_decay", fmt(t.weight_decay)},
      {"momentum", fmt(t.momentum)},
      {"seed", std::to_string(t.seed)},
      {"num_layers", std::to_string(t.encoder.num_layers)},
      {"hidden_dim", std::to_string(t.encoder.hidden_dim)},
      {"mlp_layers", std::to_string(t.encoder.mlp_layers)},
      {"final_activation", t.encoder.final_activation ? "true" : "false"},
      {"manifold", t.encoder.manifold == Manifold::kLorentz ? "lorentz" : "flat"},
      {"tau", fmt(t.contrast.tau)},
      {"xi1", fmt(t.contrast.xi1)},
      {"xi2", fmt(t.contrast.xi2)},
      {"lambda1", fmt(t.contrast.lambda1)},
      {"lambda2", fmt(t.contrast.lambda2)},
      {"walk_length", std::to_string(t.walk_length)},
      {"train_fraction", fmt(t.train_fraction)},
      {"inference_batch_size", std::to_string(t.inference_batch_size)},
      {"whole_set_scoring", t.whole_set_scoring ? "true" : "false"},
      {"anomaly_class",
       t.anomaly_class.label ? std::to_string(*t.anomaly_class.label) : "minority"},
      {"feature_source", source(t.feature_source)},
      {"max_degree_bucket", std::to_string(t.max_degree_bucket)},
  };
}

}  // namespace hcglad
