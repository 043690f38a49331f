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

// Portable text container for encoder parameters.
//
//   HCGLAD1
//   encoder <num_layers> <hidden_dim> <mlp_layers> <final_activation> <manifold>
//   input_dims <view1> <view2>
//   param <name> <rows> <cols>
//   <one line of %.17g values per row>
//   ...
//   checksum <fnv1a of everything above, hex>
//
// %.17g round-trips every double, so save -> load is bit-exact.

#pragma once

#include <cerrno>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hcglad/encoders.hpp"
#include "hcglad/error.hpp"
#include "hcglad/random.hpp"

namespace hcglad {

inline constexpr const char* kSnapshotMagic = "HCGLAD1";

inline std::string serialize_params(const EncoderParams& p) {
  std::string body;
  char buf[64];
  body += kSnapshotMagic;
  body += '\n';
  const EncoderConfig& c = p.config;
  body += "encoder " + std::to_string(c.num_layers) + " " + std::to_string(c.hidden_dim) +
          " " + std::to_string(c.mlp_layers) + " " +
          (c.final_activation ? "1" : "0") + " " +
          (c.manifold == Manifold::kLorentz ? "lorentz" : "flat") + "\n";
  body += "input_dims " + std::to_string(p.input_dims[0]) + " " +
          std::to_string(p.input_dims[1]) + "\n";
  for (const auto& np : p.named_parameters()) {
    const Matrix& m = np.tensor.value();
    body += "param " + np.name + " " + std::to_string(m.rows()) + " " +
            std::to_string(m.cols()) + "\n";
    for (Index i = 0; i < m.rows(); ++i) {
      for (Index j = 0; j < m.cols(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
        if (j) body += ' ';
        body += buf;
      }
      body += '\n';
    }
  }
  std::snprintf(buf, sizeof buf, "checksum %016" PRIx64 "\n", fnv1a(body));
  return body + buf;
}

inline EncoderParams deserialize_params(const std::string& text) {
  auto bad = [](const std::string& why) -> void {
    fail(ErrorKind::kSnapshot, "corrupted parameter snapshot: " + why);
  };
  const auto cpos = text.rfind("checksum ");
  if (cpos == std::string::npos || (cpos > 0 && text[cpos - 1] != '\n')) {
    bad("missing checksum line");
  }
  const std::string body = text.substr(0, cpos);
  {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a(body));
    std::string stored = text.substr(cpos + 9);
    while (!stored.empty() && (stored.back() == '\n' || stored.back() == '\r')) {
      stored.pop_back();
    }
    if (stored != buf) bad("checksum mismatch");
  }
  std::istringstream in(body);
  std::string line;
  if (!std::getline(in, line) || line != kSnapshotMagic) bad("missing HCGLAD1 header");

  EncoderConfig cfg;
  std::string tag, manifold;
  int final_act = 0;
  if (!std::getline(in, line)) bad("missing encoder line");
  {
    std::istringstream ls(line);
    if (!(ls >> tag >> cfg.num_layers >> cfg.hidden_dim >> cfg.mlp_layers >> final_act >>
          manifold) ||
        tag != "encoder") {
      bad("malformed encoder line");
    }
    cfg.final_activation = final_act != 0;
    if (manifold == "lorentz") {
      cfg.manifold = Manifold::kLorentz;
    } else if (manifold == "flat") {
      cfg.manifold = Manifold::kFlat;
    } else {
      bad("unknown manifold '" + manifold + "'");
    }
  }
  Index d1 = 0, d2 = 0;
  if (!std::getline(in, line)) bad("missing input_dims line");
  {
    std::istringstream ls(line);
    if (!(ls >> tag >> d1 >> d2) || tag != "input_dims") bad("malformed input_dims line");
  }
  EncoderParams p;
  try {
    p = EncoderParams::init(cfg, d1, d2, 0);
  } catch (const Error& e) {
    bad(e.what());
  }
  for (auto& np : p.named_parameters()) {
    if (!std::getline(in, line)) bad("missing parameter " + np.name);
    std::istringstream ls(line);
    std::string name;
    Index rows = 0, cols = 0;
    if (!(ls >> tag >> name >> rows >> cols) || tag != "param") {
      bad("malformed header for " + np.name);
    }
    Matrix& m = np.tensor.mutable_value();
    if (name != np.name || rows != m.rows() || cols != m.cols()) {
      bad("expected " + np.name + " " + shape_string(m) + ", found " + name + " " +
          std::to_string(rows) + "x" + std::to_string(cols));
    }
    for (Index i = 0; i < rows; ++i) {
      if (!std::getline(in, line)) bad("truncated values of " + np.name);
      const char* s = line.c_str();
      for (Index j = 0; j < cols; ++j) {
        char* end = nullptr;
        errno = 0;
        const double v = std::strtod(s, &end);
        if (end == s || errno == ERANGE) bad("bad value in " + np.name);
        m(i, j) = v;
        s = end;
      }
      while (*s == ' ') ++s;
      if (*s != '\0') bad("extra values in " + np.name);
    }
  }
  if (std::getline(in, line) && !line.empty()) bad("trailing content '" + line + "'");
  return p;
}

inline void save_params(const EncoderParams& p, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kSnapshot, "cannot write " + path.string());
  out << serialize_params(p);
  if (!out) fail(ErrorKind::kSnapshot, "write failed for " + path.string());
}

inline EncoderParams load_params(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kSnapshot, "cannot read parameter snapshot " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return deserialize_params(ss.str());
}

}  // namespace hcglad
