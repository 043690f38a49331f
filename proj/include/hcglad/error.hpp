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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hcglad {

/// Failure categories. The CLI maps each category onto one exit code, so
/// categories must stay disjoint.
enum class ErrorKind {
  kDimension,       // shape mismatch between operands
  kDomain,          // value outside the domain of a function (log of <= 0)
  kEmptyReduction,  // mean / logsumexp over zero elements
  kRank,            // backward on a non-scalar
  kPrecondition,    // caller violated a documented precondition
  kManifold,        // point off the hyperboloid
  kTangent,         // vector with a negative Lorentzian square norm
  kIngestion,       // missing or unreadable input file
  kConsistency,     // input files disagree with each other
  kSplit,           // degenerate train/test split
  kBatch,           // too few ids to form a contrastive batch
  kConfig,          // invalid configuration value or unknown key
  kDivergence,      // non-finite loss during training
  kMetric,          // metric undefined for the given labels
  kCapExceeded,     // exhaustive computation refused for a large input
  kSnapshot,        // corrupted or incompatible parameter snapshot
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDimension: return "dimension";
    case ErrorKind::kDomain: return "domain";
    case ErrorKind::kEmptyReduction: return "empty-reduction";
    case ErrorKind::kRank: return "rank";
    case ErrorKind::kPrecondition: return "precondition";
    case ErrorKind::kManifold: return "manifold";
    case ErrorKind::kTangent: return "tangent";
    case ErrorKind::kIngestion: return "ingestion";
    case ErrorKind::kConsistency: return "consistency";
    case ErrorKind::kSplit: return "split";
    case ErrorKind::kBatch: return "batch";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kDivergence: return "divergence";
    case ErrorKind::kMetric: return "metric";
    case ErrorKind::kCapExceeded: return "cap-exceeded";
    case ErrorKind::kSnapshot: return "snapshot";
  }
  return "unknown";
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace hcglad
