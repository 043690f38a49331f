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

#include <fstream>
#include <optional>
#include <string>

#include <gtest/gtest.h>

#include "hcglad/config.hpp"
#include "hcglad/snapshot.hpp"
#include "support/fixtures.hpp"

namespace hcglad {
namespace {

std::optional<ErrorKind> error_kind(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

TEST(ConfigTest, DefaultsValidate) {
  RunConfig rc;
  EXPECT_NO_THROW(validate(rc));
  EXPECT_TRUE(search_range_violations(rc).empty());
}

TEST(ConfigTest, ParsesTextWithComments) {
  RunConfig rc;
  apply_config_text(rc, R"(# training
epochs = 40
learning_rate=0.005   # trailing comment
hidden_dim = 32
manifold = flat
anomaly_class = 1
whole_set_scoring = yes
hypergraph_encoder = hgcn
hyperbolicity_mode = sampled
delta_aggregate = mean

seed = 18446744073709551615
)");
  EXPECT_EQ(rc.train.epochs, 40);
  EXPECT_DOUBLE_EQ(rc.train.learning_rate, 0.005);
  EXPECT_EQ(rc.train.encoder.hidden_dim, 32);
  EXPECT_EQ(rc.train.encoder.manifold, Manifold::kFlat);
  EXPECT_EQ(rc.train.anomaly_class.label, 1);
  EXPECT_TRUE(rc.train.whole_set_scoring);
  EXPECT_EQ(rc.hyperbolicity.mode, HyperbolicityMode::kSampled);
  EXPECT_EQ(rc.hyperbolicity.delta_aggregate, Aggregate::kMean);
  EXPECT_EQ(rc.train.seed, 18446744073709551615ULL);
  apply_assignment(rc, "anomaly_class=minority");
  EXPECT_FALSE(rc.train.anomaly_class.label.has_value());
}

TEST(ConfigTest, MalformedInputIsAConfigError) {
  RunConfig rc;
  for (const char* bad : {"epochz = 3", "epochs = 3.5", "tau = abc", "manifold = poincare",
                          "graph_encoder = gat", "seed = -1", "no_equals_sign",
                          "learning_rate = inf", "whole_set_scoring = maybe"}) {
    EXPECT_EQ(error_kind([&] { apply_assignment(rc, bad); }), ErrorKind::kConfig) << bad;
  }
  try {
    apply_config_text(rc, "epochs = 10\n\nbogus = 1\n", "run.conf");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("run.conf:3"), std::string::npos) << e.what();
  }
  EXPECT_EQ(error_kind([&] { apply_config_file(rc, "/nonexistent/x.conf"); }),
            ErrorKind::kConfig);
}

TEST(ConfigTest, SearchRangesAreEnforcedUnlessOverridden) {
  RunConfig rc;
  apply_assignment(rc, "learning_rate=0.5");
  apply_assignment(rc, "hidden_dim=128");
  const auto v = search_range_violations(rc);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].key, "learning_rate");
  EXPECT_EQ(v[1].key, "hidden_dim");
  EXPECT_EQ(error_kind([&] { validate(rc); }), ErrorKind::kConfig);
  rc.allow_out_of_range = true;
  EXPECT_NO_THROW(validate(rc));
}

TEST(ConfigTest, RangeBoundariesAreInclusive) {
  RunConfig rc;
  for (const char* s : {"epochs=10", "learning_rate=1e-5", "num_layers=7", "hidden_dim=2",
                        "mlp_layers=5", "lambda1=0.1", "lambda2=1", "weight_decay=0.3",
                        "momentum=0.99", "tau=1.2"}) {
    apply_assignment(rc, s);
  }
  EXPECT_TRUE(search_range_violations(rc).empty());
  apply_assignment(rc, "epochs=9");
  EXPECT_EQ(search_range_violations(rc).size(), 1u);
  apply_assignment(rc, "epochs=0");
  EXPECT_TRUE(search_range_violations(rc).empty());
}

TEST(ConfigTest, StructuralChecksIgnoreTheOverride) {
  RunConfig rc;
  rc.allow_out_of_range = true;
  for (const char* s : {"batch_size=1", "walk_length=0", "train_fraction=1", "tau=0",
                        "momentum=1"}) {
    RunConfig bad = rc;
    apply_assignment(bad, s);
    EXPECT_EQ(error_kind([&] { validate(bad); }), ErrorKind::kConfig) << s;
  }
}

TEST(ConfigTest, EntriesRoundTripThroughAssignments) {
  RunConfig rc;
  apply_config_text(rc, "tau=0.35\nlambda2=0.7\nfeature_source=degree\nseed=9\n");
  RunConfig echo;
  for (const auto& [k, v] : config_entries(rc.train)) apply_setting(echo, k, v);
  EXPECT_EQ(config_entries(echo.train), config_entries(rc.train));
}

TEST(SnapshotTest, RoundTripIsBitExact) {
  EncoderConfig c;
  c.num_layers = 3;
  c.hidden_dim = 4;
  c.manifold = Manifold::kFlat;
  c.final_activation = false;
  const EncoderParams p = EncoderParams::init(c, 5, 3, 77);
  const std::string text = serialize_params(p);
  const EncoderParams q = deserialize_params(text);
  EXPECT_EQ(q.config.num_layers, 3);
  EXPECT_EQ(q.config.manifold, Manifold::kFlat);
  EXPECT_FALSE(q.config.final_activation);
  const auto a = p.named_parameters();
  const auto b = q.named_parameters();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].name, b[k].name);
    EXPECT_EQ(a[k].tensor.value(), b[k].tensor.value());
  }
  EXPECT_EQ(serialize_params(q), text);

  const auto dir = fixtures::fresh_dir("snapshot_roundtrip");
  save_params(p, dir / "p.hcglad");
  EXPECT_EQ(serialize_params(load_params(dir / "p.hcglad")), text);
}

TEST(SnapshotTest, CorruptionIsDetected) {
  const std::string text = serialize_params(EncoderParams::init(EncoderConfig{}, 3, 2, 1));
  std::string flipped = text;
  const auto pos = flipped.find("param ") + 40;
  flipped[pos] = flipped[pos] == '1' ? '2' : '1';
  std::string truncated = text.substr(0, text.size() / 2);
  std::string no_magic = text;
  no_magic[0] = 'X';
  for (const std::string& bad : {flipped, truncated, no_magic, std::string()}) {
    EXPECT_EQ(error_kind([&] { deserialize_params(bad); }), ErrorKind::kSnapshot);
  }
  EXPECT_EQ(error_kind([] { load_params("/nonexistent/p.hcglad"); }), ErrorKind::kSnapshot);
}

}  // namespace
}  // namespace hcglad
