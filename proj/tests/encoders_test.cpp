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

#include <random>
#include <set>
#include <string>

#include <gtest/gtest.h>

#include "hcglad/encoders.hpp"
#include "hcglad/lorentz.hpp"
#include "support/fixtures.hpp"

namespace hcglad {
namespace {

EncoderConfig small_config() {
  EncoderConfig c;
  c.num_layers = 3;
  c.hidden_dim = 5;
  c.mlp_layers = 2;
  return c;
}

TEST(EncodersTest, InitShapesAndNames) {
  const EncoderParams p = EncoderParams::init(small_config(), 7, 4, 1);
  EXPECT_EQ(p.layers[0][0][0].rows(), 7);
  EXPECT_EQ(p.layers[1][1][0].rows(), 4);
  EXPECT_EQ(p.layers[0][0][2].rows(), 5);
  EXPECT_EQ(p.layers[0][0][2].cols(), 5);
  const auto named = p.named_parameters();
  // per channel: 2 views x 3 layers + 2 heads x 2 layers x (W, b)
  EXPECT_EQ(named.size(), 2u * (6 + 8));
  std::set<std::string> names;
  for (const auto& np : named) names.insert(np.name);
  EXPECT_EQ(names.size(), named.size());
  EXPECT_TRUE(names.count("graph/view1/W0"));
  EXPECT_TRUE(names.count("hypergraph/view2/P2"));
  EXPECT_TRUE(names.count("hypergraph/graph_head/b1"));
  EXPECT_EQ(p.parameter_count(),
            2u * (7 * 5 + 25 + 25 + 4 * 5 + 25 + 25 + 2 * 2 * (25 + 5)));
}

TEST(EncodersTest, InitIsSeedDeterministic) {
  const auto a = EncoderParams::init(small_config(), 3, 3, 42).named_parameters();
  const auto b = EncoderParams::init(small_config(), 3, 3, 42).named_parameters();
  const auto c = EncoderParams::init(small_config(), 3, 3, 43).named_parameters();
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].tensor.value(), b[i].tensor.value());
    differs = differs || a[i].tensor.value() != c[i].tensor.value();
  }
  EXPECT_TRUE(differs);
}

TEST(EncodersTest, InitRejectsBadConfig) {
  EncoderConfig c = small_config();
  c.num_layers = 0;
  EXPECT_THROW(EncoderParams::init(c, 3, 3, 0), Error);
  EXPECT_THROW(EncoderParams::init(small_config(), 0, 3, 0), Error);
}

TEST(EncodersTest, CloneOwnsStorage) {
  const auto p = EncoderParams::init(small_config(), 3, 3, 0);
  auto q = p.clone();
  q.layers[0][0][0].mutable_value()(0, 0) += 1.0;
  EXPECT_NE(p.layers[0][0][0].value()(0, 0), q.layers[0][0][0].value()(0, 0));
}

TEST(EncodersTest, LorentzOutputsLieOnTheHyperboloid) {
  std::mt19937_64 rng(9);
  const Graph g = make_graph(0, 9, fixtures::erdos_renyi_edges(9, 0.4, rng));
  const EncoderParams p = EncoderParams::init(small_config(), 4, 3, 2);
  const GraphView v1 = build_view1(g, fixtures::random_matrix(9, 4, rng, 0.0, 1.0));
  const GraphView v2 = build_view2(g, 3);
  Tape tape;
  const NodeEmbedding a = graph_propagate(tape, v1, p);
  const NodeEmbedding b = hypergraph_propagate(tape, v2, build_hypergraph(g), p);
  EXPECT_EQ(a.channel, Channel::kGraph);
  EXPECT_EQ(b.view, ViewTag::kStructure);
  for (const NodeEmbedding* e : {&a, &b}) {
    ASSERT_EQ(e->points.cols(), 6);
    for (Index i = 0; i < e->points.rows(); ++i) {
      const lorentz::Vector x = e->points.value().row(i).transpose();
      EXPECT_GT(x(0), 0.0);
      EXPECT_LE(lorentz::constraint_violation(x), 1e-9 * x(0) * x(0));
    }
  }
  const Tensor pooled = pool_graph(tape, a, Manifold::kLorentz);
  ASSERT_EQ(pooled.rows(), 1);
  const Tensor z = project_head(tape, pooled, p.graph_heads[0], Manifold::kLorentz);
  const lorentz::Vector zx = z.value().row(0).transpose();
  EXPECT_LE(lorentz::constraint_violation(zx), 1e-9 * zx(0) * zx(0));
}

TEST(EncodersTest, PoolingIsTangentMean) {
  std::mt19937_64 rng(3);
  const Matrix u = fixtures::random_matrix(5, 3, rng, -1.0, 1.0);
  Tape tape;
  const Tensor pts = tape.exp_origin(Tensor::constant(u));
  const std::vector<Index> sizes{2, 3};
  const Tensor pooled = pool_graph(tape, pts, sizes, Manifold::kLorentz);
  ASSERT_EQ(pooled.rows(), 2);
  const lorentz::Vector m0 = (u.row(0) + u.row(1)).transpose() / 2.0;
  const lorentz::Vector m1 = (u.row(2) + u.row(3) + u.row(4)).transpose() / 3.0;
  EXPECT_LT((pooled.value().row(0).transpose() - lorentz::lift(m0).coords()).norm(), 1e-12);
  EXPECT_LT((pooled.value().row(1).transpose() - lorentz::lift(m1).coords()).norm(), 1e-12);
}

TEST(EncodersTest, FlatVariantStaysEuclidean) {
  EncoderConfig c = small_config();
  c.manifold = Manifold::kFlat;
  c.final_activation = false;
  const Graph g = make_graph(0, 4, fixtures::cycle_edges(4));
  const EncoderParams p = EncoderParams::init(c, 2, 2, 5);
  Tape tape;
  const NodeEmbedding e = graph_propagate(tape, build_view2(g, 2), p);
  EXPECT_EQ(e.points.cols(), 5);
  // Without a final relu some coordinates go negative.
  EXPECT_LT(e.points.value().minCoeff(), 0.0);
}

TEST(EncodersTest, FinalActivationKeepsSpatialCoordinatesNonNegative) {
  const Graph g = make_graph(0, 5, fixtures::path_edges(5));
  const EncoderParams p = EncoderParams::init(small_config(), 3, 3, 11);
  Tape tape;
  const NodeEmbedding e = graph_propagate(tape, build_view2(g, 3), p);
  EXPECT_GE(e.points.value().rightCols(5).minCoeff(), 0.0);
}

TEST(EncodersTest, PropagationIsRowStackingInvariant) {
  // Two graphs stacked in one call must match two separate calls.
  const Graph g1 = make_graph(0, 3, fixtures::path_edges(3));
  const Graph g2 = make_graph(1, 4, fixtures::complete_edges(4));
  const EncoderParams p = EncoderParams::init(small_config(), 2, 2, 8);
  const GraphView a = build_view2(g1, 2), b = build_view2(g2, 2);
  Matrix stacked(7, 2);
  stacked << a.features, b.features;
  const std::vector<Matrix> ops{gcn_operator(g1), gcn_operator(g2)};
  Tape tape;
  const Matrix both =
      propagate(tape, stacked, ops, p.layers[0][1], p.config).value();
  const Matrix one = graph_propagate(tape, a, p).points.value();
  const Matrix two = graph_propagate(tape, b, p).points.value();
  EXPECT_LT((both.topRows(3) - one).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((both.bottomRows(4) - two).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(EncodersTest, HypergraphSizeMismatchIsRejected) {
  const Graph g = make_graph(0, 4, fixtures::path_edges(4));
  const EncoderParams p = EncoderParams::init(small_config(), 2, 2, 0);
  Tape tape;
  EXPECT_THROW(hypergraph_propagate(tape, build_view2(g, 2),
                                    build_hypergraph(make_graph(1, 3, {})), p),
               Error);
}

}  // namespace
}  // namespace hcglad
