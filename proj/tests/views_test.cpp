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
#include <vector>

#include <gtest/gtest.h>

#include "hcglad/views.hpp"
#include "support/fixtures.hpp"

namespace hcglad {
namespace {

// Return probability of a k-step simple random walk, by pushing the walker's
// distribution forward one step at a time.
double return_probability(const Graph& g, int start, int k) {
  std::vector<double> p(static_cast<std::size_t>(g.num_nodes()), 0.0);
  p[static_cast<std::size_t>(start)] = 1.0;
  for (int step = 0; step < k; ++step) {
    std::vector<double> next(p.size(), 0.0);
    for (int u = 0; u < g.num_nodes(); ++u) {
      const auto& nb = g.neighbors[static_cast<std::size_t>(u)];
      for (int v : nb) {
        next[static_cast<std::size_t>(v)] +=
            p[static_cast<std::size_t>(u)] / static_cast<double>(nb.size());
      }
    }
    p = next;
  }
  return p[static_cast<std::size_t>(start)];
}

TEST(ViewsTest, View1KeepsBaseFeatures) {
  const Graph g = make_graph(0, 3, {{0, 1}});
  const Matrix base = Matrix::Constant(3, 4, 0.25);
  const GraphView v = build_view1(g, base);
  EXPECT_EQ(v.tag, ViewTag::kAttribute);
  EXPECT_EQ(v.features, base);
  EXPECT_EQ(&v.graph(), &g);
  EXPECT_THROW(build_view1(g, Matrix::Zero(2, 4)), Error);
}

TEST(ViewsTest, View2MatchesWalkDistributionOracle) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3 + trial % 8;
    const Graph g = make_graph(trial, n, fixtures::erdos_renyi_edges(n, 0.4, rng));
    const GraphView v = build_view2(g, 6);
    ASSERT_EQ(v.features.rows(), n);
    ASSERT_EQ(v.features.cols(), 6);
    for (int i = 0; i < n; ++i) {
      for (int k = 1; k <= 6; ++k) {
        EXPECT_NEAR(v.features(i, k - 1), return_probability(g, i, k), 1e-12);
      }
    }
  }
}

TEST(ViewsTest, View2StructuralProperties) {
  // Path 0-1-2-3 plus isolated node 4. Bipartite, so odd steps never return.
  const Graph g = make_graph(0, 5, {{0, 1}, {1, 2}, {2, 3}});
  const GraphView v = build_view2(g, 4);
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(v.features(i, 0), 0.0);
    EXPECT_NEAR(v.features(i, 2), 0.0, 1e-15);
    for (int k = 0; k < 4; ++k) {
      EXPECT_GE(v.features(i, k), 0.0);
      EXPECT_LE(v.features(i, k), 1.0);
    }
  }
  EXPECT_DOUBLE_EQ(v.features(0, 1), 0.5);  // 0 -> 1 -> {0, 2}
  EXPECT_EQ(v.features.row(4).sum(), 0.0);  // isolated
}

TEST(ViewsTest, RandomWalkMatrixIsRowStochastic) {
  const Graph g = make_graph(0, 4, {{0, 1}, {0, 2}, {0, 3}});
  const Matrix p = random_walk_matrix(g);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(p.row(i).sum(), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(p(0, 1), 1.0 / 3.0);
}

TEST(ViewsTest, WalkLengthMustBePositive) {
  const Graph g = make_graph(0, 2, {{0, 1}});
  try {
    build_view2(g, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
  }
}

TEST(ViewsTest, ViewsShareTheSourceGraph) {
  const Graph g = make_graph(0, 3, {{0, 1}, {1, 2}});
  const GraphView a = build_view1(g, Matrix::Ones(3, 1));
  const GraphView b = build_view2(g, 2);
  EXPECT_EQ(&a.graph(), &b.graph());
  EXPECT_EQ(a.num_nodes(), b.num_nodes());
}

}  // namespace
}  // namespace hcglad
