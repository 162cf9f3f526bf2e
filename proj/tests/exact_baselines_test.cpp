// Copyright 2026 The ssmatch Authors
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


#include <gtest/gtest.h>

#include <cmath>

#include "ssmatch/exact_baselines.hpp"
#include "test_util.hpp"

namespace ssmatch {
namespace {

EdgeList complete_bipartite(std::size_t a, std::size_t b) {
  EdgeList g;
  g.n = a + b;
  g.left = a;
  for (Vertex u = 0; u < a; ++u)
    for (Vertex v = static_cast<Vertex>(a); v < a + b; ++v) g.edges.push_back({u, v});
  return g;
}

/// Exact optimum of the degree-only LP by enumerating x in {0, 1/2, 1}^m.
double half_integral_lp_opt(const EdgeList& g) {
  const std::size_t m = g.edges.size();
  std::vector<int> x(m, 0);  // in halves
  double best = 0;
  std::vector<int> load(g.n, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int value) {
    if (i == m) {
      best = std::max(best, value / 2.0);
      return;
    }
    for (int h = 0; h <= 2; ++h) {
      const Edge& e = g.edges[i];
      if (load[e.u] + h > 2 || load[e.v] + h > 2) break;
      load[e.u] += h;
      load[e.v] += h;
      rec(i + 1, value + h);
      load[e.u] -= h;
      load[e.v] -= h;
    }
  };
  rec(0, 0);
  return best;
}

TEST(HopcroftKarp, Examples) {
  auto k33 = complete_bipartite(3, 3);
  EXPECT_EQ(hopcroft_karp(k33.n, k33.edges).size(), 3u);
  auto star = complete_bipartite(1, 5);
  EXPECT_EQ(hopcroft_karp(star.n, star.edges).size(), 1u);
  auto tri = testing::cycle_graph(3);
  EXPECT_THROW(hopcroft_karp(tri.n, tri.edges), Error);
}

TEST(HopcroftKarp, MatchesBruteForceOnSmallInstances) {
  detail::Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(11);
    EdgeList g = testing::random_bipartite(rng, n, 1 + rng.below(n - 1), rng.uniform());
    Matching m = hopcroft_karp(n, g.edges);
    EXPECT_FALSE(m.shared_vertex());
    EXPECT_EQ(m.size(), brute_force_max_matching(n, g.edges).size()) << trial;
  }
}

TEST(HopcroftKarp, LargeRandomIsAValidMatching) {
  detail::Rng rng(2);
  EdgeList g = testing::random_bipartite(rng, 100, 50, 0.05);
  Matching m = hopcroft_karp(100, g.edges);
  EXPECT_FALSE(m.shared_vertex());
  EXPECT_GE(m.size(), 40u);
}

TEST(MaxWeightBipartite, Examples) {
  EXPECT_DOUBLE_EQ(max_weight_bipartite(2, {{0, 1, 2.5}}).weight(), 2.5);
  EXPECT_DOUBLE_EQ(max_weight_bipartite(4, {{0, 1, 1}, {2, 3, 2}}).weight(), 3);
  // Heavier single edge beats two light ones.
  EXPECT_DOUBLE_EQ(max_weight_bipartite(4, {{0, 2, 1}, {1, 2, 5}, {1, 3, 1}}).weight(), 5);
  // Two medium edges beat the heavy one.
  EXPECT_DOUBLE_EQ(max_weight_bipartite(4, {{0, 2, 3}, {0, 3, 5}, {1, 3, 3}}).weight(), 6);
  EXPECT_THROW(max_weight_bipartite(2, {{0, 1, -1}}), Error);
}

TEST(MaxWeightBipartite, MatchesBruteForce) {
  detail::Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(11);
    EdgeList g = testing::random_bipartite(rng, n, 1 + rng.below(n - 1), rng.uniform(), true);
    Matching m = max_weight_bipartite(n, g.edges);
    EXPECT_FALSE(m.shared_vertex());
    EXPECT_DOUBLE_EQ(m.weight(), brute_force_max_matching(n, g.edges, MatchingMode::weighted).weight())
        << trial;
  }
}

TEST(BruteForce, Examples) {
  auto tri = testing::cycle_graph(3);
  EXPECT_EQ(brute_force_max_matching(3, tri.edges).size(), 1u);
  auto c5 = testing::cycle_graph(5);
  EXPECT_EQ(brute_force_max_matching(5, c5.edges).size(), 2u);
  auto p = testing::petersen_graph();
  ASSERT_EQ(p.edges.size(), 15u);
  Matching m = brute_force_max_matching(10, p.edges);
  EXPECT_EQ(m.size(), 5u);
  EXPECT_FALSE(m.shared_vertex());
}

TEST(BruteForce, EdgeRecursionAgreesWithSubsetDp) {
  detail::Rng rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    EdgeList g = testing::random_general(rng, 10, 0.3);
    if (g.edges.size() > 24) continue;
    // Pad with isolated vertices so the edge recursion is used.
    Matching dp = brute_force_max_matching(10, g.edges);
    Matching rec = brute_force_max_matching(30, g.edges);
    EXPECT_EQ(dp.size(), rec.size());
  }
  EdgeList big = testing::random_general(rng, 30, 0.5);
  EXPECT_THROW(brute_force_max_matching(30, big.edges), Error);
}

TEST(FractionalLpOpt, Examples) {
  auto tri = testing::cycle_graph(3);
  EXPECT_DOUBLE_EQ(fractional_lp_opt(3, tri.edges, true), 1.5);
  EXPECT_DOUBLE_EQ(fractional_lp_opt(2, {{0, 1}}, true), 1.0);
  EXPECT_DOUBLE_EQ(fractional_lp_opt(2, {{0, 1}}, false), 1.0);
  try {
    fractional_lp_opt(3, tri.edges, false);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unsupported);
  }
}

TEST(FractionalLpOpt, HalfIntegralEnumeration) {
  detail::Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 3 + rng.below(5);
    EdgeList g = testing::random_general(rng, n, 0.5);
    if (g.edges.size() > 12) continue;
    EXPECT_DOUBLE_EQ(fractional_lp_opt(n, g.edges, true), half_integral_lp_opt(g)) << trial;
  }
}

}  // namespace
}  // namespace ssmatch
