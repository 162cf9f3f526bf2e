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

#include <sstream>

#include "ssmatch/lp_model.hpp"
#include "test_util.hpp"

namespace ssmatch {
namespace {

FractionalMatching triangle_half() {
  FractionalMatching x(3);
  x.set({0, 1}, 0.5);
  x.set({1, 2}, 0.5);
  x.set({0, 2}, 0.5);
  return x;
}

TEST(BuildMatchingLP, Descriptors) {
  auto a = build_matching_lp(4, GraphClass::bipartite, 2, MatchingMode::cardinality, 0.1);
  EXPECT_EQ(a.n, 4u);
  EXPECT_EQ(a.left, std::optional<std::size_t>(2));
  auto b = build_matching_lp(3, GraphClass::general, std::nullopt, MatchingMode::cardinality, 0.2, 3);
  EXPECT_EQ(b.odd_set_max, 3u);
  EXPECT_EQ(default_odd_set_max(0.2), 11u);
  EXPECT_THROW(build_matching_lp(4, GraphClass::bipartite, 2, MatchingMode::cardinality, 0.9), Error);
  EXPECT_THROW(build_matching_lp(4, GraphClass::bipartite, 4, MatchingMode::cardinality, 0.1), Error);
  EXPECT_THROW(build_matching_lp(3, GraphClass::general, std::nullopt, MatchingMode::cardinality, 0.2, 4),
               Error);
}

TEST(ObjectiveValue, Examples) {
  FractionalMatching one(2);
  one.set({0, 1}, 1);
  EXPECT_DOUBLE_EQ(objective_value(one, MatchingMode::cardinality), 1.0);
  EXPECT_DOUBLE_EQ(objective_value(triangle_half(), MatchingMode::cardinality), 1.5);
  FractionalMatching w(2);
  w.set({0, 1, 2.5}, 0.4);
  EXPECT_DOUBLE_EQ(objective_value(w, MatchingMode::weighted), 1.0);
  EXPECT_DOUBLE_EQ(w.cached_value(MatchingMode::weighted), 1.0);
  EXPECT_THROW(w.set({0, 1}, -0.1), Error);
}

TEST(DegreeLoad, Examples) {
  FractionalMatching path(4);
  path.set({0, 1}, 0.5);
  path.set({1, 2}, 0.5);
  EXPECT_DOUBLE_EQ(degree_load(path, 1), 1.0);
  EXPECT_DOUBLE_EQ(degree_load(path, 3), 0.0);
  FractionalMatching star(4);
  for (Vertex v = 1; v <= 3; ++v) star.set({0, v}, 0.4);
  EXPECT_NEAR(degree_load(star, 0), 1.2, 1e-12);
  auto lp = build_matching_lp(4, GraphClass::general, std::nullopt, MatchingMode::cardinality, 0.2);
  auto viol = check_feasible(star, lp, 1e-9);
  ASSERT_EQ(viol.size(), 1u);
  EXPECT_EQ(viol[0].kind, Violation::Kind::degree);
  EXPECT_EQ(viol[0].vertices, std::vector<Vertex>{0});
}

TEST(CheckFeasible, TriangleOddSet) {
  auto general = build_matching_lp(3, GraphClass::general, std::nullopt, MatchingMode::cardinality, 0.2, 3);
  auto viol = check_feasible(triangle_half(), general, 1e-9);
  ASSERT_EQ(viol.size(), 1u);
  EXPECT_EQ(viol[0].kind, Violation::Kind::odd_set);
  EXPECT_EQ(viol[0].vertices, (std::vector<Vertex>{0, 1, 2}));
  EXPECT_DOUBLE_EQ(viol[0].load, 1.5);
  EXPECT_DOUBLE_EQ(viol[0].limit, 1.0);
  MatchingLP degree_only = general;
  degree_only.graph_class = GraphClass::bipartite;
  EXPECT_TRUE(check_feasible(triangle_half(), degree_only, 1e-9).empty());
}

TEST(DualObjective, Examples) {
  std::vector<double> zero(4, 0.0);
  EXPECT_DOUBLE_EQ(dual_objective(zero), 0.0);
  DualSolution d{{1, 0}, {}};
  EXPECT_DOUBLE_EQ(dual_objective(d), 1.0);
  EXPECT_GE(dual_cover(d, {0, 1}), 1.0);
  DualSolution k3{{0.5, 0.5, 0.5}, {}};
  EXPECT_DOUBLE_EQ(dual_objective(k3), 1.5);
  DualSolution odd{{0, 0, 0}, {{{0, 1, 2}, 1.0}}};
  EXPECT_DOUBLE_EQ(dual_objective(odd), 1.0);
  EXPECT_DOUBLE_EQ(dual_cover(odd, {1, 2}), 1.0);
  std::vector<double> bad{1, -1};
  EXPECT_THROW(dual_objective(bad), Error);
}

TEST(DualState, Potential) {
  DualState d;
  d.weights = {1, 2, 1};
  d.normalizer = d.recompute_normalizer();
  EXPECT_DOUBLE_EQ(d.probability(1), 0.5);
  d.log_offset = 3;
  EXPECT_NEAR(d.log_potential(), 3 + std::log(4.0), 1e-12);
}

TEST(Matching, SharedVertexAndValue) {
  Matching m{{{0, 1, 2}, {2, 3, 5}}};
  EXPECT_FALSE(m.shared_vertex());
  EXPECT_DOUBLE_EQ(m.value(MatchingMode::weighted), 7);
  EXPECT_DOUBLE_EQ(m.value(MatchingMode::cardinality), 2);
  m.edges.push_back({1, 4});
  EXPECT_EQ(m.shared_vertex(), std::optional<Vertex>(1));
}

TEST(Serialization, FractionalAndMatchingRoundTrip) {
  FractionalMatching x(5);
  x.set({0, 1, 3}, 0.25);
  x.set({2, 4}, 1.0 / 3);
  std::stringstream ss;
  write_fractional(ss, x);
  FractionalMatching y = read_fractional(ss);
  EXPECT_EQ(y.vertex_count(), 5u);
  EXPECT_EQ(y.get({0, 1, 3}), 0.25);
  EXPECT_EQ(y.get({2, 4}), 1.0 / 3);
  Matching m{{{0, 1}, {2, 3}}};
  std::stringstream ms;
  write_matching(ms, m);
  EXPECT_EQ(read_matching(ms).edges, m.edges);
  std::stringstream bad("# fractional n 3\n0 1 x\n");
  EXPECT_THROW(read_fractional(bad), MalformedInput);
}

}  // namespace
}  // namespace ssmatch
