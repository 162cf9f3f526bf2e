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
#include <sstream>

#include "ssmatch/exact_baselines.hpp"
#include "ssmatch/mwu_engine.hpp"
#include "test_util.hpp"

namespace ssmatch {
namespace {

struct Run {
  SolveResult result;
  std::size_t cursor_passes = 0;
};

Run solve(EdgeStream& s, const MatchingLP& lp, MWUConfig cfg, long long budget = 0) {
  SpaceMeter meter(budget ? budget : SpaceMeter::default_budget(lp.n, lp.eps));
  GreedyOracle oracle;
  const std::size_t before = s.passes_completed();
  Run r{solve_fractional(s, lp, cfg, oracle, meter)};
  r.cursor_passes = s.passes_completed() - before;
  return r;
}

MatchingLP bipartite_lp(const EdgeStream& s, double eps, MatchingMode mode = MatchingMode::cardinality) {
  return build_matching_lp(s.vertex_count(), GraphClass::bipartite, s.left_size(), mode, eps);
}

TEST(InitDuals, Examples) {
  auto d = init_duals(3);
  EXPECT_EQ(d.weights, (std::vector<double>{1, 1, 1}));
  EXPECT_EQ(d.normalizer, 3);
  EXPECT_EQ(init_duals(1).normalizer, 1);
  SpaceMeter meter(1LL << 30);
  {
    auto big = init_duals(1'000'000, &meter);
    EXPECT_EQ(meter.current(), 1'000'000 * kRecordBytes);
    EXPECT_EQ(big.weights.size(), 1'000'000u);
  }
  EXPECT_EQ(meter.current(), 0);
  EXPECT_THROW(init_duals(0), Error);
}

TEST(MwuStep, DirectFormula) {
  MWUConfig cfg = MWUConfig::defaults(0.2);
  cfg.eta = 0.1;
  auto d = init_duals(3);
  OracleResult r;
  r.candidate.edges = {{0, 1}};
  mwu_step(d, r, cfg);
  EXPECT_DOUBLE_EQ(d.weights[0], 1.1);
  EXPECT_DOUBLE_EQ(d.weights[1], 1.1);
  EXPECT_DOUBLE_EQ(d.weights[2], 1.0);
  EXPECT_DOUBLE_EQ(d.normalizer, 3.2);
}

TEST(MwuStep, UniformLoadsKeepDistribution) {
  MWUConfig cfg = MWUConfig::defaults(0.2);
  cfg.eta = 0.1;
  auto d = init_duals(3);
  OracleResult r;
  r.candidate.edges = {{0, 1}, {1, 2}, {0, 2}};
  r.amounts = {0.5, 0.5, 0.5};
  mwu_step(d, r, cfg);
  for (Vertex v = 0; v < 3; ++v) {
    EXPECT_DOUBLE_EQ(d.weights[v], 1.1);
    EXPECT_NEAR(d.probability(v), 1.0 / 3, 1e-15);
  }
}

TEST(MwuStep, WidthViolation) {
  MWUConfig cfg = MWUConfig::defaults(0.1);
  auto d = init_duals(3);
  OracleResult r;
  r.candidate.edges = {{0, 1}, {1, 2}};
  try {
    mwu_step(d, r, cfg, "broken");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::width_violation);
    EXPECT_NE(std::string(e.what()).find("broken"), std::string::npos);
  }
}

TEST(MwuStep, OddSetWeightsGrowWithInsideLoad) {
  MWUConfig cfg = MWUConfig::defaults(0.2);
  cfg.eta = 0.1;
  auto d = init_duals(5);
  d.odd_sets.push_back({{0, 1, 2}, 1.0});
  d.odd_sets.push_back({{2, 3, 4}, 1.0});
  OracleResult r;
  r.candidate.edges = {{0, 1}, {3, 4}};
  mwu_step(d, r, cfg);
  EXPECT_DOUBLE_EQ(d.odd_sets[0].weight, 1.1);
  EXPECT_DOUBLE_EQ(d.odd_sets[1].weight, 1.1);
  EXPECT_DOUBLE_EQ(d.normalizer, d.recompute_normalizer());
}

TEST(SolveFractional, SingleEdge) {
  EdgeStream s = EdgeStream::from_edges(testing::make_graph(2, {{0, 1}}, 1));
  auto r = solve(s, bipartite_lp(s, 0.1), MWUConfig::defaults(0.1));
  EXPECT_GE(r.result.x.get({0, 1}), 0.9);
  EXPECT_LE(r.result.x.get({0, 1}), 1.0);
  EXPECT_LE(r.result.certificate.gap, 0.1);
  EXPECT_TRUE(r.result.stats.converged);
}

TEST(SolveFractional, PathOfThree) {
  EdgeStream s = EdgeStream::from_edges(testing::make_graph(3, {{0, 1}, {0, 2}}, 1));
  auto r = solve(s, bipartite_lp(s, 0.1), MWUConfig::defaults(0.1));
  const double v = objective_value(r.result.x, MatchingMode::cardinality);
  EXPECT_GE(v, 0.9);
  EXPECT_LE(v, 1.0 + 1e-12);
}

TEST(SolveFractional, RandomBipartiteAgainstExactOptimum) {
  detail::Rng rng(17);
  EdgeList g = testing::random_bipartite(rng, 200, 100, 0.05);
  const double opt = fractional_lp_opt(g.n, g.edges, false);
  EdgeStream s = EdgeStream::from_edges(g, StreamOrder::seeded(2));
  auto r = solve(s, bipartite_lp(s, 0.1), MWUConfig::defaults(0.1));
  const double v = objective_value(r.result.x, MatchingMode::cardinality);
  EXPECT_GE(v, 0.9 * opt);
  EXPECT_LE(v, opt + 1e-9);
  EXPECT_TRUE(check_feasible(r.result.x, bipartite_lp(s, 0.1), 1e-9).empty());
  EXPECT_LE(r.result.certificate.gap, 0.1);
  EXPECT_GE(r.result.certificate.dual, opt * (1 - 0.1) - 1e-9);
  EXPECT_EQ(r.result.stats.passes, r.cursor_passes);
  EXPECT_EQ(r.result.stats.passes, r.result.stats.iterations + 1);
  EXPECT_LE(r.result.stats.passes, r.result.stats.tmax + 3);
  EXPECT_LE(r.result.stats.peak_bytes, r.result.stats.budget_bytes);
}

TEST(SolveFractional, WeightedAddsPreliminaryPass) {
  detail::Rng rng(3);
  EdgeList g = testing::random_bipartite(rng, 40, 20, 0.2, true);
  EdgeStream s = EdgeStream::from_edges(g, StreamOrder::seeded(1));
  auto r = solve(s, bipartite_lp(s, 0.1, MatchingMode::weighted), MWUConfig::defaults(0.1));
  EXPECT_EQ(r.result.stats.preliminary_passes, 1u);
  EXPECT_EQ(r.result.stats.passes, r.result.stats.iterations + 2);
  EXPECT_EQ(r.result.stats.passes, r.cursor_passes);
  const double opt = max_weight_bipartite(g.n, g.edges).weight();
  EXPECT_GE(r.result.stats.fractional_value, (1 - 0.3) * opt);
}

TEST(SolveFractional, GeneralTriangleUsesOddSets) {
  EdgeStream s = EdgeStream::from_edges(testing::make_graph(3, {{0, 1}, {1, 2}, {0, 2}}));
  auto lp = build_matching_lp(3, GraphClass::general, std::nullopt, MatchingMode::cardinality, 0.2);
  auto r = solve(s, lp, MWUConfig::defaults(0.2));
  EXPECT_TRUE(check_feasible(r.result.x, lp, 1e-9).empty());
  EXPECT_LE(objective_value(r.result.x, MatchingMode::cardinality), 1.0 + 1e-9);
  EXPECT_LE(r.result.certificate.gap, 0.2);
}

TEST(SolveFractional, FixedStopRunsToTmax) {
  EdgeStream s = EdgeStream::from_edges(testing::make_graph(4, {{0, 2}, {1, 3}, {0, 3}}, 2));
  MWUConfig cfg = MWUConfig::defaults(0.2);
  cfg.stop = StopRule::fixed;
  cfg.tmax = 25;
  auto r = solve(s, bipartite_lp(s, 0.2), cfg);
  EXPECT_EQ(r.result.stats.iterations, 25u);
  EXPECT_EQ(r.result.stats.tmax, 25u);
  EXPECT_EQ(r.cursor_passes, 26u);
}

TEST(SolveFractional, ObserverCanStopEarly) {
  EdgeStream s = EdgeStream::from_edges(testing::make_graph(4, {{0, 2}, {1, 3}, {0, 3}}, 2));
  MWUConfig cfg = MWUConfig::defaults(0.2);
  cfg.stop = StopRule::fixed;
  std::vector<IterationReport> seen;
  cfg.observer = [&](const IterationReport& r) {
    seen.push_back(r);
    return r.iteration < 3;
  };
  auto r = solve(s, bipartite_lp(s, 0.2), cfg);
  ASSERT_EQ(seen.size(), 3u);
  EXPECT_EQ(r.result.stats.iterations, 3u);
  for (const auto& rep : seen) {
    EXPECT_LE(rep.max_load, static_cast<double>(rep.iteration));
    // Potential grows by at most a factor 1 + eta * (weighted load).
    EXPECT_LE(rep.log_potential - rep.log_potential_before,
              std::log1p(cfg.step() * rep.weighted_load) + 1e-12);
  }
}

TEST(SolveFractional, LongRunRenormalizes) {
  EdgeStream s = EdgeStream::from_edges(testing::make_graph(2, {{0, 1}}, 1));
  MWUConfig cfg = MWUConfig::defaults(0.5);
  cfg.stop = StopRule::fixed;
  cfg.tmax = 4000;
  auto r = solve(s, bipartite_lp(s, 0.5), cfg);
  EXPECT_NEAR(r.result.x.get({0, 1}), 1.0, 1e-9);
  EXPECT_NEAR(r.result.certificate.gap, 0.0, 1e-9);
}

TEST(SolveFractional, TinyBudgetFailsWithStats) {
  detail::Rng rng(4);
  EdgeList g = testing::random_bipartite(rng, 60, 30, 0.2);
  EdgeStream s = EdgeStream::from_edges(g);
  try {
    solve(s, bipartite_lp(s, 0.1), MWUConfig::defaults(0.1), 60 * kRecordBytes + 16);
    FAIL();
  } catch (const RunFailure& e) {
    EXPECT_EQ(e.kind(), ErrorKind::budget_exceeded);
    EXPECT_LE(e.stats().peak_bytes, 60 * kRecordBytes + 16);
  }
}

TEST(SolveFractional, RejectsMismatchedInputs) {
  EdgeStream s = EdgeStream::from_edges(testing::make_graph(3, {{0, 1}}));
  auto lp = build_matching_lp(4, GraphClass::bipartite, 2, MatchingMode::cardinality, 0.1);
  EXPECT_THROW(solve(s, lp, MWUConfig::defaults(0.1)), RunFailure);
  MWUConfig bad = MWUConfig::defaults(0.1);
  bad.rho = 0.5;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(Certificate, SingleEdgeAndTriangle) {
  EdgeStream s = EdgeStream::from_edges(testing::make_graph(2, {{0, 1}}));
  FractionalMatching x(2);
  x.set({0, 1}, 1);
  DualExport d{2, {{1, 0}, {}}, WeightClasses::cardinality()};
  auto c = duality_gap_certificate(s, x, d, 0.1);
  EXPECT_DOUBLE_EQ(c.gap, 0);

  EdgeStream k3 = EdgeStream::from_edges(testing::make_graph(3, {{0, 1}, {1, 2}, {0, 2}}));
  FractionalMatching half(3);
  for (auto e : {Edge{0, 1}, Edge{1, 2}, Edge{0, 2}}) half.set(e, 0.5);
  DualExport dk{3, {{0.5, 0.5, 0.5}, {}}, WeightClasses::cardinality()};
  auto ck = duality_gap_certificate(k3, half, dk, 0.1);
  EXPECT_DOUBLE_EQ(ck.primal, 1.5);
  EXPECT_DOUBLE_EQ(ck.dual, 1.5);
  EXPECT_DOUBLE_EQ(ck.gap, 0);
}

TEST(Certificate, InfeasibleDualIsRejected) {
  EdgeStream s = EdgeStream::from_edges(testing::make_graph(3, {{0, 1}, {1, 2}}));
  FractionalMatching x(3);
  DualExport d{3, {{0.5, 0, 0.2}, {}}, WeightClasses::cardinality()};
  try {
    duality_gap_certificate(s, x, d, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::certificate_invalid);
  }
}

TEST(Certificate, RecomputedFromArtifacts) {
  detail::Rng rng(23);
  EdgeList g = testing::random_general(rng, 9, 0.5);
  EdgeStream s = EdgeStream::from_edges(g);
  auto lp = build_matching_lp(9, GraphClass::general, std::nullopt, MatchingMode::cardinality, 0.2);
  auto r = solve(s, lp, MWUConfig::defaults(0.2));
  std::stringstream xs, ds;
  write_fractional(xs, r.result.x);
  write_duals(ds, r.result.duals);
  DualExport back = read_duals(ds);
  EXPECT_EQ(back.duals.odd.size(), r.result.duals.duals.odd.size());
  ds.clear();
  ds.seekg(0);
  auto c = certify_from_artifacts(s, xs, ds, 0.2);
  EXPECT_NEAR(c.gap, r.result.certificate.gap, 1e-6);
  EXPECT_NEAR(c.dual, r.result.certificate.dual, 1e-6);
}

TEST(Certificate, MalformedDualFile) {
  std::stringstream a("0 1\n");
  EXPECT_THROW(read_duals(a), MalformedInput);
  std::stringstream b("# dual n 2 mode card eps 0.1 scale 1 cutoff -1\n5 1\n");
  EXPECT_THROW(read_duals(b), MalformedInput);
  std::stringstream c("# dual n 3 mode card eps 0.1 scale 1 cutoff -1\nodd 1 3 0 1\n");
  EXPECT_THROW(read_duals(c), MalformedInput);
}

}  // namespace
}  // namespace ssmatch
