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

#include <algorithm>
#include <sstream>

#include "ssmatch/generators.hpp"
#include "ssmatch/stream_core.hpp"
#include "test_util.hpp"

namespace ssmatch {
namespace {

using testing::TempFile;

std::vector<Edge> sorted_copy(std::vector<Edge> v) {
  std::sort(v.begin(), v.end(), canonical_less);
  return v;
}

TEST(EdgeStream, FileInIdentityOrder) {
  TempFile f("p 3 2\n0 1\n1 2\n");
  EdgeStream s = EdgeStream::open(f.path());
  EXPECT_EQ(s.vertex_count(), 3u);
  EXPECT_EQ(s.edge_count(), 2u);
  EXPECT_TRUE(s.file_backed());
  auto edges = collect_pass(s);
  ASSERT_EQ(edges.size(), 2u);
  EXPECT_EQ(edges[0], (Edge{0, 1}));
  EXPECT_EQ(edges[1], (Edge{1, 2}));
}

TEST(EdgeStream, SeededOrderIsStablePermutation) {
  std::string text = "p 40 0\n";
  std::vector<Edge> expect;
  int m = 0;
  for (Vertex u = 0; u < 40; ++u)
    for (Vertex v = u + 1; v < 40; v += 7) {
      text += std::to_string(u) + " " + std::to_string(v) + "\n";
      expect.push_back({u, v});
      ++m;
    }
  text.replace(text.find(" 0\n"), 3, " " + std::to_string(m) + "\n");
  TempFile f(text);
  EdgeStream plain = EdgeStream::open(f.path());
  EdgeStream seeded = EdgeStream::open(f.path(), StreamOrder::seeded(7));
  auto a = collect_pass(seeded);
  auto b = collect_pass(seeded);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, collect_pass(plain));
  EXPECT_EQ(sorted_copy(a), sorted_copy(collect_pass(plain)));
  EXPECT_EQ(sorted_copy(a), sorted_copy(expect));
}

TEST(EdgeStream, SelfLoopReportsLine) {
  TempFile f("p 3 2\n0 1\n# note\n0 0\n");
  try {
    EdgeStream::open(f.path());
    FAIL() << "expected malformed input";
  } catch (const MalformedInput& e) {
    EXPECT_EQ(e.line(), 4u);
    EXPECT_EQ(e.kind(), ErrorKind::malformed_input);
  }
}

TEST(EdgeStream, RejectsBadRecords) {
  for (const char* text : {"p 3 1\n0 3\n", "p 3 1\n0 x\n", "p 3 1\n0 1 -2\n", "p 3 2\n0 1\n",
                           "p 4 1 bipartite 2\n0 1\n", "p 0 0\n", "0 1\n", "p 3 1\n0 1 2 3\n"}) {
    TempFile f(text);
    EXPECT_THROW(EdgeStream::open(f.path()), MalformedInput) << text;
  }
  EXPECT_THROW(EdgeStream::open("/nonexistent/graph.txt"), Error);
}

TEST(EdgeStream, TwoEdgesThenEnd) {
  EdgeStream s = EdgeStream::from_edges(testing::make_graph(3, {{0, 1}, {1, 2}}));
  auto c = s.begin_pass();
  EXPECT_TRUE(c.next());
  EXPECT_TRUE(c.next());
  EXPECT_FALSE(c.next());
  EXPECT_FALSE(c.next());
  EXPECT_EQ(s.passes_completed(), 1u);
}

TEST(EdgeStream, EmptyFileEndsImmediately) {
  TempFile f("p 5 0\n");
  EdgeStream s = EdgeStream::open(f.path());
  auto c = s.begin_pass();
  EXPECT_FALSE(c.next());
  EXPECT_EQ(s.passes_completed(), 1u);
}

TEST(EdgeStream, PassCounterOnLargeStream) {
  EdgeList g = generate_graph("random-general(600,0.56)@3");
  ASSERT_GE(g.edges.size(), 100000u);
  EdgeStream s = EdgeStream::from_edges(std::move(g));
  for (int k = 1; k <= 4; ++k) {
    auto c = s.begin_pass();
    std::size_t seen = 0;
    while (c.next()) ++seen;
    EXPECT_EQ(seen, s.edge_count());
    EXPECT_EQ(s.passes_completed(), static_cast<std::size_t>(k));
  }
}

TEST(EdgeStream, AbandonedPassIsNotCounted) {
  EdgeStream s = EdgeStream::from_edges(testing::make_graph(3, {{0, 1}, {1, 2}}));
  {
    auto c = s.begin_pass();
    c.next();
  }
  EXPECT_EQ(s.passes_completed(), 0u);
}

TEST(EdgeStream, FileChangedMidRunIsAnError) {
  TempFile f("p 3 2\n0 1\n1 2\n");
  EdgeStream s = EdgeStream::open(f.path());
  collect_pass(s);
  std::ofstream(f.path()) << "p 3 2\n0 1\n1 1\n";
  EXPECT_THROW(collect_pass(s), Error);
}

TEST(StreamOrder, DeterministicArrangements) {
  EdgeList g = testing::make_graph(6, {{0, 3}, {1, 4}, {2, 5}, {0, 4}, {1, 5}, {2, 3}}, 3);
  for (auto order : {StreamOrder::sorted_by_endpoint(), StreamOrder::bipartite_block(),
                     StreamOrder::interleaved(), StreamOrder::seeded(11)}) {
    EdgeStream s = EdgeStream::from_edges(g, order);
    auto once = collect_pass(s);
    EXPECT_EQ(once, collect_pass(s)) << order.label();
    EXPECT_EQ(sorted_copy(once), sorted_copy(g.edges)) << order.label();
    EXPECT_EQ(StreamOrder::parse(order.label()), order);
  }
  auto sorted = collect_pass(*std::make_unique<EdgeStream>(
      EdgeStream::from_edges(g, StreamOrder::sorted_by_endpoint())));
  EXPECT_TRUE(std::is_sorted(sorted.begin(), sorted.end(), canonical_less));
}

TEST(EdgeStream, RoundTripThroughText) {
  EdgeList g = testing::make_graph(4, {{0, 2, 1.5}, {1, 3, 2}, {0, 3, 0.25}}, 2);
  std::stringstream ss;
  write_edge_list(ss, g);
  EdgeList back = read_edge_list(ss);
  EXPECT_EQ(back.n, 4u);
  EXPECT_EQ(back.left, std::optional<std::size_t>(2));
  EXPECT_TRUE(back.weighted);
  EXPECT_EQ(back.edges, g.edges);
}

TEST(SpaceMeter, Arithmetic) {
  SpaceMeter m(1000);
  m.charge(400, "t");
  m.charge(500, "t");
  EXPECT_EQ(m.current(), 900);
  EXPECT_EQ(m.peak(), 900);
  try {
    m.charge(200, "mod");
    FAIL();
  } catch (const BudgetExceeded& e) {
    EXPECT_EQ(e.kind(), ErrorKind::budget_exceeded);
    EXPECT_EQ(e.module(), "mod");
  }
  EXPECT_EQ(m.current(), 900);
}

TEST(SpaceMeter, PeakTracksMaximum) {
  SpaceMeter m(1000);
  m.charge(400, "t");
  m.charge(-400, "t");
  m.charge(700, "t");
  EXPECT_EQ(m.peak(), 700);
  EXPECT_THROW(m.charge(-800, "t"), Error);
}

TEST(SpaceMeter, LeaseReleasesOnScopeExit) {
  SpaceMeter m(100);
  {
    MeterLease a(m, "a", 30);
    MeterLease b = std::move(a);
    b.grow(20);
    EXPECT_EQ(m.current(), 50);
  }
  EXPECT_EQ(m.current(), 0);
  EXPECT_EQ(m.peak(), 50);
  EXPECT_EQ(SpaceMeter::default_budget(10, 0.5), 64 * 10 * 8 * kRecordBytes);
}

}  // namespace
}  // namespace ssmatch
