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

#pragma once

// Shared fixtures for the unit and acceptance tests: small graph builders
// and brute-force reference computations.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <unistd.h>

#include "ssmatch/detail/disjoint_sets.hpp"
#include "ssmatch/detail/random.hpp"
#include "ssmatch/lp_model.hpp"
#include "ssmatch/rounding.hpp"
#include "ssmatch/stream_core.hpp"

namespace ssmatch::testing {

inline EdgeList make_graph(std::size_t n, std::vector<Edge> edges,
                           std::optional<std::size_t> left = std::nullopt) {
  EdgeList g;
  g.n = n;
  g.left = left;
  g.edges = std::move(edges);
  for (const auto& e : g.edges) g.weighted = g.weighted || e.w != 1.0;
  return g;
}

inline EdgeList random_bipartite(detail::Rng& rng, std::size_t n, std::size_t left, double p,
                                 bool weighted = false) {
  EdgeList g;
  g.n = n;
  g.left = left;
  g.weighted = weighted;
  for (Vertex u = 0; u < left; ++u)
    for (Vertex v = static_cast<Vertex>(left); v < n; ++v)
      if (rng.bernoulli(p)) g.edges.push_back({u, v, weighted ? double(1 + rng.below(100)) : 1.0});
  return g;
}

inline EdgeList random_general(detail::Rng& rng, std::size_t n, double p) {
  EdgeList g;
  g.n = n;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v)
      if (rng.bernoulli(p)) g.edges.push_back({u, v, 1.0});
  return g;
}

inline EdgeList cycle_graph(std::size_t n) {
  EdgeList g;
  g.n = n;
  for (Vertex v = 0; v < n; ++v) g.edges.push_back({v, static_cast<Vertex>((v + 1) % n), 1.0});
  return g;
}

/// Outer 5-cycle 0..4, spokes i -- i+5, inner pentagram on 5..9.
inline EdgeList petersen_graph() {
  EdgeList g;
  g.n = 10;
  for (Vertex i = 0; i < 5; ++i) {
    g.edges.push_back({i, static_cast<Vertex>((i + 1) % 5), 1.0});
    g.edges.push_back({i, static_cast<Vertex>(i + 5), 1.0});
    g.edges.push_back({static_cast<Vertex>(5 + i), static_cast<Vertex>(5 + (i + 2) % 5), 1.0});
  }
  return g;
}

/// Every odd U (3 <= |U| <= k_max) that is connected in the support of x
/// and has x(E(U)) > (|U|-1)/2 + tol, found by trying all 2^n subsets.
inline std::vector<std::vector<Vertex>> brute_force_violated_sets(const FractionalMatching& x,
                                                                  std::size_t n, std::size_t k_max,
                                                                  double tol = 1e-9) {
  std::vector<std::vector<Vertex>> out;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const int size = __builtin_popcount(mask);
    if (size < 3 || size % 2 == 0 || static_cast<std::size_t>(size) > k_max) continue;
    double inside = 0;
    detail::DisjointSets dsu(n);
    for (const auto& [e, val] : x) {
      if (val <= 0 || !(mask >> e.u & 1) || !(mask >> e.v & 1)) continue;
      inside += val;
      dsu.unite(e.u, e.v);
    }
    std::vector<Vertex> members;
    for (Vertex v = 0; v < n; ++v)
      if (mask >> v & 1) members.push_back(v);
    bool connected = true;
    for (Vertex v : members) connected = connected && dsu.find(v) == dsu.find(members[0]);
    if (connected && inside > (size - 1) / 2.0 + tol) out.push_back(members);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Best objective of a matching using only edges of `s` (<= 24 edges).
inline double brute_force_support_optimum(const SupportGraph& s) {
  const std::size_t m = s.edges.size();
  double best = 0;
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    std::vector<char> used(s.n, 0);
    double value = 0;
    bool ok = true;
    for (std::size_t i = 0; i < m && ok; ++i) {
      if (!(mask >> i & 1)) continue;
      const Edge& e = s.edges[i].edge;
      if (used[e.u] || used[e.v]) ok = false;
      used[e.u] = used[e.v] = 1;
      value += s.edges[i].coef;
    }
    if (ok) best = std::max(best, value);
  }
  return best;
}

/// Scratch file removed on destruction.
class TempFile {
 public:
  explicit TempFile(const std::string& contents, const std::string& tag = "g") {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("ssmatch_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++) + ".txt");
    std::ofstream(path_) << contents;
  }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string str() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace ssmatch::testing
