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

// Exact reference solvers. These hold the whole graph in memory and are
// meant for validation only; nothing on the streaming path includes them.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <vector>

#include "ssmatch/error.hpp"
#include "ssmatch/lp_model.hpp"
#include "ssmatch/stream_core.hpp"

namespace ssmatch {

/// 2-coloring of the graph; nullopt if some component has an odd cycle.
inline std::optional<std::vector<int>> two_coloring(std::size_t n, const std::vector<Edge>& edges) {
  std::vector<std::vector<Vertex>> adj(n);
  for (const auto& e : edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::vector<int> side(n, -1);
  std::vector<Vertex> stack;
  for (Vertex s = 0; s < n; ++s) {
    if (side[s] != -1) continue;
    side[s] = 0;
    stack.push_back(s);
    while (!stack.empty()) {
      Vertex u = stack.back();
      stack.pop_back();
      for (Vertex v : adj[u]) {
        if (side[v] == -1) {
          side[v] = 1 - side[u];
          stack.push_back(v);
        } else if (side[v] == side[u]) {
          return std::nullopt;
        }
      }
    }
  }
  return side;
}

/// Maximum-cardinality matching of a bipartite graph (Hopcroft-Karp).
inline Matching hopcroft_karp(std::size_t n, const std::vector<Edge>& edges) {
  auto side = two_coloring(n, edges);
  if (!side) throw Error(ErrorKind::invalid_argument, "hopcroft_karp: graph is not bipartite");
  const auto& col = *side;
  std::vector<std::vector<std::pair<Vertex, std::size_t>>> adj(n);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    if (col[e.u] == 0)
      adj[e.u].push_back({e.v, i});
    else
      adj[e.v].push_back({e.u, i});
  }
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  constexpr int kInf = std::numeric_limits<int>::max();
  std::vector<std::size_t> mate_edge(n, kNone);  // edge index matched at vertex
  std::vector<Vertex> mate(n, 0);
  std::vector<int> dist(n);
  std::vector<std::size_t> it(n);

  auto bfs = [&] {
    std::queue<Vertex> q;
    bool found = false;
    for (Vertex u = 0; u < n; ++u) {
      if (col[u] != 0) continue;
      if (mate_edge[u] == kNone) {
        dist[u] = 0;
        q.push(u);
      } else {
        dist[u] = kInf;
      }
    }
    while (!q.empty()) {
      Vertex u = q.front();
      q.pop();
      for (auto [v, idx] : adj[u]) {
        if (mate_edge[v] == kNone) {
          found = true;
        } else if (dist[mate[v]] == kInf) {
          dist[mate[v]] = dist[u] + 1;
          q.push(mate[v]);
        }
      }
    }
    return found;
  };

  // Iterative DFS along the layered graph.
  auto augment = [&](Vertex root) {
    struct Frame {
      Vertex u;
      Vertex v;
      std::size_t idx;
    };
    std::vector<Frame> path;
    Vertex u = root;
    while (true) {
      bool advanced = false;
      while (it[u] < adj[u].size()) {
        auto [v, idx] = adj[u][it[u]++];
        if (mate_edge[v] == kNone) {
          path.push_back({u, v, idx});
          for (const auto& f : path) {
            mate_edge[f.u] = mate_edge[f.v] = f.idx;
            mate[f.u] = f.v;
            mate[f.v] = f.u;
          }
          return true;
        }
        Vertex w = mate[v];
        if (dist[w] == dist[u] + 1) {
          path.push_back({u, v, idx});
          u = w;
          advanced = true;
          break;
        }
      }
      if (advanced) continue;
      dist[u] = kInf;
      if (path.empty()) return false;
      u = path.back().u;
      path.pop_back();
    }
  };

  while (bfs()) {
    std::fill(it.begin(), it.end(), 0);
    for (Vertex u = 0; u < n; ++u)
      if (col[u] == 0 && mate_edge[u] == kNone) augment(u);
  }
  Matching m;
  for (Vertex u = 0; u < n; ++u)
    if (col[u] == 0 && mate_edge[u] != kNone) m.edges.push_back(canonical(edges[mate_edge[u]]));
  std::sort(m.edges.begin(), m.edges.end(), canonical_less);
  return m;
}

/// Maximum-weight (not necessarily perfect) bipartite matching via
/// successive shortest augmenting paths with potentials; stops once the
/// best augmentation no longer increases the weight.
inline Matching max_weight_bipartite(std::size_t n, const std::vector<Edge>& edges) {
  auto side = two_coloring(n, edges);
  if (!side) throw Error(ErrorKind::invalid_argument, "max_weight_bipartite: graph is not bipartite");
  for (const auto& e : edges)
    if (e.w < 0) throw Error(ErrorKind::invalid_argument, "max_weight_bipartite: negative weight");
  const auto& col = *side;
  // Network: source s -> left -> right -> sink t, costs -w.
  const std::size_t s = n, t = n + 1, N = n + 2;
  struct Arc {
    std::size_t to, rev;
    int cap;
    double cost;
    std::size_t edge;
  };
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::vector<Arc>> g(N);
  auto add_arc = [&](std::size_t a, std::size_t b, double cost, std::size_t edge) {
    g[a].push_back({b, g[b].size(), 1, cost, edge});
    g[b].push_back({a, g[a].size() - 1, 0, -cost, edge});
  };
  for (Vertex v = 0; v < n; ++v) {
    if (col[v] == 0)
      add_arc(s, v, 0, kNone);
    else
      add_arc(v, t, 0, kNone);
  }
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    if (e.w <= 0) continue;
    if (col[e.u] == 0)
      add_arc(e.u, e.v, -e.w, i);
    else
      add_arc(e.v, e.u, -e.w, i);
  }
  const double kInf = std::numeric_limits<double>::infinity();
  // Initial potentials: DAG s -> L -> R -> t, so one relaxation sweep suffices.
  std::vector<double> pot(N, 0);
  for (Vertex v = 0; v < n; ++v)
    if (col[v] == 1)
      for (const auto& a : g[v])
        if (a.cap == 0 && a.to < n) pot[v] = std::min(pot[v], -a.cost);
  for (Vertex v = 0; v < n; ++v)
    if (col[v] == 1) pot[t] = std::min(pot[t], pot[v]);

  std::vector<double> dist(N);
  std::vector<std::size_t> prev_node(N), prev_arc(N);
  while (true) {
    std::fill(dist.begin(), dist.end(), kInf);
    dist[s] = 0;
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    pq.push({0, s});
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (d > dist[u]) continue;
      for (std::size_t i = 0; i < g[u].size(); ++i) {
        const auto& a = g[u][i];
        if (a.cap <= 0) continue;
        double nd = d + a.cost + pot[u] - pot[a.to];
        if (nd < dist[a.to] - 1e-12) {
          dist[a.to] = nd;
          prev_node[a.to] = u;
          prev_arc[a.to] = i;
          pq.push({nd, a.to});
        }
      }
    }
    if (dist[t] == kInf) break;
    const double path_cost = dist[t] + pot[t] - pot[s];
    if (path_cost >= -1e-12) break;
    for (std::size_t v = 0; v < N; ++v)
      if (dist[v] < kInf) pot[v] += dist[v];
    for (std::size_t v = t; v != s; v = prev_node[v]) {
      auto& a = g[prev_node[v]][prev_arc[v]];
      a.cap -= 1;
      g[v][a.rev].cap += 1;
    }
  }
  Matching m;
  for (Vertex u = 0; u < n; ++u) {
    if (col[u] != 0) continue;
    for (const auto& a : g[u])
      if (a.edge != kNone && a.to < n && a.cap == 0) m.edges.push_back(canonical(edges[a.edge]));
  }
  std::sort(m.edges.begin(), m.edges.end(), canonical_less);
  return m;
}

/// Exhaustive maximum matching for small general graphs (n <= 20 via a
/// subset DP, otherwise m <= 24 via edge recursion). Cardinality mode
/// maximizes size; weighted mode maximizes total weight.
inline Matching brute_force_max_matching(std::size_t n, const std::vector<Edge>& edges,
                                         MatchingMode mode = MatchingMode::cardinality) {
  auto gain = [&](const Edge& e) { return mode == MatchingMode::cardinality ? 1.0 : e.w; };
  Matching best;
  if (n <= 20) {
    // f[mask] = best matching using only vertices in `mask`, decided by the
    // lowest vertex of the mask: unmatched, or matched along some edge.
    std::vector<std::vector<std::size_t>> inc(n);
    for (std::size_t i = 0; i < edges.size(); ++i) {
      inc[edges[i].u].push_back(i);
      inc[edges[i].v].push_back(i);
    }
    const std::size_t full = std::size_t{1} << n;
    constexpr std::uint32_t kSkip = std::numeric_limits<std::uint32_t>::max();
    std::vector<double> f(full, 0.0);
    std::vector<std::uint32_t> choice(full, kSkip);
    for (std::size_t mask = 1; mask < full; ++mask) {
      const Vertex low = static_cast<Vertex>(__builtin_ctzll(mask));
      const std::size_t rest = mask & ~(std::size_t{1} << low);
      f[mask] = f[rest];
      for (std::size_t i : inc[low]) {
        const Vertex other = edges[i].u == low ? edges[i].v : edges[i].u;
        if (!(rest >> other & 1)) continue;
        const double cand = f[rest & ~(std::size_t{1} << other)] + gain(edges[i]);
        if (cand > f[mask] + 1e-12) {
          f[mask] = cand;
          choice[mask] = static_cast<std::uint32_t>(i);
        }
      }
    }
    for (std::size_t mask = full - 1; mask;) {
      const Vertex low = static_cast<Vertex>(__builtin_ctzll(mask));
      mask &= ~(std::size_t{1} << low);
      if (choice[mask | (std::size_t{1} << low)] == kSkip) continue;
      const Edge& e = edges[choice[mask | (std::size_t{1} << low)]];
      best.edges.push_back(canonical(e));
      mask &= ~(std::size_t{1} << (e.u == low ? e.v : e.u));
    }
  } else if (edges.size() <= 24) {
    std::vector<char> used(n, 0);
    std::vector<Edge> cur;
    double best_value = 0, cur_value = 0;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == edges.size()) {
        if (cur_value > best_value + 1e-12) {
          best_value = cur_value;
          best.edges = cur;
        }
        return;
      }
      rec(i + 1);
      const Edge& e = edges[i];
      if (used[e.u] || used[e.v]) return;
      used[e.u] = used[e.v] = 1;
      cur.push_back(canonical(e));
      cur_value += gain(e);
      rec(i + 1);
      cur_value -= gain(e);
      cur.pop_back();
      used[e.u] = used[e.v] = 0;
    };
    rec(0);
  } else {
    throw Error(ErrorKind::too_large, "brute force needs n <= 20 or m <= 24");
  }
  std::sort(best.edges.begin(), best.edges.end(), canonical_less);
  return best;
}

/// Optimum of the cardinality matching LP. With `degree_only` the odd-set
/// constraints are dropped; that optimum is half a maximum matching of the
/// bipartite double cover. Full LP optima are only computed for bipartite
/// graphs, where they equal the maximum matching size.
inline double fractional_lp_opt(std::size_t n, const std::vector<Edge>& edges, bool degree_only) {
  if (!degree_only) {
    if (!two_coloring(n, edges))
      throw Error(ErrorKind::unsupported, "full matching LP optimum needs a bipartite graph");
    return static_cast<double>(hopcroft_karp(n, edges).size());
  }
  std::vector<Edge> cover;
  cover.reserve(2 * edges.size());
  for (const auto& e : edges) {
    cover.push_back({e.u, static_cast<Vertex>(n + e.v), 1});
    cover.push_back({e.v, static_cast<Vertex>(n + e.u), 1});
  }
  return static_cast<double>(hopcroft_karp(2 * n, cover).size()) / 2.0;
}

}  // namespace ssmatch
