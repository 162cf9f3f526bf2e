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

// Rounding of fractional matchings: support extraction, cycle cancelling,
// exact forest rounding, and the general-graph route that also breaks odd
// cycles.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ssmatch/detail/disjoint_sets.hpp"
#include "ssmatch/error.hpp"
#include "ssmatch/lp_model.hpp"
#include "ssmatch/stream_core.hpp"

namespace ssmatch {

struct SupportEdge {
  Edge edge;
  double x = 0;
  double coef = 1.0;  // objective coefficient
};

/// In-memory support of a fractional matching.
struct SupportGraph {
  std::size_t n = 0;
  std::vector<SupportEdge> edges;
  double tau = 0;
  double threshold_loss = 0;  // objective mass of entries dropped below tau

  double value() const {
    double s = 0;
    for (const auto& e : edges) s += e.coef * e.x;
    return s;
  }

  std::vector<double> loads() const {
    std::vector<double> l(n, 0.0);
    for (const auto& e : edges) {
      l[e.edge.u] += e.x;
      l[e.edge.v] += e.x;
    }
    return l;
  }

  FractionalMatching to_fractional() const {
    FractionalMatching x(n);
    for (const auto& e : edges) x.add(e.edge, e.x);
    return x;
  }

  bool is_forest() const {
    detail::DisjointSets ds(n);
    for (const auto& e : edges)
      if (!ds.unite(e.edge.u, e.edge.v)) return false;
    return true;
  }
};

/// Default support threshold eps / (4n).
inline double default_support_threshold(double eps, std::size_t n) {
  return eps / (4.0 * static_cast<double>(std::max<std::size_t>(n, 1)));
}

inline SupportGraph extract_support(const FractionalMatching& x, double tau,
                                    SpaceMeter* meter = nullptr,
                                    MatchingMode mode = MatchingMode::cardinality) {
  if (!(tau >= 0)) throw Error(ErrorKind::invalid_argument, "negative support threshold");
  SupportGraph s;
  s.n = x.vertex_count();
  s.tau = tau;
  MeterLease lease;
  if (meter) lease = MeterLease(*meter, "rounding.extract_support");
  for (const auto& [e, val] : x) {
    const double coef = mode == MatchingMode::cardinality ? 1.0 : e.w;
    if (val < tau || val <= 0) {
      s.threshold_loss += coef * val;
      continue;
    }
    lease.grow(3 * kRecordBytes);
    s.edges.push_back({e, val, coef});
  }
  return s;
}

namespace detail {

struct EdgeKeyHash {
  std::size_t operator()(const Edge& e) const {
    std::uint64_t h = (std::uint64_t{e.u} << 32) ^ e.v;
    h ^= std::bit_cast<std::uint64_t>(e.w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h * 0xff51afd7ed558ccdULL);
  }
};

/// Shifts mass around an even cycle (`ids` in traversal order) in the
/// direction that does not lower the objective, until one edge hits 0.
/// Returns the objective change (>= 0).
inline double cancel_even_cycle(std::vector<SupportEdge>& edges,
                                const std::vector<std::size_t>& ids) {
  if (ids.size() % 2 != 0) throw Error(ErrorKind::internal, "cycle is not even");
  double delta_obj = 0;
  for (std::size_t i = 0; i < ids.size(); ++i)
    delta_obj += (i % 2 == 0 ? 1.0 : -1.0) * edges[ids[i]].coef;
  const double sign = delta_obj >= 0 ? 1.0 : -1.0;
  // Positions whose sign is negative under the chosen direction shrink.
  std::size_t argmin = ids.size();
  double step = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    double s = (i % 2 == 0 ? 1.0 : -1.0) * sign;
    if (s < 0 && edges[ids[i]].x < step) {
      step = edges[ids[i]].x;
      argmin = i;
    }
  }
  if (argmin == ids.size()) throw Error(ErrorKind::internal, "no decreasing edge on cycle");
  for (std::size_t i = 0; i < ids.size(); ++i) {
    double s = (i % 2 == 0 ? 1.0 : -1.0) * sign;
    auto& x = edges[ids[i]].x;
    x += s * step;
    if (s < 0 && x <= step * 1e-15) x = 0;
  }
  edges[ids[argmin]].x = 0;
  return std::abs(delta_obj) * step;
}

}  // namespace detail

/// Support kept acyclic under insertion: an edge that closes a cycle has the
/// (even) cycle cancelled immediately. Vertex loads never change and the
/// objective never decreases. An odd cycle is a precondition failure.
class SupportForest {
 public:
  explicit SupportForest(std::size_t n) : adj_(n), stamp_(n, 0), via_(n, 0) {}

  /// Adds dx to edge e (objective coefficient coef).
  void add(const Edge& raw, double dx, double coef) {
    if (dx <= 0) return;
    const Edge e = canonical(raw);
    if (auto it = index_.find(e); it != index_.end()) {
      slots_[it->second].x += dx;
      value_ += coef * dx;
      return;
    }
    std::size_t id = allocate({e, dx, coef});
    peak_size_ = std::max(peak_size_, index_.size() + 1);
    value_ += coef * dx;
    auto path = find_path(e.u, e.v);
    if (!path) {
      link(id);
      return;
    }
    if (path->size() % 2 == 0)
      throw Error(ErrorKind::precondition_failed, "odd cycle in a bipartite support");
    std::vector<std::size_t> cycle = std::move(*path);
    cycle.push_back(id);
    value_ += detail::cancel_even_cycle(slots_, cycle);
    ++cycles_cancelled_;
    for (std::size_t i = 0; i + 1 < cycle.size(); ++i)
      if (slots_[cycle[i]].x == 0) unlink(cycle[i]);
    if (slots_[id].x == 0) {
      release(id);
    } else {
      link(id);
    }
  }

  double value() const { return value_; }
  std::size_t size() const { return index_.size(); }
  std::size_t cycles_cancelled() const { return cycles_cancelled_; }

  /// Largest live size since the last call to reset_peak().
  std::size_t peak_size() const { return peak_size_; }
  void reset_peak() { peak_size_ = index_.size(); }

  std::vector<SupportEdge> edges() const {
    std::vector<SupportEdge> out;
    out.reserve(index_.size());
    for (const auto& [e, id] : index_) out.push_back(slots_[id]);
    std::sort(out.begin(), out.end(), [](const SupportEdge& a, const SupportEdge& b) {
      return canonical_less(a.edge, b.edge);
    });
    return out;
  }

  template <class F>
  void for_each(F&& f) const {
    for (const auto& [e, id] : index_) f(slots_[id]);
  }

 private:
  std::size_t allocate(SupportEdge se) {
    if (!free_.empty()) {
      std::size_t id = free_.back();
      free_.pop_back();
      slots_[id] = se;
      return id;
    }
    slots_.push_back(se);
    return slots_.size() - 1;
  }

  void release(std::size_t id) {
    slots_[id].x = 0;
    free_.push_back(id);
  }

  void link(std::size_t id) {
    const Edge& e = slots_[id].edge;
    index_.emplace(e, id);
    peak_size_ = std::max(peak_size_, index_.size());
    adj_[e.u].push_back(id);
    adj_[e.v].push_back(id);
  }

  void unlink(std::size_t id) {
    const Edge e = slots_[id].edge;
    index_.erase(e);
    for (Vertex v : {e.u, e.v}) {
      auto& list = adj_[v];
      auto it = std::find(list.begin(), list.end(), id);
      *it = list.back();
      list.pop_back();
    }
    release(id);
  }

  /// Slot ids of the tree path from a to b, in order, if connected.
  std::optional<std::vector<std::size_t>> find_path(Vertex a, Vertex b) {
    if (adj_[a].empty() || adj_[b].empty()) return std::nullopt;
    if (++generation_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      generation_ = 1;
    }
    queue_.clear();
    queue_.push_back(a);
    stamp_[a] = generation_;
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      Vertex v = queue_[head];
      if (v == b) break;
      for (std::size_t id : adj_[v]) {
        const Edge& e = slots_[id].edge;
        Vertex w = e.u == v ? e.v : e.u;
        if (stamp_[w] == generation_) continue;
        stamp_[w] = generation_;
        via_[w] = id;
        queue_.push_back(w);
      }
    }
    if (stamp_[b] != generation_) return std::nullopt;
    std::vector<std::size_t> path;
    for (Vertex v = b; v != a;) {
      std::size_t id = via_[v];
      path.push_back(id);
      const Edge& e = slots_[id].edge;
      v = e.u == v ? e.v : e.u;
    }
    std::reverse(path.begin(), path.end());
    return path;
  }

  std::vector<SupportEdge> slots_;
  std::vector<std::size_t> free_;
  std::unordered_map<Edge, std::size_t, detail::EdgeKeyHash> index_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<std::uint32_t> stamp_;
  std::vector<std::size_t> via_;
  std::vector<Vertex> queue_;
  std::uint32_t generation_ = 0;
  double value_ = 0;
  std::size_t cycles_cancelled_ = 0;
  std::size_t peak_size_ = 0;
};

/// Makes a bipartite support acyclic without lowering the objective or
/// raising any vertex load.
inline SupportGraph cancel_cycles_bipartite(const SupportGraph& s) {
  SupportForest forest(s.n);
  for (const auto& e : s.edges) forest.add(e.edge, e.x, e.coef);
  SupportGraph out;
  out.n = s.n;
  out.tau = s.tau;
  out.threshold_loss = s.threshold_loss;
  out.edges = forest.edges();
  if (out.value() < s.value() - 1e-9 * std::max(1.0, s.value()))
    throw Error(ErrorKind::internal, "cycle cancelling lowered the objective");
  return out;
}

/// Exact rounding of an acyclic support: per-tree dynamic programming picks
/// the matching of maximum total coefficient among support edges.
inline Matching round_forest(const SupportGraph& s) {
  if (!s.is_forest()) throw Error(ErrorKind::precondition_failed, "support is not a forest");
  const std::size_t n = s.n;
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i < s.edges.size(); ++i) {
    adj[s.edges[i].edge.u].push_back(i);
    adj[s.edges[i].edge.v].push_back(i);
  }
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<double> free_best(n, 0.0), best(n, 0.0);
  std::vector<std::size_t> parent_edge(n, kNone), choice(n, kNone);
  std::vector<char> seen(n, 0);
  std::vector<Vertex> order;
  Matching m;
  for (Vertex root = 0; root < n; ++root) {
    if (seen[root] || adj[root].empty()) continue;
    order.clear();
    std::vector<Vertex> stack{root};
    seen[root] = 1;
    while (!stack.empty()) {
      Vertex v = stack.back();
      stack.pop_back();
      order.push_back(v);
      for (std::size_t id : adj[v]) {
        if (id == parent_edge[v]) continue;
        const Edge& e = s.edges[id].edge;
        Vertex c = e.u == v ? e.v : e.u;
        seen[c] = 1;
        parent_edge[c] = id;
        stack.push_back(c);
      }
    }
    // free_best[v]: best in subtree with v unmatched; best[v]: unrestricted.
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      Vertex v = *it;
      double base = 0;
      for (std::size_t id : adj[v]) {
        if (id == parent_edge[v]) continue;
        const Edge& e = s.edges[id].edge;
        base += best[e.u == v ? e.v : e.u];
      }
      double gain = 0;
      std::size_t pick = kNone;
      for (std::size_t id : adj[v]) {
        if (id == parent_edge[v]) continue;
        const Edge& e = s.edges[id].edge;
        Vertex c = e.u == v ? e.v : e.u;
        double g = s.edges[id].coef + free_best[c] - best[c];
        if (g > gain + 1e-12) {
          gain = g;
          pick = id;
        }
      }
      free_best[v] = base;
      best[v] = base + gain;
      choice[v] = pick;
    }
    // Top-down reconstruction; `may_match[v]` is false when v's parent took v.
    std::vector<std::pair<Vertex, bool>> todo{{root, true}};
    while (!todo.empty()) {
      auto [v, may_match] = todo.back();
      todo.pop_back();
      std::size_t taken = may_match ? choice[v] : kNone;
      if (taken != kNone) m.edges.push_back(s.edges[taken].edge);
      for (std::size_t id : adj[v]) {
        if (id == parent_edge[v]) continue;
        const Edge& e = s.edges[id].edge;
        todo.emplace_back(e.u == v ? e.v : e.u, id != taken);
      }
    }
  }
  return m;
}

namespace detail {

/// Working multigraph over support edges with liveness flags.
class SupportMultigraph {
 public:
  explicit SupportMultigraph(std::vector<SupportEdge>& edges, std::size_t n)
      : edges_(edges), n_(n) {}

  std::vector<std::size_t> live() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < edges_.size(); ++i)
      if (edges_[i].x > 0) out.push_back(i);
    return out;
  }

  /// Edge-partition into biconnected blocks (live edges only).
  std::vector<std::vector<std::size_t>> blocks() const {
    auto ids = live();
    std::vector<std::vector<std::size_t>> adj(n_);
    for (std::size_t id : ids) {
      adj[edges_[id].edge.u].push_back(id);
      adj[edges_[id].edge.v].push_back(id);
    }
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> disc(n_, kNone), low(n_, 0);
    std::vector<std::size_t> estack;
    std::vector<std::vector<std::size_t>> out;
    std::size_t timer = 0;
    struct Frame {
      Vertex v;
      std::size_t parent_edge;
      std::size_t next = 0;
    };
    for (Vertex s = 0; s < n_; ++s) {
      if (disc[s] != kNone || adj[s].empty()) continue;
      disc[s] = low[s] = timer++;
      std::vector<Frame> frames{{s, kNone}};
      while (!frames.empty()) {
        Frame& f = frames.back();
        if (f.next < adj[f.v].size()) {
          std::size_t id = adj[f.v][f.next++];
          if (id == f.parent_edge) continue;
          const Edge& e = edges_[id].edge;
          Vertex w = e.u == f.v ? e.v : e.u;
          if (disc[w] == kNone) {
            estack.push_back(id);
            disc[w] = low[w] = timer++;
            frames.push_back({w, id});
          } else if (disc[w] < disc[f.v]) {
            estack.push_back(id);
            low[f.v] = std::min(low[f.v], disc[w]);
          }
          continue;
        }
        Frame done = f;
        frames.pop_back();
        if (frames.empty()) break;
        Vertex p = frames.back().v;
        low[p] = std::min(low[p], low[done.v]);
        if (low[done.v] >= disc[p]) {
          std::vector<std::size_t> block;
          while (true) {
            std::size_t id = estack.back();
            estack.pop_back();
            block.push_back(id);
            if (id == done.parent_edge) break;
          }
          out.push_back(std::move(block));
        }
      }
    }
    return out;
  }

  static std::size_t block_vertex_count(const std::vector<SupportEdge>& edges,
                                        const std::vector<std::size_t>& block) {
    std::vector<Vertex> vs;
    for (std::size_t id : block) {
      vs.push_back(edges[id].edge.u);
      vs.push_back(edges[id].edge.v);
    }
    std::sort(vs.begin(), vs.end());
    return static_cast<std::size_t>(std::unique(vs.begin(), vs.end()) - vs.begin());
  }

  /// An even cycle (edge ids in traversal order), if any exists.
  std::optional<std::vector<std::size_t>> find_even_cycle() const {
    for (const auto& block : blocks()) {
      if (block.size() < 2) continue;
      std::size_t nv = block_vertex_count(edges_, block);
      if (block.size() == nv) {
        if (block.size() % 2 == 0) return order_cycle(block);
        continue;
      }
      return even_cycle_in_theta(block);
    }
    return std::nullopt;
  }

  /// Orders the edges of a block that is a simple cycle.
  std::vector<std::size_t> order_cycle(const std::vector<std::size_t>& block) const {
    std::unordered_map<Vertex, std::vector<std::size_t>> at;
    for (std::size_t id : block) {
      at[edges_[id].edge.u].push_back(id);
      at[edges_[id].edge.v].push_back(id);
    }
    std::vector<std::size_t> out{block.front()};
    Vertex start = edges_[block.front()].edge.u;
    Vertex cur = edges_[block.front()].edge.v;
    std::size_t prev = block.front();
    while (cur != start) {
      const auto& inc = at[cur];
      std::size_t nxt = inc[0] == prev ? inc[1] : inc[0];
      out.push_back(nxt);
      const Edge& e = edges_[nxt].edge;
      cur = e.u == cur ? e.v : e.u;
      prev = nxt;
    }
    return out;
  }

 private:
  Vertex other(std::size_t id, Vertex v) const {
    const Edge& e = edges_[id].edge;
    return e.u == v ? e.v : e.u;
  }

  /// In a 2-connected block with more edges than vertices: a cycle C plus an
  /// ear Q between two cycle vertices; two of the three resulting paths have
  /// equal parity and together form an even cycle.
  std::vector<std::size_t> even_cycle_in_theta(const std::vector<std::size_t>& block) const {
    std::unordered_map<Vertex, std::vector<std::size_t>> adj;
    for (std::size_t id : block) {
      adj[edges_[id].edge.u].push_back(id);
      adj[edges_[id].edge.v].push_back(id);
    }
    // Cycle C from the first back edge of a DFS.
    std::vector<Vertex> cyc_v;
    std::vector<std::size_t> cyc_e;
    {
      std::unordered_map<Vertex, std::size_t> parent_edge;
      std::unordered_map<Vertex, char> state;  // 1 on stack, 2 finished
      struct Frame {
        Vertex v;
        std::size_t next;
      };
      Vertex root = edges_[block.front()].edge.u;
      std::vector<Frame> frames{{root, 0}};
      state[root] = 1;
      parent_edge[root] = std::numeric_limits<std::size_t>::max();
      bool found = false;
      while (!frames.empty() && !found) {
        Frame& f = frames.back();
        const auto& inc = adj[f.v];
        if (f.next == inc.size()) {
          state[f.v] = 2;
          frames.pop_back();
          continue;
        }
        std::size_t id = inc[f.next++];
        if (id == parent_edge[f.v]) continue;
        Vertex w = other(id, f.v);
        auto st = state.find(w);
        if (st == state.end()) {
          state[w] = 1;
          parent_edge[w] = id;
          frames.push_back({w, 0});
        } else if (st->second == 1) {
          // Walk tree edges from f.v up to w.
          std::vector<Vertex> vs{f.v};
          std::vector<std::size_t> es;
          Vertex cur = f.v;
          while (cur != w) {
            std::size_t pe = parent_edge[cur];
            es.push_back(pe);
            cur = other(pe, cur);
            vs.push_back(cur);
          }
          // vs: v .. w; es[i] joins vs[i], vs[i+1]; close with id (w -> v).
          cyc_v = vs;
          cyc_e = es;
          cyc_e.push_back(id);
          found = true;
        }
      }
      if (!found) throw Error(ErrorKind::internal, "block without a cycle");
    }
    const std::size_t len = cyc_v.size();
    std::unordered_map<Vertex, std::size_t> pos;
    for (std::size_t i = 0; i < len; ++i) pos[cyc_v[i]] = i;
    auto in_cycle_edge = [&](std::size_t id) {
      return std::find(cyc_e.begin(), cyc_e.end(), id) != cyc_e.end();
    };
    // Ear Q from s = cyc_v[i] to r = cyc_v[j], j != i.
    for (std::size_t i = 0; i < len; ++i) {
      Vertex s = cyc_v[i];
      for (std::size_t first : adj[s]) {
        if (in_cycle_edge(first)) continue;
        Vertex t = other(first, s);
        std::vector<std::size_t> ear;
        std::optional<std::size_t> j;
        if (auto p = pos.find(t); p != pos.end()) {
          if (p->second == i) continue;
          ear = {first};
          j = p->second;
        } else {
          std::unordered_map<Vertex, std::size_t> via;
          std::vector<Vertex> queue{t};
          via[t] = first;
          for (std::size_t h = 0; h < queue.size() && !j; ++h) {
            Vertex x = queue[h];
            for (std::size_t id : adj[x]) {
              if (id == via[x]) continue;
              Vertex y = other(id, x);
              if (auto p = pos.find(y); p != pos.end()) {
                if (y == s) continue;
                // Reconstruct s -> t -> ... -> x -> y.
                std::vector<std::size_t> back{id};
                for (Vertex c = x; c != t;) {
                  std::size_t pe = via[c];
                  back.push_back(pe);
                  c = other(pe, c);
                }
                back.push_back(first);
                ear.assign(back.rbegin(), back.rend());
                j = p->second;
                break;
              }
              if (via.count(y)) continue;
              via[y] = id;
              queue.push_back(y);
            }
          }
          if (!j) continue;
        }
        // P1: cycle edges from i forward to j; P2: from j forward to i.
        std::vector<std::size_t> p1, p2;
        for (std::size_t k = i; k != *j; k = (k + 1) % len) p1.push_back(cyc_e[k]);
        for (std::size_t k = *j; k != i; k = (k + 1) % len) p2.push_back(cyc_e[k]);
        std::vector<std::size_t> out;
        if ((p1.size() + ear.size()) % 2 == 0) {
          out = p1;  // s -> r, then back along the ear
          out.insert(out.end(), ear.rbegin(), ear.rend());
        } else if ((p2.size() + ear.size()) % 2 == 0) {
          out = p2;  // r -> s, then the ear s -> r
          out.insert(out.end(), ear.begin(), ear.end());
        } else {
          out = cyc_e;
        }
        return out;
      }
    }
    throw Error(ErrorKind::internal, "no ear found in a 2-connected block");
  }

  std::vector<SupportEdge>& edges_;
  std::size_t n_;
};

}  // namespace detail

/// Per-stage accounting of a rounding run, in objective units.
struct RoundingReport {
  Matching matching;
  double input_value = 0;
  double threshold_loss = 0;
  double cycle_cancel_change = 0;  // >= 0
  double odd_cycle_loss = 0;
  double forest_value = 0;
  double matching_value = 0;
  std::size_t even_cycles_cancelled = 0;
  std::size_t odd_cycles_broken = 0;
};

/// extract_support -> cancel_cycles_bipartite -> round_forest.
inline RoundingReport round_bipartite(const FractionalMatching& x, MatchingMode mode,
                                      double tau, SpaceMeter* meter = nullptr) {
  RoundingReport r;
  r.input_value = objective_value(x, mode);
  SupportGraph s = extract_support(x, tau, meter, mode);
  r.threshold_loss = s.threshold_loss;
  const double before = s.value();
  SupportGraph f = cancel_cycles_bipartite(s);
  r.forest_value = f.value();
  r.cycle_cancel_change = r.forest_value - before;
  r.matching = round_forest(f);
  r.matching_value = r.matching.value(mode);
  return r;
}

/// General-graph rounding: cancel even cycles, break each remaining odd
/// cycle at its smallest edge, then round the forest exactly.
inline RoundingReport round_general(const FractionalMatching& x, const MatchingLP& lp,
                                    std::optional<double> tau = std::nullopt,
                                    SpaceMeter* meter = nullptr) {
  auto violations = check_feasible(x, lp, 1e-9, meter);
  if (!violations.empty())
    throw Error(ErrorKind::precondition_failed,
                "fractional input violates " + std::to_string(violations.size()) +
                    " LP constraint(s)");
  RoundingReport r;
  r.input_value = objective_value(x, lp.mode);
  SupportGraph s = extract_support(x, tau.value_or(default_support_threshold(lp.eps, lp.n)),
                                   meter, lp.mode);
  if (s.n < lp.n) s.n = lp.n;
  r.threshold_loss = s.threshold_loss;
  const double before = s.value();
  detail::SupportMultigraph g(s.edges, s.n);
  while (auto cycle = g.find_even_cycle()) {
    detail::cancel_even_cycle(s.edges, *cycle);
    ++r.even_cycles_cancelled;
  }
  r.cycle_cancel_change = s.value() - before;
  // What remains: blocks are single edges or odd cycles.
  for (const auto& block : g.blocks()) {
    if (block.size() < 2) continue;
    std::size_t drop = block.front();
    for (std::size_t id : block) {
      const auto& a = s.edges[id];
      const auto& b = s.edges[drop];
      if (a.x < b.x || (a.x == b.x && canonical_less(a.edge, b.edge))) drop = id;
    }
    r.odd_cycle_loss += s.edges[drop].coef * s.edges[drop].x;
    s.edges[drop].x = 0;
    ++r.odd_cycles_broken;
  }
  std::erase_if(s.edges, [](const SupportEdge& e) { return e.x <= 0; });
  r.forest_value = s.value();
  r.matching = round_forest(s);
  r.matching_value = r.matching.value(lp.mode);
  return r;
}

}  // namespace ssmatch
