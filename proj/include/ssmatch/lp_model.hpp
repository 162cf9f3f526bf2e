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

// The matching linear program: primal packing LP over edges with degree
// (and, for general graphs, odd-set) constraints, and its cover dual.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "ssmatch/detail/text.hpp"
#include "ssmatch/error.hpp"
#include "ssmatch/odd_sets.hpp"
#include "ssmatch/stream_core.hpp"

namespace ssmatch {

enum class MatchingMode { cardinality, weighted };
enum class GraphClass { bipartite, general };

inline const char* to_string(MatchingMode m) {
  return m == MatchingMode::cardinality ? "card" : "weighted";
}
inline const char* to_string(GraphClass c) {
  return c == GraphClass::bipartite ? "bipartite" : "general";
}

/// Validated LP descriptor.
struct MatchingLP {
  std::size_t n = 0;
  MatchingMode mode = MatchingMode::cardinality;
  GraphClass graph_class = GraphClass::bipartite;
  std::optional<std::size_t> left;
  double eps = 0.1;
  std::size_t odd_set_max = 0;  // 0 in bipartite mode

  /// Objective coefficient of an edge under this LP's mode.
  double weight_of(const Edge& e) const {
    return mode == MatchingMode::cardinality ? 1.0 : e.w;
  }
};

inline std::size_t default_odd_set_max(double eps) {
  return 2 * static_cast<std::size_t>(std::ceil(1.0 / eps - 1e-12)) + 1;
}

/// Builds the LP descriptor; `odd_set_max == 0` selects 2*ceil(1/eps)+1.
inline MatchingLP build_matching_lp(std::size_t n, GraphClass graph_class,
                                    std::optional<std::size_t> left,
                                    MatchingMode mode, double eps,
                                    std::size_t odd_set_max = 0) {
  if (n == 0) throw Error(ErrorKind::invalid_argument, "n must be positive");
  if (!(eps > 0 && eps <= 0.5))
    throw Error(ErrorKind::invalid_argument, "epsilon must lie in (0, 1/2]");
  MatchingLP lp;
  lp.n = n;
  lp.mode = mode;
  lp.graph_class = graph_class;
  lp.eps = eps;
  if (graph_class == GraphClass::bipartite) {
    if (!left || *left == 0 || *left >= n)
      throw Error(ErrorKind::invalid_argument,
                  "bipartite LP needs a left side size L with 0 < L < n");
    lp.left = left;
  } else {
    std::size_t k = odd_set_max ? odd_set_max : default_odd_set_max(eps);
    if (k < 3 || k % 2 == 0)
      throw Error(ErrorKind::invalid_argument, "odd-set size bound must be odd and >= 3");
    lp.odd_set_max = k;
  }
  return lp;
}

/// Sparse primal vector x over (canonical) edges. Parallel edges with
/// different weights are distinct entries.
class FractionalMatching {
 public:
  using Entries = std::map<Edge, double, decltype(&canonical_less)>;

  explicit FractionalMatching(std::size_t n = 0) : n_(n), entries_(&canonical_less) {}

  std::size_t vertex_count() const { return n_; }
  void set_vertex_count(std::size_t n) { n_ = n; }

  void set(const Edge& e, double x) {
    if (!(x >= 0)) throw Error(ErrorKind::invalid_argument, "negative x_e");
    Edge c = canonical(e);
    if (c.v >= n_) n_ = c.v + 1;
    auto it = entries_.find(c);
    double old = it == entries_.end() ? 0.0 : it->second;
    size_sum_ += x - old;
    weight_sum_ += (x - old) * c.w;
    if (x == 0) {
      if (it != entries_.end()) entries_.erase(it);
    } else if (it == entries_.end()) {
      entries_.emplace(c, x);
    } else {
      it->second = x;
    }
  }

  void add(const Edge& e, double dx) { set(e, get(e) + dx); }

  double get(const Edge& e) const {
    auto it = entries_.find(canonical(e));
    return it == entries_.end() ? 0.0 : it->second;
  }

  std::size_t support_size() const { return entries_.size(); }
  const Entries& entries() const { return entries_; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  /// Cached objective (incrementally maintained).
  double cached_value(MatchingMode mode) const {
    return mode == MatchingMode::cardinality ? size_sum_ : weight_sum_;
  }

  FractionalMatching scaled(double c) const {
    FractionalMatching out(n_);
    for (const auto& [e, x] : entries_) out.set(e, x * c);
    return out;
  }

 private:
  std::size_t n_;
  Entries entries_;
  double size_sum_ = 0;
  double weight_sum_ = 0;
};

/// Exact recomputation of sum w_e x_e over the support.
inline double objective_value(const FractionalMatching& x, MatchingMode mode) {
  double s = 0;
  for (const auto& [e, val] : x)
    s += (mode == MatchingMode::cardinality ? 1.0 : e.w) * val;
  return s;
}

inline double degree_load(const FractionalMatching& x, Vertex v) {
  if (v >= x.vertex_count())
    throw Error(ErrorKind::invalid_argument, "vertex id out of range");
  double s = 0;
  for (const auto& [e, val] : x)
    if (e.u == v || e.v == v) s += val;
  return s;
}

inline std::vector<double> degree_loads(const FractionalMatching& x) {
  std::vector<double> load(x.vertex_count(), 0.0);
  for (const auto& [e, val] : x) {
    load[e.u] += val;
    load[e.v] += val;
  }
  return load;
}

/// One violated LP constraint.
struct Violation {
  enum class Kind { degree, odd_set };
  Kind kind = Kind::degree;
  std::vector<Vertex> vertices;  // the vertex, or the odd set
  double load = 0;
  double limit = 0;
};

inline std::vector<SupportPair> support_pairs(const FractionalMatching& x) {
  std::vector<SupportPair> pairs;
  pairs.reserve(x.support_size());
  for (const auto& [e, val] : x)
    if (val > 0) pairs.push_back({e.u, e.v, val});
  return pairs;
}

/// Odd sets U with 3 <= |U| <= k_max, connected in the support, whose
/// load x(E(U)) exceeds (|U|-1)/2 + tol.
inline std::vector<Violation> violated_odd_sets(const FractionalMatching& x,
                                                std::size_t k_max, double tol,
                                                std::size_t cap = 5'000'000) {
  std::vector<Violation> out;
  auto pairs = support_pairs(x);
  ConnectedSubsetScanner scanner(pairs);
  try {
    scanner.for_each_odd(k_max, cap, [&](std::span<const Vertex> members, double inside) {
      double limit = static_cast<double>(members.size() - 1) / 2.0;
      if (inside > limit + tol)
        out.push_back({Violation::Kind::odd_set,
                       std::vector<Vertex>(members.begin(), members.end()), inside, limit});
    });
  } catch (const OddSetExplosion& e) {
    std::vector<std::vector<Vertex>> partial;
    for (auto& v : out) partial.push_back(v.vertices);
    throw OddSetExplosion(cap, std::move(partial));
  }
  return out;
}

/// Empty iff x satisfies every degree constraint (and, in general mode,
/// every odd-set constraint up to the LP's size bound) within `tol`.
inline std::vector<Violation> check_feasible(const FractionalMatching& x,
                                             const MatchingLP& lp, double tol,
                                             SpaceMeter* meter = nullptr) {
  if (tol < 0) throw Error(ErrorKind::invalid_argument, "negative tolerance");
  MeterLease lease;
  if (meter)
    lease = MeterLease(*meter, "lp_model.check_feasible",
                       static_cast<long long>(x.support_size()) * 3 * kRecordBytes);
  std::vector<Violation> out;
  FractionalMatching sized = x;
  if (sized.vertex_count() < lp.n) sized.set_vertex_count(lp.n);
  auto load = degree_loads(sized);
  for (std::size_t v = 0; v < load.size(); ++v)
    if (load[v] > 1.0 + tol)
      out.push_back({Violation::Kind::degree, {static_cast<Vertex>(v)}, load[v], 1.0});
  if (lp.graph_class == GraphClass::general) {
    auto odd = violated_odd_sets(x, lp.odd_set_max, tol);
    out.insert(out.end(), odd.begin(), odd.end());
  }
  return out;
}

/// Dual multiplier of one odd-set constraint.
struct OddSetDual {
  std::vector<Vertex> members;  // sorted
  double z = 0;

  double capacity() const { return static_cast<double>(members.size() - 1) / 2.0; }
  bool contains(Vertex v) const {
    return std::binary_search(members.begin(), members.end(), v);
  }
};

/// A dual solution: vertex cover values y and odd-set multipliers z.
/// Feasible when y_u + y_v + sum_{U contains u,v} z_U >= w_e for all e.
struct DualSolution {
  std::vector<double> y;
  std::vector<OddSetDual> odd;
};

inline double dual_objective(std::span<const double> y) {
  double s = 0;
  for (double v : y) {
    if (v < 0) throw Error(ErrorKind::invalid_argument, "negative dual entry");
    s += v;
  }
  return s;
}

/// sum_v y_v + sum_U z_U (|U|-1)/2.
inline double dual_objective(const DualSolution& d) {
  double s = dual_objective(d.y);
  for (const auto& u : d.odd) {
    if (u.z < 0) throw Error(ErrorKind::invalid_argument, "negative dual entry");
    s += u.z * u.capacity();
  }
  return s;
}

/// Left-hand side of the dual constraint of edge e.
inline double dual_cover(const DualSolution& d, const Edge& e) {
  double s = d.y[e.u] + d.y[e.v];
  for (const auto& u : d.odd)
    if (u.contains(e.u) && u.contains(e.v)) s += u.z;
  return s;
}

/// Multiplicative-weights state: one positive weight per vertex constraint
/// and per tracked odd-set constraint. Stored weights are the true weights
/// times exp(-log_offset) so long runs stay in floating-point range.
struct OddSetWeight {
  std::vector<Vertex> members;  // sorted
  double weight = 0;

  double capacity() const { return static_cast<double>(members.size() - 1) / 2.0; }
};

struct DualState {
  std::vector<double> weights;
  std::vector<OddSetWeight> odd_sets;
  double normalizer = 0;
  double log_offset = 0;
  std::size_t round = 0;
  MeterLease lease;

  std::size_t vertex_count() const { return weights.size(); }

  /// p_v = w_v / sum of all weights.
  double probability(Vertex v) const { return weights[v] / normalizer; }

  /// ln of the true total weight.
  double log_potential() const { return log_offset + std::log(normalizer); }

  double recompute_normalizer() const {
    double s = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (const auto& o : odd_sets) s += o.weight;
    return s;
  }
};

/// Integral matching.
struct Matching {
  std::vector<Edge> edges;

  std::size_t size() const { return edges.size(); }
  double weight() const {
    double s = 0;
    for (const auto& e : edges) s += e.w;
    return s;
  }
  double value(MatchingMode mode) const {
    return mode == MatchingMode::cardinality ? static_cast<double>(size()) : weight();
  }

  /// First vertex shared by two edges, if any.
  std::optional<Vertex> shared_vertex() const {
    std::unordered_set<Vertex> seen;
    for (const auto& e : edges) {
      if (!seen.insert(e.u).second) return e.u;
      if (!seen.insert(e.v).second) return e.v;
    }
    return std::nullopt;
  }

  FractionalMatching to_fractional(std::size_t n) const {
    FractionalMatching x(n);
    for (const auto& e : edges) x.add(e, 1.0);
    return x;
  }
};

// ---- serialization ---------------------------------------------------------

/// Lines "u v x" (plus a 4th weight column when any weight differs from 1),
/// preceded by "# fractional n <n>".
inline void write_fractional(std::ostream& out, const FractionalMatching& x) {
  bool weighted = false;
  for (const auto& [e, val] : x) weighted = weighted || e.w != 1.0;
  out << "# fractional n " << x.vertex_count() << '\n';
  for (const auto& [e, val] : x) {
    out << e.u << ' ' << e.v << ' ' << detail::format_double(val);
    if (weighted) out << ' ' << detail::format_double(e.w);
    out << '\n';
  }
}

inline FractionalMatching read_fractional(std::istream& in) {
  FractionalMatching x;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = detail::trim(line);
    if (t.empty()) continue;
    auto tok = detail::split_ws(t);
    if (t.front() == '#') {
      std::size_t n = 0;
      if (tok.size() == 4 && tok[1] == "fractional" && tok[2] == "n" &&
          detail::parse_int(tok[3], n))
        x.set_vertex_count(std::max(n, x.vertex_count()));
      continue;
    }
    Vertex u = 0, v = 0;
    double val = 0, w = 1.0;
    if ((tok.size() != 3 && tok.size() != 4) || !detail::parse_int(tok[0], u) ||
        !detail::parse_int(tok[1], v) || !detail::parse_double(tok[2], val) ||
        (tok.size() == 4 && !detail::parse_double(tok[3], w)))
      throw MalformedInput(lineno, "expected 'u v x [w]'");
    if (u == v || val < 0 || w < 0) throw MalformedInput(lineno, "invalid entry");
    x.add(Edge{u, v, w}, val);
  }
  return x;
}

/// Header "matching k weight", then one "u v" per edge.
inline void write_matching(std::ostream& out, const Matching& m) {
  out << "matching " << m.size() << ' ' << detail::format_double(m.weight()) << '\n';
  for (const auto& e : m.edges) out << e.u << ' ' << e.v << '\n';
}

inline Matching read_matching(std::istream& in, double* declared_weight = nullptr) {
  Matching m;
  std::string line;
  std::size_t lineno = 0;
  std::optional<std::size_t> declared;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto tok = detail::split_ws(t);
    if (!declared) {
      std::size_t k = 0;
      double w = 0;
      if (tok.size() != 3 || tok[0] != "matching" || !detail::parse_int(tok[1], k) ||
          !detail::parse_double(tok[2], w))
        throw MalformedInput(lineno, "expected header 'matching k weight'");
      declared = k;
      if (declared_weight) *declared_weight = w;
      continue;
    }
    Vertex u = 0, v = 0;
    if (tok.size() != 2 || !detail::parse_int(tok[0], u) || !detail::parse_int(tok[1], v))
      throw MalformedInput(lineno, "expected 'u v'");
    m.edges.push_back({u, v, 1.0});
  }
  if (!declared) throw MalformedInput(0, "missing matching header");
  if (*declared != m.size())
    throw MalformedInput(0, "matching header declares " + std::to_string(*declared) +
                                " edges, found " + std::to_string(m.size()));
  return m;
}

}  // namespace ssmatch
