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

// One-pass oracles for the multiplicative-weights engine. Given the current
// dual weights, an oracle reads the stream once and returns a matching of
// admissible edges (width 1).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ssmatch/error.hpp"
#include "ssmatch/lp_model.hpp"
#include "ssmatch/stream_core.hpp"

namespace ssmatch {

struct AdmissibilityRule {
  double threshold = 1.0;  // lambda in (0, 1] (or 1 + eps with slack)
  MatchingMode mode = MatchingMode::cardinality;
  double class_base = 1.1;  // 1 + eps
};

/// Scaled dual view: y_v = weights[v] * scale.
struct DualView {
  std::span<const double> weights;
  double scale = 1.0;

  double operator[](Vertex v) const { return weights[v] * scale; }
};

/// cardinality: y_u + y_v <= lambda; weighted: y_u + y_v <= lambda * w_e.
inline bool admissible(const Edge& e, const DualView& y, const AdmissibilityRule& rule) {
  const double cover = y[e.u] + y[e.v];
  const double rhs = rule.mode == MatchingMode::cardinality ? rule.threshold
                                                            : rule.threshold * e.w;
  return cover <= rhs;
}

/// floor(log_{1+eps}(1 / w)) for w in (0, 1].
inline int weight_class(double w, double eps) {
  if (!(w > 0)) throw Error(ErrorKind::invalid_argument, "weight class of non-positive weight");
  double r = std::log(1.0 / w) / std::log1p(eps);
  int i = static_cast<int>(std::floor(r + 1e-9));
  return std::max(i, 0);
}

/// Largest retained class index, ceil(log_{1+eps}(n / eps)).
inline int weight_class_cutoff(std::size_t n, double eps) {
  return static_cast<int>(
      std::ceil(std::log(static_cast<double>(n) / eps) / std::log1p(eps) - 1e-9));
}

/// Class-rounded objective coefficients for weighted runs: w is divided by
/// the stream's maximum weight, then rounded down to (1+eps)^-i; classes
/// beyond the cutoff (and zero weights) get coefficient 0.
struct WeightClasses {
  MatchingMode mode = MatchingMode::cardinality;
  double eps = 0.1;
  double weight_scale = 1.0;
  int cutoff = std::numeric_limits<int>::max();

  static WeightClasses cardinality() { return {}; }
  static WeightClasses weighted(double eps, double max_weight, std::size_t n) {
    return {MatchingMode::weighted, eps, max_weight, weight_class_cutoff(n, eps)};
  }

  double coefficient(const Edge& e) const {
    if (mode == MatchingMode::cardinality) return 1.0;
    if (!(e.w > 0) || !(weight_scale > 0)) return 0.0;
    int i = weight_class(std::min(1.0, e.w / weight_scale), eps);
    if (i > cutoff) return 0.0;
    return std::pow(1.0 + eps, -i);
  }
};

/// Prices edges against the raw multiplicative weights:
/// cost(e) = w_u + w_v + sum_{U contains e} z_U / cap(U).
class EdgePricer {
 public:
  EdgePricer(const DualState& duals, const WeightClasses& classes)
      : duals_(&duals), classes_(classes) {
    for (std::size_t i = 0; i < duals.odd_sets.size(); ++i)
      for (Vertex v : duals.odd_sets[i].members) by_vertex_[v].push_back(i);
  }

  double coefficient(const Edge& e) const { return classes_.coefficient(e); }

  double cost(const Edge& e) const {
    double c = duals_->weights[e.u] + duals_->weights[e.v];
    return c + surcharge(e);
  }

  double surcharge(const Edge& e) const {
    if (by_vertex_.empty()) return 0.0;
    auto a = by_vertex_.find(e.u);
    auto b = by_vertex_.find(e.v);
    if (a == by_vertex_.end() || b == by_vertex_.end()) return 0.0;
    double s = 0;
    auto i = a->second.begin(), j = b->second.begin();
    while (i != a->second.end() && j != b->second.end()) {
      if (*i < *j) {
        ++i;
      } else if (*j < *i) {
        ++j;
      } else {
        const auto& set = duals_->odd_sets[*i];
        s += set.weight / set.capacity();
        ++i;
        ++j;
      }
    }
    return s;
  }

  const DualState& duals() const { return *duals_; }
  const WeightClasses& classes() const { return classes_; }

 private:
  const DualState* duals_;
  WeightClasses classes_;
  std::unordered_map<Vertex, std::vector<std::size_t>> by_vertex_;
};

/// One oracle answer. `amounts` (parallel to the candidate edges, empty
/// meaning all 1) lets a caller hand in a fractional candidate.
struct OracleResult {
  Matching candidate;
  std::vector<double> amounts;
  double threshold = 1.0;
  /// min over edges with positive coefficient of cost / coefficient under
  /// the weights used for the pass; +inf when there is no such edge.
  double min_ratio = std::numeric_limits<double>::infinity();
  std::size_t edges_seen = 0;
  MeterLease lease;

  double amount(std::size_t i) const { return amounts.empty() ? 1.0 : amounts[i]; }

  std::map<Vertex, double> loads() const {
    std::map<Vertex, double> out;
    for (std::size_t i = 0; i < candidate.edges.size(); ++i) {
      out[candidate.edges[i].u] += amount(i);
      out[candidate.edges[i].v] += amount(i);
    }
    return out;
  }

  double max_load() const {
    double m = 0;
    for (const auto& [v, l] : loads()) m = std::max(m, l);
    return m;
  }
};

/// Pluggable streaming oracle. Implementations must read edges only through
/// the cursor and charge their working space to the meter.
class StreamOracle {
 public:
  virtual ~StreamOracle() = default;
  virtual std::string_view name() const = 0;
  /// `scale` converts raw costs into scaled duals (y = w * scale).
  virtual OracleResult run(EdgeStream::Cursor& cursor, const EdgePricer& pricer,
                           double scale, const AdmissibilityRule& rule,
                           SpaceMeter& meter) = 0;
};

/// Greedy pass: an admissible edge joins the matching iff both endpoints
/// are still free. The result is maximal among admissible edges in stream
/// order; ties go to the earlier edge.
inline OracleResult greedy_oracle_pass(EdgeStream::Cursor& cursor, const EdgePricer& pricer,
                                       double scale, const AdmissibilityRule& rule,
                                       SpaceMeter& meter) {
  const std::size_t n = pricer.duals().vertex_count();
  const long long edge_bytes =
      rule.mode == MatchingMode::cardinality ? kRecordBytes : 2 * kRecordBytes;
  MeterLease flags(meter, "stream_oracles.greedy", static_cast<long long>((n + 7) / 8));
  std::vector<bool> matched(n, false);
  OracleResult res;
  res.threshold = rule.threshold;
  res.lease = MeterLease(meter, "stream_oracles.greedy");
  while (auto e = cursor.next()) {
    ++res.edges_seen;
    const double coef = pricer.coefficient(*e);
    if (coef <= 0) continue;
    const double cost = pricer.cost(*e);
    res.min_ratio = std::min(res.min_ratio, cost / coef);
    if (matched[e->u] || matched[e->v]) continue;
    if (cost * scale <= rule.threshold * coef) {
      res.lease.grow(edge_bytes);
      matched[e->u] = matched[e->v] = true;
      res.candidate.edges.push_back(*e);
    }
  }
  return res;
}

class GreedyOracle final : public StreamOracle {
 public:
  explicit GreedyOracle(std::string name = "greedy") : name_(std::move(name)) {}

  std::string_view name() const override { return name_; }

  OracleResult run(EdgeStream::Cursor& cursor, const EdgePricer& pricer, double scale,
                   const AdmissibilityRule& rule, SpaceMeter& meter) override {
    return greedy_oracle_pass(cursor, pricer, scale, rule, meter);
  }

 private:
  std::string name_;
};

/// All connected odd sets U (3 <= |U| <= k_max) of the support of x with
/// x(E(U)) > (|U|-1)/2 + tol. Throws OddSetExplosion past `cap` candidates.
inline std::vector<std::vector<Vertex>> enumerate_violated_odd_sets(
    const FractionalMatching& x, std::size_t k_max, double tol = 1e-9,
    std::size_t cap = 5'000'000) {
  if (k_max % 2 == 0) throw Error(ErrorKind::invalid_argument, "k_max must be odd");
  std::vector<std::vector<Vertex>> out;
  for (auto& v : violated_odd_sets(x, k_max, tol, cap)) out.push_back(std::move(v.vertices));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace ssmatch
