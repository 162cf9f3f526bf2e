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

// Multiplicative-weights solver for the matching LP. Each iteration is one
// oracle pass over the stream; vertex (and odd-set) weights grow by
// (1 + eta * load / rho); the accumulated oracle matchings, divided by their
// largest constraint load, form the primal; the weights divided by the
// smallest edge cost seen in a pass form the dual. The run stops once the
// best primal/dual pair certifies a relative gap <= eps (or after T_max).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ssmatch/detail/text.hpp"
#include "ssmatch/error.hpp"
#include "ssmatch/lp_model.hpp"
#include "ssmatch/odd_sets.hpp"
#include "ssmatch/rounding.hpp"
#include "ssmatch/stream_core.hpp"
#include "ssmatch/stream_oracles.hpp"

namespace ssmatch {

enum class StopRule { fixed, gap };

/// Per-iteration snapshot handed to MWUConfig::observer.
struct IterationReport {
  std::size_t iteration = 0;
  std::size_t candidate_size = 0;
  double candidate_value = 0;
  double min_cost = 0;  // smallest edge cost / coefficient in this pass
  double primal = 0;
  double best_dual = 0;
  double gap = 1;
  double max_load = 0;
  double log_potential = 0;
  double log_potential_before = 0;
  double weighted_load = 0;  // sum_v p_v * load_v / rho, before the update
  std::size_t odd_sets = 0;
  std::size_t support = 0;
};

struct MWUConfig {
  double eps = 0.1;
  double eta = 0;         // 0: eps / 4
  double rho = 1.0;       // width bound
  double tmax_scale = 4;  // c in ceil(c * rho * ln(n) / eps^2)
  std::size_t tmax = 0;   // 0: derived from tmax_scale
  StopRule stop = StopRule::gap;
  double threshold = 0;   // admissibility lambda; 0: 1 + eps
  std::size_t odd_set_cap = 2'000'000;
  /// Called after every iteration; returning false ends the run.
  std::function<bool(const IterationReport&)> observer;

  static MWUConfig defaults(double eps) {
    MWUConfig c;
    c.eps = eps;
    return c;
  }

  double step() const { return eta > 0 ? eta : eps / 4; }
  double lambda() const { return threshold > 0 ? threshold : 1 + eps; }

  std::size_t iteration_cap(std::size_t n) const {
    if (tmax) return tmax;
    double t = std::ceil(tmax_scale * rho * std::log(static_cast<double>(n)) / (eps * eps));
    return std::max<std::size_t>(1, static_cast<std::size_t>(t));
  }

  void validate() const {
    if (!(eps > 0 && eps <= 0.5))
      throw Error(ErrorKind::invalid_argument, "epsilon must lie in (0, 1/2]");
    if (!(step() > 0 && step() <= 0.5))
      throw Error(ErrorKind::invalid_argument, "step size must lie in (0, 1/2]");
    if (!(rho >= 1)) throw Error(ErrorKind::invalid_argument, "width bound must be >= 1");
    if (!(tmax_scale > 0)) throw Error(ErrorKind::invalid_argument, "tmax scale must be positive");
    if (!(lambda() > 0)) throw Error(ErrorKind::invalid_argument, "threshold must be positive");
  }
};

/// A run that failed part-way; `stats` holds what was measured so far.
class RunFailure : public Error {
 public:
  RunFailure(ErrorKind kind, const std::string& what, RunStats stats)
      : Error(kind, what), stats_(std::move(stats)) {}

  const RunStats& stats() const { return stats_; }

 private:
  RunStats stats_;
};

/// Uniform weights w_v = 1; charges n records.
inline DualState init_duals(std::size_t n, SpaceMeter* meter = nullptr) {
  if (n == 0) throw Error(ErrorKind::invalid_argument, "n must be positive");
  DualState d;
  if (meter)
    d.lease = MeterLease(*meter, "mwu_engine.duals",
                         static_cast<long long>(n) * kRecordBytes);
  d.weights.assign(n, 1.0);
  d.normalizer = static_cast<double>(n);
  return d;
}

namespace detail {

inline long long odd_set_bytes(const OddSetWeight& s) {
  return static_cast<long long>(s.members.size()) * 4 + kRecordBytes;
}

inline bool set_contains(const std::vector<Vertex>& sorted, Vertex v) {
  return std::binary_search(sorted.begin(), sorted.end(), v);
}

}  // namespace detail

/// w_v <- w_v (1 + eta * load_v / rho) for every constraint touched by the
/// oracle's candidate. A load above rho is a width violation.
inline void mwu_step(DualState& duals, const OracleResult& result, const MWUConfig& cfg,
                     std::string_view oracle_name = "oracle") {
  const double eta = cfg.step();
  auto loads = result.loads();
  for (const auto& [v, load] : loads) {
    if (v >= duals.weights.size())
      throw Error(ErrorKind::invalid_argument, "oracle load on unknown vertex");
    if (load > cfg.rho)
      throw Error(ErrorKind::width_violation,
                  std::string(oracle_name) + " produced load " + detail::format_double(load) +
                      " > width " + detail::format_double(cfg.rho) + " at vertex " +
                      std::to_string(v));
  }
  for (const auto& [v, load] : loads) duals.weights[v] *= 1 + eta * load / cfg.rho;
  for (auto& set : duals.odd_sets) {
    double inside = 0;
    for (std::size_t i = 0; i < result.candidate.edges.size(); ++i) {
      const Edge& e = result.candidate.edges[i];
      if (detail::set_contains(set.members, e.u) && detail::set_contains(set.members, e.v))
        inside += result.amount(i);
    }
    if (inside > 0) set.weight *= 1 + eta * (inside / set.capacity()) / cfg.rho;
  }
  ++duals.round;
  duals.normalizer = duals.recompute_normalizer();
  double biggest = *std::max_element(duals.weights.begin(), duals.weights.end());
  for (const auto& s : duals.odd_sets) biggest = std::max(biggest, s.weight);
  if (biggest > 1e150) {
    const double shift = std::log(biggest);
    const double f = 1.0 / biggest;
    for (double& w : duals.weights) w *= f;
    for (auto& s : duals.odd_sets) s.weight *= f;
    duals.log_offset += shift;
    duals.normalizer = duals.recompute_normalizer();
  }
}

/// Exported dual solution plus what is needed to rebuild the LP objective
/// it certifies (class-rounded coefficients in weighted mode).
struct DualExport {
  std::size_t n = 0;
  DualSolution duals;
  WeightClasses classes;
};

inline void write_duals(std::ostream& out, const DualExport& d, double tau = 0) {
  out << "# dual n " << d.n << " mode " << to_string(d.classes.mode) << " eps "
      << detail::format_double(d.classes.eps) << " scale "
      << detail::format_double(d.classes.weight_scale) << " cutoff "
      << (d.classes.mode == MatchingMode::weighted ? d.classes.cutoff : -1) << '\n';
  for (std::size_t v = 0; v < d.duals.y.size(); ++v)
    if (d.duals.y[v] > tau) out << v << ' ' << detail::format_double(d.duals.y[v]) << '\n';
  for (const auto& s : d.duals.odd) {
    out << "odd " << detail::format_double(s.z) << ' ' << s.members.size();
    for (Vertex v : s.members) out << ' ' << v;
    out << '\n';
  }
}

inline DualExport read_duals(std::istream& in) {
  DualExport d;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = detail::trim(line);
    if (t.empty()) continue;
    auto tok = detail::split_ws(t);
    if (t.front() == '#') {
      if (tok.size() == 12 && tok[1] == "dual") {
        int cutoff = 0;
        if (!detail::parse_int(tok[3], d.n) || !detail::parse_double(tok[7], d.classes.eps) ||
            !detail::parse_double(tok[9], d.classes.weight_scale) ||
            !detail::parse_int(tok[11], cutoff))
          throw MalformedInput(lineno, "bad dual header");
        d.classes.mode = tok[5] == "weighted" ? MatchingMode::weighted : MatchingMode::cardinality;
        d.classes.cutoff = d.classes.mode == MatchingMode::weighted
                               ? cutoff
                               : std::numeric_limits<int>::max();
        d.duals.y.assign(d.n, 0.0);
        header = true;
      }
      continue;
    }
    if (!header) throw MalformedInput(lineno, "missing dual header");
    if (tok[0] == "odd") {
      OddSetDual s;
      std::size_t k = 0;
      if (tok.size() < 3 || !detail::parse_double(tok[1], s.z) || !detail::parse_int(tok[2], k) ||
          tok.size() != 3 + k)
        throw MalformedInput(lineno, "expected 'odd z k v1 .. vk'");
      for (std::size_t i = 0; i < k; ++i) {
        Vertex v = 0;
        if (!detail::parse_int(tok[3 + i], v) || v >= d.n)
          throw MalformedInput(lineno, "bad odd-set member");
        s.members.push_back(v);
      }
      std::sort(s.members.begin(), s.members.end());
      d.duals.odd.push_back(std::move(s));
      continue;
    }
    std::size_t v = 0;
    double y = 0;
    if (tok.size() != 2 || !detail::parse_int(tok[0], v) || !detail::parse_double(tok[1], y) ||
        v >= d.n || y < 0)
      throw MalformedInput(lineno, "expected 'v y'");
    d.duals.y[v] = y;
  }
  if (!header) throw MalformedInput(0, "missing dual header");
  return d;
}

struct Certificate {
  double primal = 0;
  double dual = 0;
  double gap = 0;
  double min_cover_ratio = std::numeric_limits<double>::infinity();  // min cover / coef
};

/// One dedicated pass: checks y_u + y_v (+ odd-set terms) >= (1 - eps) c_e on
/// every stream edge, then returns gap = (dual - primal) / dual.
inline Certificate duality_gap_certificate(EdgeStream& stream, const FractionalMatching& x,
                                           const DualExport& d, double eps) {
  if (d.duals.y.size() != stream.vertex_count())
    throw Error(ErrorKind::invalid_argument, "dual vector does not match the stream");
  Certificate c;
  auto cursor = stream.begin_pass();
  while (auto e = cursor.next()) {
    const double coef = d.classes.coefficient(*e);
    if (coef <= 0) continue;
    const double cover = dual_cover(d.duals, *e);
    c.min_cover_ratio = std::min(c.min_cover_ratio, cover / coef);
    if (cover < (1 - eps) * coef * (1 - 1e-12))
      throw Error(ErrorKind::certificate_invalid,
                  "dual infeasible at edge " + std::to_string(e->u) + " " + std::to_string(e->v) +
                      ": cover " + detail::format_double(cover) + " < " +
                      detail::format_double((1 - eps) * coef));
  }
  for (const auto& [e, val] : x) c.primal += d.classes.coefficient(e) * val;
  c.dual = dual_objective(d.duals);
  if (c.dual > 0) {
    c.gap = std::clamp((c.dual - c.primal) / c.dual, 0.0, 1.0);
  } else {
    c.gap = c.primal > 0 ? 1.0 : 0.0;
  }
  return c;
}

struct SolveResult {
  FractionalMatching x;
  DualExport duals;
  RunStats stats;
  Certificate certificate;
  std::size_t odd_sets_tracked = 0;
};

namespace detail {

/// Running sum of oracle matchings. Bipartite runs keep it a forest by
/// cancelling cycles as they close (loads and value are preserved).
class PrimalAccumulator {
 public:
  PrimalAccumulator(GraphClass cls, std::size_t n, MatchingMode mode, SpaceMeter& meter)
      : cls_(cls),
        n_(n),
        entry_bytes_((mode == MatchingMode::cardinality ? 2 : 3) * kRecordBytes),
        lease_(meter, "mwu_engine.primal") {
    if (cls == GraphClass::bipartite) forest_.emplace(n);
  }

  void add(const OracleResult& r, const WeightClasses& classes) {
    const auto& edges = r.candidate.edges;
    if (forest_) {
      forest_->reset_peak();
      for (std::size_t i = 0; i < edges.size(); ++i)
        forest_->add(edges[i], r.amount(i), classes.coefficient(edges[i]));
      lease_.resize(static_cast<long long>(forest_->peak_size()) * entry_bytes_);
      lease_.resize(static_cast<long long>(forest_->size()) * entry_bytes_);
      return;
    }
    for (std::size_t i = 0; i < edges.size(); ++i) {
      auto& slot = sums_[canonical(edges[i])];
      if (slot.first == 0) lease_.grow(entry_bytes_);
      slot.first += r.amount(i);
      slot.second = classes.coefficient(edges[i]);
      value_ += slot.second * r.amount(i);
    }
  }

  double value() const { return forest_ ? forest_->value() : value_; }
  std::size_t size() const { return forest_ ? forest_->size() : sums_.size(); }

  std::vector<SupportPair> pairs() const {
    std::vector<SupportPair> out;
    if (forest_) {
      forest_->for_each([&](const SupportEdge& s) { out.push_back({s.edge.u, s.edge.v, s.x}); });
    } else {
      for (const auto& [e, s] : sums_) out.push_back({e.u, e.v, s.first});
    }
    return out;
  }

  FractionalMatching normalized(double scale) const {
    FractionalMatching x(n_);
    if (!(scale > 0)) return x;
    if (forest_) {
      forest_->for_each([&](const SupportEdge& s) { x.add(s.edge, s.x / scale); });
    } else {
      for (const auto& [e, s] : sums_) x.add(e, s.first / scale);
    }
    return x;
  }

 private:
  GraphClass cls_;
  std::size_t n_;
  long long entry_bytes_;
  MeterLease lease_;
  std::optional<SupportForest> forest_;
  std::unordered_map<Edge, std::pair<double, double>, EdgeKeyHash> sums_;
  double value_ = 0;
};

inline std::string set_key(const std::vector<Vertex>& members) {
  std::string k;
  for (Vertex v : members) k += std::to_string(v) + ',';
  return k;
}

}  // namespace detail

/// Runs the solver. Pass layout: one preliminary pass (weighted mode only,
/// to find the largest weight), one oracle pass per iteration, and one
/// certificate pass.
inline SolveResult solve_fractional(EdgeStream& stream, const MatchingLP& lp,
                                    const MWUConfig& cfg, StreamOracle& oracle,
                                    SpaceMeter& meter) {
  using Clock = std::chrono::steady_clock;
  const auto started = Clock::now();
  const std::size_t passes_before = stream.passes_completed();
  RunStats stats;
  stats.budget_bytes = meter.budget();
  auto finish = [&] {
    stats.passes = stream.passes_completed() - passes_before;
    stats.peak_bytes = meter.peak();
    stats.wall_time = Clock::now() - started;
  };
  try {
    cfg.validate();
    if (stream.vertex_count() != lp.n)
      throw Error(ErrorKind::invalid_argument, "stream and LP disagree on n");
    if (lp.graph_class == GraphClass::bipartite && !stream.bipartite())
      throw Error(ErrorKind::invalid_argument, "bipartite LP needs a bipartite stream header");
    const std::size_t n = lp.n;
    const std::size_t tmax = cfg.iteration_cap(n);
    stats.tmax = tmax;
    const double eta = cfg.step();
    const double growth = std::log1p(eta / cfg.rho);

    WeightClasses classes = WeightClasses::cardinality();
    if (lp.mode == MatchingMode::weighted) {
      double max_w = 0;
      auto cursor = stream.begin_pass();
      while (auto e = cursor.next()) max_w = std::max(max_w, e->w);
      ++stats.preliminary_passes;
      classes = WeightClasses::weighted(lp.eps, max_w, n);
    }

    DualState duals = init_duals(n, &meter);
    std::vector<double> best_y;
    std::vector<OddSetDual> best_odd;
    MeterLease best_lease(meter, "mwu_engine.best_dual");
    double best_dual = std::numeric_limits<double>::infinity();
    detail::PrimalAccumulator acc(lp.graph_class, n, lp.mode, meter);
    std::unordered_set<std::string> tracked;

    const AdmissibilityRule rule{cfg.lambda(), lp.mode, 1 + lp.eps};
    double alpha_prev = 2.0;  // every cost is 2 and the best coefficient is 1
    double scale = 0;
    double gap = 1;
    double primal = 0;

    for (std::size_t t = 1; t <= tmax; ++t) {
      EdgePricer pricer(duals, classes);
      auto cursor = stream.begin_pass();
      OracleResult res = oracle.run(cursor, pricer, 1.0 / alpha_prev, rule, meter);
      if (!cursor.done())
        throw Error(ErrorKind::internal,
                    std::string(oracle.name()) + " returned before finishing its pass");
      ++stats.iterations;
      // Loads are read back from the weights, which needs 0/1 amounts.
      for (double a : res.amounts)
        if (a != 1.0)
          throw Error(ErrorKind::invalid_argument,
                      std::string(oracle.name()) + " returned a fractional candidate");

      IterationReport rep;
      rep.iteration = t;
      rep.candidate_size = res.candidate.size();
      for (std::size_t i = 0; i < res.candidate.edges.size(); ++i)
        rep.candidate_value += classes.coefficient(res.candidate.edges[i]) * res.amount(i);
      stats.best_iterate_value = std::max(stats.best_iterate_value, rep.candidate_value);

      if (!std::isfinite(res.min_ratio)) {
        // Nothing to match: the zero vectors are optimal.
        best_dual = 0;
        best_y.assign(n, 0.0);
        best_odd.clear();
        gap = 0;
        stats.converged = true;
        break;
      }
      const double alpha = res.min_ratio;
      rep.min_cost = alpha;
      if (duals.normalizer / alpha < best_dual) {
        best_dual = duals.normalizer / alpha;
        best_y.resize(n);
        for (std::size_t v = 0; v < n; ++v) best_y[v] = duals.weights[v] / alpha;
        best_odd.clear();
        long long bytes = static_cast<long long>(n) * kRecordBytes;
        for (const auto& s : duals.odd_sets) {
          best_odd.push_back({s.members, s.weight / (s.capacity() * alpha)});
          bytes += detail::odd_set_bytes(s);
        }
        best_lease.resize(bytes);
      }

      rep.log_potential_before = duals.log_potential();
      for (const auto& [v, load] : res.loads())
        rep.weighted_load += duals.probability(v) * load / cfg.rho;
      acc.add(res, classes);
      const double offset_before = duals.log_offset;
      mwu_step(duals, res, cfg, oracle.name());
      alpha_prev = alpha * std::exp(offset_before - duals.log_offset);
      res = OracleResult{};

      // Every vertex weight is (1 + eta/rho)^count, so the largest weight
      // gives the largest vertex load of the accumulated sum.
      const double max_w = *std::max_element(duals.weights.begin(), duals.weights.end());
      double max_load = std::round((std::log(max_w) + duals.log_offset) / growth);
      scale = max_load;

      if (lp.graph_class == GraphClass::general && acc.size() > 0) {
        auto pairs = acc.pairs();
        ConnectedSubsetScanner scanner(pairs);
        std::vector<OddSetWeight> fresh;
        scanner.for_each_odd(lp.odd_set_max, cfg.odd_set_cap,
                             [&](std::span<const Vertex> members, double inside) {
                               const double cap = static_cast<double>(members.size() - 1) / 2;
                               const double ratio = inside / cap;
                               scale = std::max(scale, ratio);
                               if (ratio > max_load * (1 + 1e-12)) {
                                 std::vector<Vertex> m(members.begin(), members.end());
                                 if (!tracked.count(detail::set_key(m)))
                                   fresh.push_back({std::move(m), ratio});
                               }
                             });
        for (auto& s : fresh) {
          tracked.insert(detail::set_key(s.members));
          // Start as if tracked from the first iteration.
          s.weight = std::exp(growth * s.weight - duals.log_offset);
          duals.lease.grow(detail::odd_set_bytes(s));
          duals.odd_sets.push_back(std::move(s));
        }
        if (!fresh.empty()) duals.normalizer = duals.recompute_normalizer();
      }

      primal = scale > 0 ? acc.value() / scale : 0;
      gap = best_dual > 0 ? std::max(0.0, 1 - primal / best_dual) : 0;
      rep.primal = primal;
      rep.best_dual = best_dual;
      rep.gap = gap;
      rep.max_load = max_load;
      rep.log_potential = duals.log_potential();
      rep.odd_sets = duals.odd_sets.size();
      rep.support = acc.size();
      bool keep_going = !cfg.observer || cfg.observer(rep);
      // Stop a hair inside eps so the recomputed certificate agrees.
      if (cfg.stop == StopRule::gap && gap <= cfg.eps * (1 - 1e-9)) {
        stats.converged = true;
        break;
      }
      if (!keep_going) break;
    }
    if (cfg.stop == StopRule::fixed) stats.converged = gap <= cfg.eps;

    SolveResult out;
    out.x = acc.normalized(scale);
    out.x.set_vertex_count(n);
    out.duals.n = n;
    out.duals.duals.y = best_y.empty() ? std::vector<double>(n, 0.0) : std::move(best_y);
    out.duals.duals.odd = std::move(best_odd);
    out.duals.classes = classes;
    out.odd_sets_tracked = duals.odd_sets.size();
    stats.fractional_value = objective_value(out.x, lp.mode);
    out.certificate = duality_gap_certificate(stream, out.x, out.duals, lp.eps);
    ++stats.certificate_passes;
    stats.certificate_gap = out.certificate.gap;
    finish();
    if (stats.passes != stats.iterations + stats.preliminary_passes + stats.certificate_passes)
      throw Error(ErrorKind::internal, "pass accounting mismatch");
    out.stats = stats;
    return out;
  } catch (const RunFailure&) {
    throw;
  } catch (const Error& e) {
    finish();
    throw RunFailure(e.kind(), e.what(), stats);
  }
}

/// Recomputes the certificate from serialized artifacts (one pass).
inline Certificate certify_from_artifacts(EdgeStream& stream, std::istream& fractional,
                                          std::istream& duals, double eps) {
  FractionalMatching x = read_fractional(fractional);
  DualExport d = read_duals(duals);
  return duality_gap_certificate(stream, x, d, eps);
}

}  // namespace ssmatch
