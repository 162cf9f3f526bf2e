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

// End-to-end harness: solve -> round -> verify -> compare against an exact
// baseline, one CSV row per run.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "ssmatch/detail/text.hpp"
#include "ssmatch/error.hpp"
#include "ssmatch/exact_baselines.hpp"
#include "ssmatch/generators.hpp"
#include "ssmatch/lp_model.hpp"
#include "ssmatch/mwu_engine.hpp"
#include "ssmatch/rounding.hpp"
#include "ssmatch/stream_core.hpp"
#include "ssmatch/stream_oracles.hpp"

namespace ssmatch {

inline MatchingMode parse_mode(std::string_view s) {
  if (s == "card" || s == "cardinality") return MatchingMode::cardinality;
  if (s == "weighted") return MatchingMode::weighted;
  throw Error(ErrorKind::invalid_argument, "mode must be card or weighted");
}

inline GraphClass parse_class(std::string_view s) {
  if (s == "bipartite") return GraphClass::bipartite;
  if (s == "general") return GraphClass::general;
  throw Error(ErrorKind::invalid_argument, "class must be bipartite or general");
}

inline StopRule parse_stop(std::string_view s) {
  if (s == "gap") return StopRule::gap;
  if (s == "fixed") return StopRule::fixed;
  throw Error(ErrorKind::invalid_argument, "stop must be fixed or gap");
}

/// "greedy" (cardinality), "weighted" (class-rounded weights) and
/// "general" (odd-set surcharges) all run the same greedy admissibility
/// pass; the name only has to agree with the LP it is used for.
inline std::unique_ptr<StreamOracle> make_oracle(std::string_view name, const MatchingLP& lp) {
  if (name.empty()) {
    name = lp.mode == MatchingMode::weighted ? "weighted"
           : lp.graph_class == GraphClass::general ? "general"
                                                    : "greedy";
  }
  if (name == "weighted" && lp.mode != MatchingMode::weighted)
    throw Error(ErrorKind::invalid_argument, "the weighted oracle needs --mode weighted");
  if (name == "general" && lp.graph_class != GraphClass::general)
    throw Error(ErrorKind::invalid_argument, "the general oracle needs --class general");
  if (name != "greedy" && name != "weighted" && name != "general")
    throw Error(ErrorKind::invalid_argument, "unknown oracle '" + std::string(name) + "'");
  return std::make_unique<GreedyOracle>(std::string(name));
}

/// One extra pass: true iff every edge of M occurs in the stream. M must be
/// vertex-disjoint; that is checked in memory before the pass.
inline bool verify_matching_stream(EdgeStream& stream, const Matching& m) {
  if (auto v = m.shared_vertex())
    throw Error(ErrorKind::verification_failed,
                "matching is not vertex-disjoint at vertex " + std::to_string(*v));
  std::unordered_set<std::uint64_t> wanted;
  auto key = [](Edge e) {
    e = canonical(e);
    return (static_cast<std::uint64_t>(e.u) << 32) | e.v;
  };
  for (const auto& e : m.edges) {
    if (e.u >= stream.vertex_count() || e.v >= stream.vertex_count()) return false;
    wanted.insert(key(e));
  }
  std::size_t found = 0;
  auto cursor = stream.begin_pass();
  while (auto e = cursor.next())
    if (wanted.count(key(*e))) {
      wanted.erase(key(*e));
      ++found;
    }
  return found == m.edges.size();
}

struct PipelineOptions {
  double eps = 0.1;
  MatchingMode mode = MatchingMode::cardinality;
  GraphClass graph_class = GraphClass::bipartite;
  std::string oracle;  // empty: picked from mode and class
  StopRule stop = StopRule::gap;
  double tmax_scale = 4;
  long long budget_bytes = 0;  // 0: default budget
  bool baseline = true;
};

struct PipelineResult {
  SolveResult solve;
  RoundingReport rounding;
  bool verified = false;
  std::optional<double> baseline;
  double matching_value = 0;
  std::size_t passes = 0;  // solver passes plus the verification pass
  long long peak_bytes = 0;
  double wall_ms = 0;
};

/// Exact optimum for the bench baseline column, when affordable.
inline std::optional<double> exact_optimum(const EdgeList& g, MatchingMode mode, GraphClass cls) {
  if (cls == GraphClass::bipartite) {
    if (mode == MatchingMode::cardinality) return static_cast<double>(hopcroft_karp(g.n, g.edges).size());
    if (g.n <= 4000) return max_weight_bipartite(g.n, g.edges).weight();
    return std::nullopt;
  }
  if (g.n <= 20 || g.edges.size() <= 24) return brute_force_max_matching(g.n, g.edges, mode).value(mode);
  if (two_coloring(g.n, g.edges)) {
    if (mode == MatchingMode::cardinality) return static_cast<double>(hopcroft_karp(g.n, g.edges).size());
    if (g.n <= 4000) return max_weight_bipartite(g.n, g.edges).weight();
  }
  return std::nullopt;
}

/// solve -> round -> verify on one stream. The baseline (if requested) is
/// computed from `graph`, which the streaming stages never see.
inline PipelineResult run_pipeline(EdgeStream& stream, const PipelineOptions& opt,
                                   const EdgeList* graph = nullptr) {
  const auto started = std::chrono::steady_clock::now();
  std::optional<std::size_t> left;
  if (opt.graph_class == GraphClass::bipartite) left = stream.left_size();
  MatchingLP lp = build_matching_lp(stream.vertex_count(), opt.graph_class, left, opt.mode, opt.eps);
  SpaceMeter meter(opt.budget_bytes > 0 ? opt.budget_bytes
                                         : SpaceMeter::default_budget(lp.n, opt.eps));
  auto oracle = make_oracle(opt.oracle, lp);
  MWUConfig cfg = MWUConfig::defaults(opt.eps);
  cfg.stop = opt.stop;
  cfg.tmax_scale = opt.tmax_scale;

  PipelineResult out;
  const std::size_t passes_before = stream.passes_completed();
  out.solve = solve_fractional(stream, lp, cfg, *oracle, meter);
  const double tau = default_support_threshold(opt.eps, lp.n);
  out.rounding = opt.graph_class == GraphClass::bipartite
                     ? round_bipartite(out.solve.x, opt.mode, tau, &meter)
                     : round_general(out.solve.x, lp, tau, &meter);
  out.matching_value = out.rounding.matching.value(opt.mode);
  out.verified = verify_matching_stream(stream, out.rounding.matching);
  out.passes = stream.passes_completed() - passes_before;
  out.peak_bytes = meter.peak();
  if (opt.baseline && graph) out.baseline = exact_optimum(*graph, opt.mode, opt.graph_class);
  out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
                    .count();
  return out;
}

// --- configuration -------------------------------------------------------

/// One "run" stanza. List-valued keys multiply out into separate runs.
struct BenchRun {
  std::string instance;                  // generator spec or edge-list path
  std::vector<std::uint64_t> seeds;      // generator seeds (overrides @seed)
  std::vector<double> epsilons{0.1};
  std::vector<std::optional<std::uint64_t>> order_seeds{std::nullopt};
  std::vector<std::string> oracles{""};
  PipelineOptions options;
};

namespace detail {

inline std::vector<std::string_view> split_list(std::string_view v) {
  std::vector<std::string_view> out;
  while (true) {
    auto comma = v.find(',');
    auto tok = trim(v.substr(0, comma));
    if (!tok.empty()) out.push_back(tok);
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

/// "1..5" or "1,2,7".
inline std::vector<std::uint64_t> parse_seed_list(std::string_view v, std::size_t lineno) {
  std::vector<std::uint64_t> out;
  for (auto tok : split_list(v)) {
    auto dots = tok.find("..");
    std::uint64_t a = 0, b = 0;
    if (dots == std::string_view::npos) {
      if (!parse_int(tok, a)) throw MalformedInput(lineno, "bad seed '" + std::string(tok) + "'");
      out.push_back(a);
      continue;
    }
    if (!parse_int(tok.substr(0, dots), a) || !parse_int(tok.substr(dots + 2), b) || b < a ||
        b - a > 100000)
      throw MalformedInput(lineno, "bad seed range '" + std::string(tok) + "'");
    for (std::uint64_t s = a; s <= b; ++s) out.push_back(s);
  }
  return out;
}

}  // namespace detail

/// Flat key = value text; a line "run" starts a stanza, '#' starts a comment.
inline std::vector<BenchRun> parse_bench_config(std::istream& in) {
  std::vector<BenchRun> runs;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line == "run" || line == "[run]") {
      runs.emplace_back();
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw MalformedInput(lineno, "expected key = value");
    if (runs.empty()) throw MalformedInput(lineno, "key outside of a run stanza");
    auto key = detail::trim(line.substr(0, eq));
    auto value = detail::trim(line.substr(eq + 1));
    BenchRun& r = runs.back();
    try {
      if (key == "instance") {
        r.instance = std::string(value);
      } else if (key == "seeds") {
        r.seeds = detail::parse_seed_list(value, lineno);
      } else if (key == "epsilon") {
        r.epsilons.clear();
        for (auto tok : detail::split_list(value)) {
          double e = 0;
          if (!detail::parse_double(tok, e)) throw MalformedInput(lineno, "bad epsilon");
          r.epsilons.push_back(e);
        }
      } else if (key == "order_seed" || key == "order_seeds") {
        // "none" keeps the source order.
        r.order_seeds.clear();
        for (auto tok : detail::split_list(value)) {
          if (tok == "none") {
            r.order_seeds.push_back(std::nullopt);
            continue;
          }
          for (auto s : detail::parse_seed_list(tok, lineno)) r.order_seeds.push_back(s);
        }
        if (r.order_seeds.empty()) throw MalformedInput(lineno, "empty order_seed list");
      } else if (key == "oracle") {
        r.oracles.clear();
        for (auto tok : detail::split_list(value)) r.oracles.emplace_back(tok);
      } else if (key == "mode") {
        r.options.mode = parse_mode(value);
      } else if (key == "class") {
        r.options.graph_class = parse_class(value);
      } else if (key == "stop") {
        r.options.stop = parse_stop(value);
      } else if (key == "tmax_scale") {
        if (!detail::parse_double(value, r.options.tmax_scale)) throw MalformedInput(lineno, "bad tmax_scale");
      } else if (key == "budget_bytes") {
        if (!detail::parse_int(value, r.options.budget_bytes)) throw MalformedInput(lineno, "bad budget_bytes");
      } else if (key == "baseline") {
        r.options.baseline = value == "yes" || value == "true" || value == "1";
      } else {
        throw MalformedInput(lineno, "unknown key '" + std::string(key) + "'");
      }
    } catch (const MalformedInput&) {
      throw;
    } catch (const Error& e) {
      throw MalformedInput(lineno, e.what());
    }
  }
  for (const auto& r : runs)
    if (r.instance.empty()) throw MalformedInput(lineno, "run stanza without an instance");
  return runs;
}

// --- report --------------------------------------------------------------

struct BenchRow {
  std::string instance;
  double epsilon = 0;
  std::optional<std::uint64_t> order_seed;
  double lp_value_fractional = 0;
  double matching_size = 0;  // objective units: weight in weighted mode
  std::optional<double> baseline_opt;
  std::optional<double> ratio;
  std::size_t passes = 0;
  std::size_t iterations = 0;
  long long peak_bytes = 0;
  double gap = 1;
  double wall_ms = 0;
  std::string error;
};

inline constexpr std::string_view kBenchHeader =
    "instance,epsilon,order_seed,lp_value_fractional,matching_size,baseline_opt,ratio,passes,"
    "iterations,peak_bytes,gap,wall_ms,error";

namespace detail {

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

/// Splits one CSV line (quoted fields allowed, no embedded newlines).
inline std::vector<std::string> csv_split(std::string_view line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

}  // namespace detail

inline void write_bench_row(std::ostream& out, const BenchRow& r) {
  auto opt = [](const std::optional<double>& v) { return v ? detail::format_double(*v) : std::string(); };
  out << detail::csv_field(r.instance) << ',' << detail::format_double(r.epsilon) << ','
      << (r.order_seed ? std::to_string(*r.order_seed) : std::string()) << ','
      << detail::format_double(r.lp_value_fractional) << ',' << detail::format_double(r.matching_size)
      << ',' << opt(r.baseline_opt) << ',' << opt(r.ratio) << ',' << r.passes << ','
      << r.iterations << ',' << r.peak_bytes << ',' << detail::format_double(r.gap) << ','
      << detail::format_double(r.wall_ms) << ',' << detail::csv_field(r.error) << '\n';
}

inline BenchRow bench_one(const std::string& instance, double eps,
                          std::optional<std::uint64_t> order_seed, const PipelineOptions& base) {
  BenchRow row;
  row.instance = instance;
  row.epsilon = eps;
  row.order_seed = order_seed;
  try {
    PipelineOptions opt = base;
    opt.eps = eps;
    std::optional<EdgeList> graph;
    EdgeStream stream = [&] {
      StreamOrder order = order_seed ? StreamOrder::seeded(*order_seed) : StreamOrder::identity();
      if (looks_like_graph_spec(instance)) {
        graph = generate_graph(instance);
        return EdgeStream::from_edges(*graph, order);
      }
      if (opt.baseline) graph = read_edge_list_file(instance);
      return EdgeStream::open(instance, order);
    }();
    PipelineResult res = run_pipeline(stream, opt, graph ? &*graph : nullptr);
    row.lp_value_fractional = res.solve.certificate.primal;
    row.matching_size = res.matching_value;
    row.baseline_opt = res.baseline;
    if (res.baseline) row.ratio = *res.baseline > 0 ? res.matching_value / *res.baseline : 1.0;
    row.passes = res.passes;
    row.iterations = res.solve.stats.iterations;
    row.peak_bytes = res.peak_bytes;
    row.gap = res.solve.stats.certificate_gap;
    row.wall_ms = res.wall_ms;
    if (!res.verified) row.error = "verification_failed: matching edge missing from stream";
  } catch (const RunFailure& e) {
    row.passes = e.stats().passes;
    row.iterations = e.stats().iterations;
    row.peak_bytes = e.stats().peak_bytes;
    row.error = std::string(to_string(e.kind())) + ": " + e.what();
  } catch (const Error& e) {
    row.error = std::string(to_string(e.kind())) + ": " + e.what();
  }
  return row;
}

/// Runs every expanded stanza in order; failures become rows with the
/// error column set and the harness moves on.
inline std::vector<BenchRow> run_benchmark(const std::vector<BenchRun>& runs,
                                           std::ostream* csv = nullptr) {
  std::vector<BenchRow> rows;
  if (csv) *csv << kBenchHeader << '\n';
  for (const auto& run : runs) {
    std::vector<std::string> instances;
    if (run.seeds.empty() || !looks_like_graph_spec(run.instance)) {
      instances.push_back(run.instance);
    } else {
      GraphSpec spec = parse_graph_spec(run.instance);
      for (auto s : run.seeds) {
        spec.seed = s;
        instances.push_back(spec.label());
      }
    }
    for (const auto& inst : instances)
      for (double eps : run.epsilons)
        for (const auto& oracle : run.oracles)
          for (const auto& order : run.order_seeds) {
            PipelineOptions opt = run.options;
            opt.oracle = oracle;
            rows.push_back(bench_one(inst, eps, order, opt));
            if (csv) {
              write_bench_row(*csv, rows.back());
              csv->flush();
            }
          }
  }
  return rows;
}

inline std::vector<BenchRow> run_benchmark(std::istream& config, std::ostream* csv = nullptr) {
  return run_benchmark(parse_bench_config(config), csv);
}

inline std::vector<BenchRow> read_bench_csv(std::istream& in) {
  std::vector<BenchRow> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (lineno == 1) {
      if (line != kBenchHeader) throw MalformedInput(lineno, "unexpected CSV header");
      continue;
    }
    auto f = detail::csv_split(line);
    if (f.size() != 13) throw MalformedInput(lineno, "expected 13 CSV fields");
    BenchRow r;
    auto num = [&](const std::string& s, double& out) {
      if (!detail::parse_double(s, out)) throw MalformedInput(lineno, "bad number '" + s + "'");
    };
    auto opt_num = [&](const std::string& s) -> std::optional<double> {
      if (s.empty()) return std::nullopt;
      double v = 0;
      num(s, v);
      return v;
    };
    r.instance = f[0];
    num(f[1], r.epsilon);
    if (!f[2].empty()) {
      std::uint64_t s = 0;
      if (!detail::parse_int(f[2], s)) throw MalformedInput(lineno, "bad order seed");
      r.order_seed = s;
    }
    num(f[3], r.lp_value_fractional);
    num(f[4], r.matching_size);
    r.baseline_opt = opt_num(f[5]);
    r.ratio = opt_num(f[6]);
    if (!detail::parse_int(f[7], r.passes) || !detail::parse_int(f[8], r.iterations) ||
        !detail::parse_int(f[9], r.peak_bytes))
      throw MalformedInput(lineno, "bad integer column");
    num(f[10], r.gap);
    num(f[11], r.wall_ms);
    r.error = f[12];
    rows.push_back(std::move(r));
  }
  return rows;
}

/// Per-instance summary table of a bench CSV.
inline void write_report(std::ostream& out, const std::vector<BenchRow>& rows) {
  struct Group {
    std::string instance;
    double eps = 0;
    std::size_t runs = 0, failed = 0, max_passes = 0;
    double min_ratio = std::numeric_limits<double>::infinity();
    double max_gap = 0;
    long long max_peak = 0;
  };
  std::vector<Group> groups;
  for (const auto& r : rows) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) {
      return g.instance == r.instance && g.eps == r.epsilon;
    });
    if (it == groups.end()) {
      groups.push_back({r.instance, r.epsilon});
      it = std::prev(groups.end());
    }
    ++it->runs;
    if (!r.error.empty()) {
      ++it->failed;
      continue;
    }
    if (r.ratio) it->min_ratio = std::min(it->min_ratio, *r.ratio);
    it->max_passes = std::max(it->max_passes, r.passes);
    it->max_gap = std::max(it->max_gap, r.gap);
    it->max_peak = std::max(it->max_peak, r.peak_bytes);
  }
  std::size_t width = 8;
  for (const auto& g : groups) width = std::max(width, g.instance.size());
  auto pad = [](std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
  };
  out << pad("instance", width) << "  eps    runs  failed  min_ratio  max_gap   max_passes  max_peak_bytes\n";
  for (const auto& g : groups) {
    out << pad(g.instance, width) << "  " << pad(detail::format_double(g.eps), 5) << "  "
        << pad(std::to_string(g.runs), 4) << "  " << pad(std::to_string(g.failed), 6) << "  "
        << pad(std::isfinite(g.min_ratio) ? detail::format_double(g.min_ratio).substr(0, 8) : "-", 9)
        << "  " << pad(detail::format_double(g.max_gap).substr(0, 8), 8) << "  "
        << pad(std::to_string(g.max_passes), 10) << "  " << g.max_peak << '\n';
  }
}

}  // namespace ssmatch
