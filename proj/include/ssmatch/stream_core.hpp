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

// Semi-streaming access model: replayable edge streams read strictly
// sequentially, a logical space meter, and per-run measurement records.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ssmatch/detail/random.hpp"
#include "ssmatch/detail/text.hpp"
#include "ssmatch/error.hpp"

namespace ssmatch {

using Vertex = std::uint32_t;

struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  double w = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Same edge with u <= v.
inline Edge canonical(Edge e) {
  if (e.u > e.v) std::swap(e.u, e.v);
  return e;
}

/// Strict weak order on canonical (u, v, w).
inline bool canonical_less(const Edge& a, const Edge& b) {
  Edge x = canonical(a), y = canonical(b);
  if (x.u != y.u) return x.u < y.u;
  if (x.v != y.v) return x.v < y.v;
  return x.w < y.w;
}

/// A graph held fully in memory. Only loaders, generators and the exact
/// baselines use this directly; algorithms see an EdgeStream.
struct EdgeList {
  std::size_t n = 0;
  std::optional<std::size_t> left;  // size of the left side when bipartite
  std::vector<Edge> edges;
  bool weighted = false;

  bool bipartite() const { return left.has_value(); }
};

namespace detail {

struct StreamHeader {
  std::size_t n = 0;
  std::size_t m = 0;
  std::optional<std::size_t> left;
};

inline bool skippable(std::string_view line) {
  line = trim(line);
  return line.empty() || line.front() == '#';
}

inline StreamHeader parse_header(std::string_view line, std::size_t lineno) {
  auto tok = split_ws(trim(line));
  StreamHeader h;
  if (tok.size() < 3 || tok[0] != "p")
    throw MalformedInput(lineno, "expected header 'p n m [bipartite L]'");
  if (!parse_int(tok[1], h.n) || !parse_int(tok[2], h.m))
    throw MalformedInput(lineno, "header counts must be non-negative integers");
  if (h.n == 0) throw MalformedInput(lineno, "vertex count must be positive");
  if (tok.size() == 5 && tok[3] == "bipartite") {
    std::size_t left = 0;
    if (!parse_int(tok[4], left) || left > h.n)
      throw MalformedInput(lineno, "bipartite left size must be an integer <= n");
    h.left = left;
  } else if (tok.size() != 3) {
    throw MalformedInput(lineno, "unexpected tokens after header counts");
  }
  return h;
}

inline Edge parse_edge_record(std::string_view line, const StreamHeader& h,
                              std::size_t lineno, bool& has_weight) {
  auto tok = split_ws(trim(line));
  if (tok.size() != 2 && tok.size() != 3)
    throw MalformedInput(lineno, "expected 'u v' or 'u v w'");
  std::uint64_t u = 0, v = 0;
  if (!parse_int(tok[0], u) || !parse_int(tok[1], v))
    throw MalformedInput(lineno, "vertex ids must be non-negative integers");
  if (u >= h.n || v >= h.n)
    throw MalformedInput(lineno, "vertex id out of range (n = " +
                                     std::to_string(h.n) + ")");
  if (u == v) throw MalformedInput(lineno, "self-loop");
  Edge e{static_cast<Vertex>(u), static_cast<Vertex>(v), 1.0};
  has_weight = tok.size() == 3;
  if (has_weight) {
    if (!parse_double(tok[2], e.w)) throw MalformedInput(lineno, "bad weight");
    if (e.w < 0) throw MalformedInput(lineno, "negative weight");
  }
  if (h.left && ((u < *h.left) == (v < *h.left)))
    throw MalformedInput(lineno, "edge does not cross the bipartition");
  return e;
}

/// Reads one edge-list document, calling `on_edge` per record.
template <class OnEdge>
StreamHeader scan_edge_list(std::istream& in, OnEdge&& on_edge,
                            bool* weighted = nullptr) {
  std::string line;
  std::size_t lineno = 0;
  std::optional<StreamHeader> header;
  std::size_t header_line = 0;
  std::size_t count = 0;
  bool any_weight = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    if (!header) {
      header = parse_header(line, lineno);
      header_line = lineno;
      continue;
    }
    bool has_weight = false;
    Edge e = parse_edge_record(line, *header, lineno, has_weight);
    any_weight = any_weight || has_weight;
    ++count;
    on_edge(e);
  }
  if (in.bad()) throw Error(ErrorKind::io_failure, "read error");
  if (!header) throw MalformedInput(lineno, "missing header line");
  if (count != header->m)
    throw MalformedInput(header_line, "header declares m = " +
                                          std::to_string(header->m) + " but " +
                                          std::to_string(count) +
                                          " edges follow");
  if (weighted) *weighted = any_weight;
  return *header;
}

}  // namespace detail

inline EdgeList read_edge_list(std::istream& in) {
  EdgeList g;
  auto h = detail::scan_edge_list(in, [&](const Edge& e) { g.edges.push_back(e); },
                                  &g.weighted);
  g.n = h.n;
  g.left = h.left;
  return g;
}

inline EdgeList read_edge_list_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_failure, "cannot open " + path.string());
  return read_edge_list(in);
}

inline void write_edge_list(std::ostream& out, const EdgeList& g) {
  out << "p " << g.n << ' ' << g.edges.size();
  if (g.left) out << " bipartite " << *g.left;
  out << '\n';
  for (const Edge& e : g.edges) {
    out << e.u << ' ' << e.v;
    if (g.weighted) out << ' ' << detail::format_double(e.w);
    out << '\n';
  }
}

/// Arrangement of the stream. Seeded permutations model a random order;
/// the named orders are fixed pathological arrangements.
struct StreamOrder {
  enum class Kind { identity, seeded, sorted_by_endpoint, bipartite_block, interleaved };

  Kind kind = Kind::identity;
  std::uint64_t seed = 0;

  static StreamOrder identity() { return {}; }
  static StreamOrder seeded(std::uint64_t s) { return {Kind::seeded, s}; }
  static StreamOrder sorted_by_endpoint() { return {Kind::sorted_by_endpoint, 0}; }
  static StreamOrder bipartite_block() { return {Kind::bipartite_block, 0}; }
  static StreamOrder interleaved() { return {Kind::interleaved, 0}; }

  /// "identity", "sorted", "block", "interleaved" or a decimal seed.
  static StreamOrder parse(std::string_view text) {
    text = detail::trim(text);
    if (text == "identity" || text.empty()) return identity();
    if (text == "sorted") return sorted_by_endpoint();
    if (text == "block") return bipartite_block();
    if (text == "interleaved") return interleaved();
    std::uint64_t s = 0;
    if (!detail::parse_int(text, s))
      throw Error(ErrorKind::invalid_argument,
                  "unknown stream order '" + std::string(text) + "'");
    return seeded(s);
  }

  std::string label() const {
    switch (kind) {
      case Kind::identity: return "identity";
      case Kind::seeded: return std::to_string(seed);
      case Kind::sorted_by_endpoint: return "sorted";
      case Kind::bipartite_block: return "block";
      case Kind::interleaved: return "interleaved";
    }
    return "identity";
  }

  friend bool operator==(const StreamOrder&, const StreamOrder&) = default;
};

inline void apply_order(std::vector<Edge>& edges, const StreamOrder& order,
                        std::optional<std::size_t> left) {
  using K = StreamOrder::Kind;
  switch (order.kind) {
    case K::identity:
      return;
    case K::seeded: {
      detail::Rng rng(order.seed);
      rng.shuffle(std::span<Edge>(edges));
      return;
    }
    case K::sorted_by_endpoint:
      std::stable_sort(edges.begin(), edges.end(), canonical_less);
      return;
    case K::bipartite_block: {
      // Left vertices in decreasing id, each followed by its whole block.
      auto side_key = [&](const Edge& e) {
        Edge c = canonical(e);
        Vertex l = left ? (e.u < *left ? e.u : e.v) : c.u;
        Vertex r = left ? (e.u < *left ? e.v : e.u) : c.v;
        return std::pair<Vertex, Vertex>(l, r);
      };
      std::stable_sort(edges.begin(), edges.end(), [&](const Edge& a, const Edge& b) {
        auto ka = side_key(a), kb = side_key(b);
        if (ka.first != kb.first) return ka.first > kb.first;
        return ka.second < kb.second;
      });
      return;
    }
    case K::interleaved: {
      std::stable_sort(edges.begin(), edges.end(), canonical_less);
      std::vector<Edge> out;
      out.reserve(edges.size());
      std::size_t lo = 0, hi = edges.size();
      while (lo < hi) {
        out.push_back(edges[lo++]);
        if (lo < hi) out.push_back(edges[--hi]);
      }
      edges = std::move(out);
      return;
    }
  }
}

/// Size of one logical space record (a dual entry, a vertex pair).
inline constexpr long long kRecordBytes = 8;

/// Logical space accounting. Every algorithm-side allocation that scales
/// with the input is charged here; exceeding the budget is an error.
class SpaceMeter {
 public:
  explicit SpaceMeter(long long budget_bytes) : budget_(budget_bytes) {
    if (budget_bytes < 0)
      throw Error(ErrorKind::invalid_argument, "negative space budget");
  }

  /// 64 * n * ceil(eps^-3) records, scaled by `constant / 64`.
  static long long default_budget(std::size_t n, double eps, double constant = 64) {
    const double inv = std::ceil(1.0 / (eps * eps * eps) - 1e-9);
    return static_cast<long long>(constant * static_cast<double>(n) * inv) *
           kRecordBytes;
  }

  void charge(long long delta_bytes, std::string_view module) {
    const long long next = current_ + delta_bytes;
    if (next > budget_) throw BudgetExceeded(std::string(module), next, budget_);
    if (next < 0)
      throw Error(ErrorKind::internal,
                  std::string(module) + " released more space than it charged");
    current_ = next;
    peak_ = std::max(peak_, current_);
  }

  long long budget() const { return budget_; }
  long long current() const { return current_; }
  long long peak() const { return peak_; }
  double peak_records() const {
    return static_cast<double>(peak_) / static_cast<double>(kRecordBytes);
  }

 private:
  long long budget_;
  long long current_ = 0;
  long long peak_ = 0;
};

/// RAII share of a meter. Resizing charges or frees the difference.
class MeterLease {
 public:
  MeterLease() = default;
  MeterLease(SpaceMeter& meter, std::string module, long long bytes = 0)
      : meter_(&meter), module_(std::move(module)) {
    resize(bytes);
  }
  MeterLease(const MeterLease&) = delete;
  MeterLease& operator=(const MeterLease&) = delete;
  MeterLease(MeterLease&& other) noexcept { *this = std::move(other); }
  MeterLease& operator=(MeterLease&& other) noexcept {
    if (this != &other) {
      release();
      meter_ = std::exchange(other.meter_, nullptr);
      module_ = std::move(other.module_);
      bytes_ = std::exchange(other.bytes_, 0);
    }
    return *this;
  }
  ~MeterLease() { release(); }

  void resize(long long bytes) {
    if (!meter_ || bytes == bytes_) return;
    meter_->charge(bytes - bytes_, module_);
    bytes_ = bytes;
  }
  void grow(long long delta) { resize(bytes_ + delta); }
  long long bytes() const { return bytes_; }

 private:
  void release() noexcept {
    if (meter_ && bytes_ > 0) {
      try {
        meter_->charge(-bytes_, module_);
      } catch (...) {
      }
    }
    bytes_ = 0;
  }

  SpaceMeter* meter_ = nullptr;
  std::string module_;
  long long bytes_ = 0;
};

/// Measurements of one streaming run.
struct RunStats {
  std::size_t passes = 0;
  std::size_t iterations = 0;
  std::size_t preliminary_passes = 0;
  std::size_t certificate_passes = 0;
  std::size_t tmax = 0;
  long long peak_bytes = 0;
  long long budget_bytes = 0;
  std::chrono::duration<double, std::milli> wall_time{0};
  double certificate_gap = 1.0;
  bool converged = false;
  double fractional_value = 0;
  double best_iterate_value = 0;
};

/// Replayable, strictly sequential edge source. Passes are started with
/// begin_pass(); the cursor is the only way to read edges.
///
/// Identity-ordered file streams re-read the file on every pass. Any other
/// arrangement is materialized once at open time as the stream's tape; the
/// tape models the external medium and is not charged to any meter.
class EdgeStream {
 public:
  class Cursor {
   public:
    Cursor(Cursor&&) noexcept = default;
    Cursor& operator=(Cursor&&) noexcept = default;
    Cursor(const Cursor&) = delete;
    Cursor& operator=(const Cursor&) = delete;

    /// Next edge, or nullopt at end of pass (counted once per pass).
    std::optional<Edge> next() {
      if (done_) return std::nullopt;
      std::optional<Edge> e = file_ ? next_from_file() : next_from_tape();
      if (!e) {
        done_ = true;
        ++stream_->passes_;
      } else {
        ++yielded_;
      }
      return e;
    }

    std::size_t yielded() const { return yielded_; }
    bool done() const { return done_; }

   private:
    friend class EdgeStream;
    explicit Cursor(EdgeStream* s) : stream_(s) {}

    std::optional<Edge> next_from_tape() {
      const auto& tape = *stream_->tape_;
      if (index_ >= tape.size()) return std::nullopt;
      return tape[index_++];
    }

    std::optional<Edge> next_from_file() {
      std::string line;
      while (std::getline(*file_, line)) {
        ++lineno_;
        if (detail::skippable(line)) continue;
        if (!seen_header_) {
          seen_header_ = true;
          continue;
        }
        bool has_weight = false;
        try {
          return detail::parse_edge_record(line, stream_->header_, lineno_, has_weight);
        } catch (const MalformedInput& e) {
          throw Error(ErrorKind::io_failure,
                      "stream source changed between passes: " +
                          std::string(e.what()));
        }
      }
      if (file_->bad())
        throw Error(ErrorKind::io_failure,
                    "read error in " + stream_->path_.string() + " at line " +
                        std::to_string(lineno_));
      if (yielded_ != stream_->header_.m)
        throw Error(ErrorKind::io_failure,
                    "stream source changed between passes: edge count differs");
      return std::nullopt;
    }

    EdgeStream* stream_;
    std::size_t index_ = 0;
    std::size_t yielded_ = 0;
    std::unique_ptr<std::ifstream> file_;
    std::size_t lineno_ = 0;
    bool seen_header_ = false;
    bool done_ = false;
  };

  /// Validates the whole file up front; malformed records are rejected
  /// with their line number.
  static EdgeStream open(const std::filesystem::path& path,
                         StreamOrder order = StreamOrder::identity()) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io_failure, "cannot open " + path.string());
    EdgeStream s;
    s.order_ = order;
    if (order.kind == StreamOrder::Kind::identity) {
      s.header_ = detail::scan_edge_list(in, [](const Edge&) {}, &s.weighted_);
      s.path_ = path;
      return s;
    }
    EdgeList g = read_edge_list(in);
    return from_edges(std::move(g), order);
  }

  static EdgeStream from_edges(EdgeList g, StreamOrder order = StreamOrder::identity()) {
    if (g.n == 0) throw Error(ErrorKind::invalid_argument, "vertex count must be positive");
    detail::StreamHeader h{g.n, g.edges.size(), g.left};
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
      const Edge& e = g.edges[i];
      if (e.u >= g.n || e.v >= g.n)
        throw MalformedInput(i + 1, "vertex id out of range");
      if (e.u == e.v) throw MalformedInput(i + 1, "self-loop");
      if (!(e.w >= 0) || !std::isfinite(e.w))
        throw MalformedInput(i + 1, "negative weight");
      if (g.left && ((e.u < *g.left) == (e.v < *g.left)))
        throw MalformedInput(i + 1, "edge does not cross the bipartition");
    }
    apply_order(g.edges, order, g.left);
    EdgeStream s;
    s.header_ = h;
    s.order_ = order;
    s.weighted_ = g.weighted;
    s.tape_ = std::make_shared<const std::vector<Edge>>(std::move(g.edges));
    return s;
  }

  /// Same source re-arranged; the tape is shared, the pass counter is not.
  EdgeStream reordered(StreamOrder order) const {
    if (tape_ && order == order_) {
      EdgeStream s = *this;
      s.passes_ = 0;
      return s;
    }
    if (!tape_ && order.kind == StreamOrder::Kind::identity) {
      EdgeStream s = *this;
      s.passes_ = 0;
      return s;
    }
    if (!tape_) return open(path_, order);
    EdgeList g{header_.n, header_.left, *tape_, weighted_};
    return from_edges(std::move(g), order);
  }

  Cursor begin_pass() {
    Cursor c(this);
    if (!tape_) {
      c.file_ = std::make_unique<std::ifstream>(path_);
      if (!*c.file_)
        throw Error(ErrorKind::io_failure, "cannot reopen " + path_.string());
    }
    return c;
  }

  std::size_t vertex_count() const { return header_.n; }
  std::size_t edge_count() const { return header_.m; }
  std::optional<std::size_t> left_size() const { return header_.left; }
  bool bipartite() const { return header_.left.has_value(); }
  bool weighted() const { return weighted_; }
  const StreamOrder& order() const { return order_; }
  bool file_backed() const { return !tape_; }

  /// Completed passes over this stream object.
  std::size_t passes_completed() const { return passes_; }

 private:
  EdgeStream() = default;

  detail::StreamHeader header_;
  StreamOrder order_;
  bool weighted_ = false;
  std::filesystem::path path_;
  std::shared_ptr<const std::vector<Edge>> tape_;
  std::size_t passes_ = 0;
};

/// Convenience: reads one full pass into memory. For tests and offline
/// tools only; algorithms never call this.
inline std::vector<Edge> collect_pass(EdgeStream& stream) {
  std::vector<Edge> out;
  auto cursor = stream.begin_pass();
  while (auto e = cursor.next()) out.push_back(*e);
  return out;
}

}  // namespace ssmatch
