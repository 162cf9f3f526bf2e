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

// Seeded graph generators and the "model(args)[@seed]" source syntax.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ssmatch/detail/random.hpp"
#include "ssmatch/detail/text.hpp"
#include "ssmatch/error.hpp"
#include "ssmatch/stream_core.hpp"

namespace ssmatch {

struct GraphSpec {
  std::string model;
  std::vector<double> params;
  bool weighted = false;
  std::uint64_t seed = 1;

  std::string label() const {
    std::string s = model + "(";
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (i) s += ',';
      s += detail::format_double(params[i]);
    }
    if (weighted) s += params.empty() ? "weighted" : ",weighted";
    return s + ")@" + std::to_string(seed);
  }
};

namespace detail {

inline std::size_t count_param(const GraphSpec& s, std::size_t i, std::size_t lo) {
  double v = s.params[i];
  if (!(v >= static_cast<double>(lo)) || v != static_cast<double>(static_cast<std::size_t>(v)) ||
      v > 1e8)
    throw Error(ErrorKind::invalid_argument,
                s.model + ": parameter " + std::to_string(i + 1) + " must be an integer >= " +
                    std::to_string(lo));
  return static_cast<std::size_t>(v);
}

inline double prob_param(const GraphSpec& s, std::size_t i) {
  double p = s.params[i];
  if (!(p >= 0 && p <= 1))
    throw Error(ErrorKind::invalid_argument, s.model + ": p must lie in [0, 1]");
  return p;
}

inline void expect_arity(const GraphSpec& s, std::size_t k) {
  if (s.params.size() != k)
    throw Error(ErrorKind::invalid_argument,
                s.model + " takes " + std::to_string(k) + " parameter(s)");
}

}  // namespace detail

/// Parses "random-bipartite(100,50,0.1)", "path(5,weighted)@3", ...
inline GraphSpec parse_graph_spec(std::string_view text) {
  GraphSpec s;
  auto t = detail::trim(text);
  if (t.starts_with("gen:")) t.remove_prefix(4);
  if (auto at = t.rfind('@'); at != std::string_view::npos) {
    if (!detail::parse_int(t.substr(at + 1), s.seed))
      throw Error(ErrorKind::invalid_argument, "bad generator seed in '" + std::string(text) + "'");
    t = t.substr(0, at);
  }
  auto open = t.find('(');
  if (open == std::string_view::npos || t.back() != ')')
    throw Error(ErrorKind::invalid_argument, "expected model(args), got '" + std::string(text) + "'");
  s.model = std::string(detail::trim(t.substr(0, open)));
  auto args = t.substr(open + 1, t.size() - open - 2);
  while (!args.empty()) {
    auto comma = args.find(',');
    auto tok = detail::trim(args.substr(0, comma));
    if (tok == "weighted") {
      s.weighted = true;
    } else {
      double v = 0;
      if (!detail::parse_double(tok, v))
        throw Error(ErrorKind::invalid_argument, "bad generator parameter '" + std::string(tok) + "'");
      s.params.push_back(v);
    }
    if (comma == std::string_view::npos) break;
    args.remove_prefix(comma + 1);
  }
  return s;
}

inline bool looks_like_graph_spec(std::string_view text) {
  if (text.starts_with("gen:")) return true;
  return text.find('(') != std::string_view::npos && text.find(')') != std::string_view::npos &&
         !std::filesystem::exists(std::filesystem::path(text));
}

/// Deterministic for a fixed spec (model, params, weighted flag, seed).
/// Weighted variants draw integer weights uniformly from 1..100.
inline EdgeList generate_graph(const GraphSpec& s) {
  detail::Rng rng(s.seed);
  EdgeList g;
  auto push = [&](Vertex u, Vertex v) { g.edges.push_back({u, v, 1.0}); };
  if (s.model == "random-bipartite") {
    detail::expect_arity(s, 3);
    g.n = detail::count_param(s, 0, 2);
    std::size_t left = detail::count_param(s, 1, 1);
    if (left >= g.n) throw Error(ErrorKind::invalid_argument, "random-bipartite: need 1 <= L < n");
    const double p = detail::prob_param(s, 2);
    g.left = left;
    for (std::size_t u = 0; u < left; ++u)
      for (std::size_t v = left; v < g.n; ++v)
        if (rng.bernoulli(p)) push(static_cast<Vertex>(u), static_cast<Vertex>(v));
  } else if (s.model == "random-general") {
    detail::expect_arity(s, 2);
    g.n = detail::count_param(s, 0, 1);
    const double p = detail::prob_param(s, 1);
    for (std::size_t u = 0; u < g.n; ++u)
      for (std::size_t v = u + 1; v < g.n; ++v)
        if (rng.bernoulli(p)) push(static_cast<Vertex>(u), static_cast<Vertex>(v));
  } else if (s.model == "complete-bipartite") {
    detail::expect_arity(s, 2);
    std::size_t a = detail::count_param(s, 0, 1), b = detail::count_param(s, 1, 1);
    g.n = a + b;
    g.left = a;
    for (std::size_t u = 0; u < a; ++u)
      for (std::size_t v = a; v < g.n; ++v) push(static_cast<Vertex>(u), static_cast<Vertex>(v));
  } else if (s.model == "path") {
    detail::expect_arity(s, 1);
    g.n = detail::count_param(s, 0, 1);
    for (std::size_t v = 0; v + 1 < g.n; ++v) push(static_cast<Vertex>(v), static_cast<Vertex>(v + 1));
  } else if (s.model == "cycle") {
    detail::expect_arity(s, 1);
    g.n = detail::count_param(s, 0, 3);
    for (std::size_t v = 0; v < g.n; ++v)
      push(static_cast<Vertex>(v), static_cast<Vertex>((v + 1) % g.n));
  } else if (s.model == "hard-layered") {
    // Half graph: left i sees right j >= i, listed from the far end, so a
    // one-pass greedy in stream order matches only about half of it.
    detail::expect_arity(s, 1);
    std::size_t k = detail::count_param(s, 0, 1);
    g.n = 2 * k;
    g.left = k;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = k; j-- > i;)
        push(static_cast<Vertex>(i), static_cast<Vertex>(k + j));
  } else {
    throw Error(ErrorKind::invalid_argument, "unknown graph model '" + s.model + "'");
  }
  if (s.weighted) {
    g.weighted = true;
    for (auto& e : g.edges) e.w = static_cast<double>(1 + rng.below(100));
  }
  return g;
}

inline EdgeList generate_graph(std::string_view spec) { return generate_graph(parse_graph_spec(spec)); }

/// Opens a file path or a generator spec. `order_seed` selects a seeded
/// permutation; without it the source order is kept.
inline EdgeStream open_edge_stream(std::string_view source,
                                   std::optional<std::uint64_t> order_seed = std::nullopt) {
  StreamOrder order = order_seed ? StreamOrder::seeded(*order_seed) : StreamOrder::identity();
  if (looks_like_graph_spec(source)) return EdgeStream::from_edges(generate_graph(source), order);
  return EdgeStream::open(std::filesystem::path(source), order);
}

}  // namespace ssmatch
