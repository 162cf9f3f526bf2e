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

// Enumeration of connected vertex subsets of a small in-memory support
// graph, used for odd-set separation in general graphs.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ssmatch/error.hpp"
#include "ssmatch/stream_core.hpp"

namespace ssmatch {

/// Enumeration hit its candidate cap; `partial` holds what was found.
class OddSetExplosion : public Error {
 public:
  OddSetExplosion(std::size_t cap, std::vector<std::vector<Vertex>> partial)
      : Error(ErrorKind::too_large,
              "odd-set enumeration exceeded " + std::to_string(cap) + " candidates"),
        partial_(std::move(partial)) {}

  const std::vector<std::vector<Vertex>>& partial() const { return partial_; }

 private:
  std::vector<std::vector<Vertex>> partial_;
};

struct SupportPair {
  Vertex u;
  Vertex v;
  double value;
};

/// Connected-subset enumerator (ESU). Every connected vertex subset of
/// size <= k is produced exactly once; parallel pairs are merged.
class ConnectedSubsetScanner {
 public:
  explicit ConnectedSubsetScanner(std::span<const SupportPair> pairs) {
    std::unordered_map<Vertex, std::size_t> local;
    auto id = [&](Vertex v) {
      auto [it, fresh] = local.try_emplace(v, global_.size());
      if (fresh) global_.push_back(v);
      return it->second;
    };
    std::vector<Vertex> touched;
    for (const auto& p : pairs) {
      if (p.u == p.v) continue;
      touched.push_back(p.u);
      touched.push_back(p.v);
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (Vertex v : touched) id(v);
    adj_.assign(global_.size(), {});
    for (const auto& p : pairs) {
      if (p.u == p.v) continue;
      std::size_t a = local.at(p.u), b = local.at(p.v);
      add_value(a, b, p.value);
      add_value(b, a, p.value);
    }
  }

  std::size_t vertex_count() const { return global_.size(); }

  /// Calls `visit(members, inside_value)` for each connected subset with
  /// odd size in [3, k]; inside_value sums pair values inside the subset.
  /// Throws OddSetExplosion (with empty partial list) after `cap` subsets.
  template <class Visit>
  void for_each_odd(std::size_t k, std::size_t cap, Visit&& visit) {
    const std::size_t nv = global_.size();
    in_sub_.assign(nv, 0);
    near_.assign(nv, 0);
    visited_ = 0;
    cap_ = cap;
    for (std::size_t root = 0; root < nv; ++root) {
      std::vector<std::size_t> ext;
      for (auto [u, val] : adj_[root])
        if (u > root) ext.push_back(u);
      push(root);
      inside_ = 0;
      extend(ext, root, k, visit);
      pop(root);
    }
  }

 private:
  void add_value(std::size_t a, std::size_t b, double value) {
    for (auto& [u, val] : adj_[a])
      if (u == b) {
        val += value;
        return;
      }
    adj_[a].emplace_back(b, value);
  }

  void push(std::size_t w) {
    sub_.push_back(w);
    in_sub_[w] = 1;
    for (auto [u, val] : adj_[w]) ++near_[u];
  }

  void pop(std::size_t w) {
    for (auto [u, val] : adj_[w]) --near_[u];
    in_sub_[w] = 0;
    sub_.pop_back();
  }

  template <class Visit>
  void extend(std::vector<std::size_t> ext, std::size_t root, std::size_t k,
              Visit& visit) {
    if (++visited_ > cap_) throw OddSetExplosion(cap_, {});
    if (sub_.size() >= 3 && sub_.size() % 2 == 1) {
      members_.clear();
      for (std::size_t s : sub_) members_.push_back(global_[s]);
      std::sort(members_.begin(), members_.end());
      visit(std::span<const Vertex>(members_), inside_);
    }
    if (sub_.size() >= k) return;
    while (!ext.empty()) {
      std::size_t w = ext.back();
      ext.pop_back();
      std::vector<std::size_t> next = ext;
      for (auto [u, val] : adj_[w])
        if (u > root && !in_sub_[u] && near_[u] == 0) next.push_back(u);
      double gained = 0;
      for (auto [u, val] : adj_[w])
        if (in_sub_[u]) gained += val;
      push(w);
      inside_ += gained;
      extend(std::move(next), root, k, visit);
      inside_ -= gained;
      pop(w);
    }
  }

  std::vector<Vertex> global_;
  std::vector<std::vector<std::pair<std::size_t, double>>> adj_;
  std::vector<std::size_t> sub_;
  std::vector<char> in_sub_;
  std::vector<int> near_;
  std::vector<Vertex> members_;
  double inside_ = 0;
  std::size_t visited_ = 0;
  std::size_t cap_ = 0;
};

}  // namespace ssmatch
