/*
 * Copyright 2026 The lpdisc Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Simple undirected graphs with dense node ids, edge-list I/O, synthetic
// generators and the universal pair set.

#include <algorithm>
#include <charconv>
#include <compare>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "lpdisc/error.hpp"
#include "lpdisc/random.hpp"

namespace lpdisc {

using NodeId = std::uint32_t;
using NodeLabel = std::int64_t;

// Unordered node pair stored canonically (u < v).
struct NodePair {
  NodeId u = 0;
  NodeId v = 0;

  static constexpr NodePair of(NodeId a, NodeId b) noexcept {
    return a < b ? NodePair{a, b} : NodePair{b, a};
  }

  friend constexpr auto operator<=>(const NodePair&, const NodePair&) = default;
};

// Packs a canonical pair into one integer; usable as a hash key.
constexpr std::uint64_t pair_key(NodePair p) noexcept {
  return (static_cast<std::uint64_t>(p.u) << 32) | p.v;
}

struct PairKeyHash {
  std::size_t operator()(NodePair p) const noexcept {
    return static_cast<std::size_t>(mix64(pair_key(p)));
  }
};

enum class PairRole { kCandidates, kPositives, kNegatives };

struct PairSet {
  std::vector<NodePair> pairs;
  PairRole role = PairRole::kCandidates;

  std::size_t size() const noexcept { return pairs.size(); }
  bool empty() const noexcept { return pairs.empty(); }
};

// Immutable simple undirected graph. Node ids are 0..N-1; each id keeps the
// label it had in the source it was read from.
class Graph {
 public:
  Graph() = default;

  // Builds from arbitrary pairs: self-loops are rejected, duplicates and
  // reversed duplicates collapse. Labels default to the ids themselves.
  Graph(std::size_t node_count, std::span<const NodePair> edges,
        std::vector<NodeLabel> labels = {})
      : node_count_(node_count), labels_(std::move(labels)) {
    if (labels_.empty()) {
      labels_.resize(node_count_);
      for (std::size_t i = 0; i < node_count_; ++i) labels_[i] = static_cast<NodeLabel>(i);
    }
    if (labels_.size() != node_count_) throw ArgumentError("label map size differs from node count");
    label_index_.reserve(node_count_);
    for (std::size_t i = 0; i < node_count_; ++i) label_index_.emplace_back(labels_[i], static_cast<NodeId>(i));
    std::sort(label_index_.begin(), label_index_.end());
    for (std::size_t i = 1; i < label_index_.size(); ++i)
      if (label_index_[i].first == label_index_[i - 1].first)
        throw ArgumentError("duplicate node label " + std::to_string(label_index_[i].first));
    edges_.reserve(edges.size());
    for (const auto& e : edges) {
      if (e.u == e.v) throw ArgumentError("self-loop on node " + std::to_string(e.u));
      if (e.u >= node_count_ || e.v >= node_count_)
        throw ArgumentError("edge endpoint out of range: (" + std::to_string(e.u) + "," +
                            std::to_string(e.v) + ")");
      edges_.push_back(NodePair::of(e.u, e.v));
    }
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

    offsets_.assign(node_count_ + 1, 0);
    for (const auto& e : edges_) {
      ++offsets_[e.u + 1];
      ++offsets_[e.v + 1];
    }
    for (std::size_t i = 0; i < node_count_; ++i) offsets_[i + 1] += offsets_[i];
    adjacency_.resize(offsets_.back());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& e : edges_) {
      adjacency_[fill[e.u]++] = e.v;
      adjacency_[fill[e.v]++] = e.u;
    }
    for (std::size_t i = 0; i < node_count_; ++i)
      std::sort(adjacency_.begin() + offsets_[i], adjacency_.begin() + offsets_[i + 1]);
  }

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  // Canonical pairs in lexicographic order.
  std::span<const NodePair> edges() const noexcept { return edges_; }

  std::span<const NodeId> neighbors(NodeId x) const noexcept {
    return {adjacency_.data() + offsets_[x], adjacency_.data() + offsets_[x + 1]};
  }

  std::size_t degree(NodeId x) const noexcept { return offsets_[x + 1] - offsets_[x]; }

  bool has_edge(NodeId a, NodeId b) const noexcept {
    if (a == b || a >= node_count_ || b >= node_count_) return false;
    if (degree(a) > degree(b)) std::swap(a, b);
    const auto nb = neighbors(a);
    return std::binary_search(nb.begin(), nb.end(), b);
  }

  bool contains(NodePair p) const noexcept { return p.u < node_count_ && p.v < node_count_; }

  NodeLabel label(NodeId x) const { return labels_.at(x); }
  std::span<const NodeLabel> labels() const noexcept { return labels_; }

  std::optional<NodeId> id_of(NodeLabel label) const {
    auto it = std::lower_bound(label_index_.begin(), label_index_.end(),
                               std::pair<NodeLabel, NodeId>{label, 0});
    if (it == label_index_.end() || it->first != label) return std::nullopt;
    return it->second;
  }

  // Same node set, subset of edges. Used for training graphs.
  Graph with_edges(std::span<const NodePair> edges) const {
    return Graph(node_count_, edges, labels_);
  }

  std::size_t max_edges() const noexcept { return node_count_ * (node_count_ - (node_count_ > 0)) / 2; }

 private:
  std::size_t node_count_ = 0;
  std::vector<NodePair> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> adjacency_;
  std::vector<NodeLabel> labels_;
  std::vector<std::pair<NodeLabel, NodeId>> label_index_;
};

struct EdgeListOptions {
  // With an "N <count>" header, labels are base..base+N-1 where base is 1 here.
  bool one_based = false;
  // With a header, undeclared-degree nodes are isolates; refuse them if false.
  bool allow_isolates = true;
  // Keep only the largest connected component after reading.
  bool largest_component = false;
};

Graph largest_component(const Graph& g);

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    if (i >= s.size()) break;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename Int>
Int parse_int(std::string_view token, std::size_t line) {
  Int value{};
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end)
    throw ParseError("expected integer, got '" + std::string(token) + "'", line);
  return value;
}

}  // namespace detail

// Reads whitespace-separated integer pairs, one per line. '#' starts a comment
// line; blank lines are skipped. An optional first data line "N <count>"
// declares the node count (and so permits isolates).
inline Graph load_edge_list(std::istream& in, const EdgeListOptions& options = {}) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> declared;
  bool seen_data = false;
  std::vector<std::pair<NodeLabel, NodeLabel>> raw;
  std::vector<std::size_t> raw_lines;

  while (std::getline(in, line)) {
    ++line_no;
    const auto body = detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto tokens = detail::split_ws(body);
    if (!seen_data && tokens.size() == 2 && (tokens[0] == "N" || tokens[0] == "n")) {
      const auto n = detail::parse_int<std::int64_t>(tokens[1], line_no);
      if (n <= 0) throw ParseError("node count must be positive", line_no);
      declared = static_cast<std::size_t>(n);
      seen_data = true;
      continue;
    }
    seen_data = true;
    if (tokens.size() != 2)
      throw ParseError("expected two integer tokens, got " + std::to_string(tokens.size()), line_no);
    const auto a = detail::parse_int<NodeLabel>(tokens[0], line_no);
    const auto b = detail::parse_int<NodeLabel>(tokens[1], line_no);
    if (a == b) throw ParseError("self-loop on node " + std::to_string(a), line_no);
    raw.emplace_back(a, b);
    raw_lines.push_back(line_no);
  }

  std::vector<NodePair> edges;
  edges.reserve(raw.size());
  std::vector<NodeLabel> labels;

  if (declared) {
    const NodeLabel base = options.one_based ? 1 : 0;
    const auto n = static_cast<NodeLabel>(*declared);
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const auto [a, b] = raw[i];
      for (NodeLabel x : {a, b})
        if (x < base || x >= base + n)
          throw ParseError("node label " + std::to_string(x) + " outside declared range", raw_lines[i]);
      edges.push_back(NodePair::of(static_cast<NodeId>(a - base), static_cast<NodeId>(b - base)));
    }
    labels.resize(*declared);
    for (std::size_t i = 0; i < *declared; ++i) labels[i] = static_cast<NodeLabel>(i) + base;
  } else {
    std::vector<NodeLabel> seen;
    seen.reserve(raw.size() * 2);
    for (const auto& [a, b] : raw) {
      seen.push_back(a);
      seen.push_back(b);
    }
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    auto id = [&](NodeLabel x) {
      return static_cast<NodeId>(std::lower_bound(seen.begin(), seen.end(), x) - seen.begin());
    };
    for (const auto& [a, b] : raw) edges.push_back(NodePair::of(id(a), id(b)));
    labels = std::move(seen);
  }

  const std::size_t n = labels.size();
  if (n == 0) throw ParseError("edge list has no nodes");
  Graph g(n, edges, std::move(labels));
  if (declared && !options.allow_isolates) {
    for (NodeId x = 0; x < g.node_count(); ++x)
      if (g.degree(x) == 0)
        throw ParseError("node " + std::to_string(g.label(x)) + " is isolated");
  }
  return options.largest_component ? largest_component(g) : g;
}

inline Graph load_edge_list_file(const std::string& path, const EdgeListOptions& options = {}) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open edge list '" + path + "'");
  return load_edge_list(in, options);
}

// Writes labels, not ids. The "N <count>" header is emitted when labels are
// exactly 0..N-1, which is the only case a zero-based reader maps back
// unchanged; otherwise isolates are not representable and are dropped.
inline void write_edge_list(std::ostream& out, const Graph& g) {
  bool identity = true;
  for (NodeId x = 0; x < g.node_count(); ++x) identity = identity && g.label(x) == static_cast<NodeLabel>(x);
  if (identity) out << "N " << g.node_count() << '\n';
  for (const auto& e : g.edges()) out << g.label(e.u) << ' ' << g.label(e.v) << '\n';
}

inline std::size_t pair_count(std::size_t n) noexcept { return n * (n - (n > 0)) / 2; }

// Lexicographic rank of (u,v), u<v, among all pairs of n nodes, and back.
inline std::size_t pair_index(NodePair p, std::size_t n) noexcept {
  const std::size_t u = p.u;
  return u * (2 * n - u - 1) / 2 + (p.v - u - 1);
}

inline NodePair pair_from_index(std::size_t index, std::size_t n) {
  std::size_t u = 0;
  std::size_t row = n - 1;
  while (index >= row) {
    index -= row;
    ++u;
    --row;
  }
  return {static_cast<NodeId>(u), static_cast<NodeId>(u + 1 + index)};
}

// Uniform G(N, M): M distinct edges drawn without replacement (Floyd's
// sampling over pair indices).
inline Graph generate_er(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (n == 0) throw ArgumentError("generate_er: N must be positive");
  const std::size_t total = pair_count(n);
  if (m > total)
    throw ArgumentError("generate_er: M=" + std::to_string(m) + " exceeds N(N-1)/2=" + std::to_string(total));
  Rng rng(seed);
  std::unordered_set<std::size_t> chosen;
  chosen.reserve(m * 2);
  std::vector<std::size_t> order;
  order.reserve(m);
  for (std::size_t j = total - m; j < total; ++j) {
    const auto t = static_cast<std::size_t>(uniform_index(rng, j + 1));
    const std::size_t pick = chosen.insert(t).second ? t : j;
    if (pick == j) chosen.insert(j);
    order.push_back(pick);
  }
  std::vector<NodePair> edges;
  edges.reserve(m);
  // Decode in increasing index order so pair_from_index walks rows once.
  std::sort(order.begin(), order.end());
  std::size_t u = 0, row_start = 0, row_len = n - 1;
  for (std::size_t idx : order) {
    while (idx >= row_start + row_len) {
      row_start += row_len;
      ++u;
      --row_len;
    }
    edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(u + 1 + (idx - row_start))});
  }
  return Graph(n, edges);
}

// Preferential attachment: a clique on m+1 seed nodes, then each new node
// links to m distinct existing nodes drawn from the repeated-endpoint list.
inline Graph generate_ba(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (m < 1) throw ArgumentError("generate_ba: m must be at least 1");
  if (n <= m)
    throw ArgumentError("generate_ba: N=" + std::to_string(n) + " must exceed m=" + std::to_string(m));
  Rng rng(seed);
  std::vector<NodePair> edges;
  std::vector<NodeId> endpoints;
  for (NodeId a = 0; a <= m; ++a)
    for (NodeId b = a + 1; b <= m; ++b) {
      edges.push_back({a, b});
      endpoints.push_back(a);
      endpoints.push_back(b);
    }
  std::vector<NodeId> targets;
  for (auto x = static_cast<NodeId>(m + 1); x < n; ++x) {
    targets.clear();
    while (targets.size() < m) {
      const NodeId t = endpoints[uniform_index(rng, endpoints.size())];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    for (NodeId t : targets) {
      edges.push_back(NodePair::of(t, x));
      endpoints.push_back(t);
      endpoints.push_back(x);
    }
  }
  return Graph(n, edges);
}

// U - E in lexicographic order.
inline PairSet non_edges(const Graph& g) {
  PairSet out;
  out.role = PairRole::kNegatives;
  const std::size_t n = g.node_count();
  out.pairs.reserve(pair_count(n) - g.edge_count());
  for (NodeId u = 0; u < n; ++u) {
    const auto nb = g.neighbors(u);
    auto it = std::upper_bound(nb.begin(), nb.end(), u);
    for (NodeId v = u + 1; v < n; ++v) {
      if (it != nb.end() && *it == v) {
        ++it;
        continue;
      }
      out.pairs.push_back({u, v});
    }
  }
  return out;
}

inline Graph largest_component(const Graph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::int64_t> comp(n, -1);
  std::vector<NodeId> best;
  for (NodeId s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    std::vector<NodeId> members{s};
    comp[s] = s;
    for (std::size_t i = 0; i < members.size(); ++i)
      for (NodeId y : g.neighbors(members[i]))
        if (comp[y] < 0) {
          comp[y] = s;
          members.push_back(y);
        }
    if (members.size() > best.size()) best = std::move(members);
  }
  std::sort(best.begin(), best.end());
  std::vector<std::int64_t> remap(n, -1);
  std::vector<NodeLabel> labels;
  labels.reserve(best.size());
  for (std::size_t i = 0; i < best.size(); ++i) {
    remap[best[i]] = static_cast<std::int64_t>(i);
    labels.push_back(g.label(best[i]));
  }
  std::vector<NodePair> edges;
  for (const auto& e : g.edges())
    if (remap[e.u] >= 0)
      edges.push_back({static_cast<NodeId>(remap[e.u]), static_cast<NodeId>(remap[e.v])});
  return Graph(best.size(), edges, std::move(labels));
}

}  // namespace lpdisc
