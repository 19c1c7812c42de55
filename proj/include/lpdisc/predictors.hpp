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

// Similarity-based link predictors and external score ingestion.
//
// Every predictor scores a list of node pairs against a (training) graph and
// returns a ScoreTable whose pairs are canonical (u < v), so a score is a
// property of the unordered pair.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "lpdisc/error.hpp"
#include "lpdisc/graph.hpp"
#include "lpdisc/random.hpp"

namespace lpdisc {

enum class AlgorithmKind {
  kCN,
  kRA,
  kJA,
  kPA,
  kKatz,
  kMFI,
  kSimRank,
  kCH2L2,
  kCNL3,
  kRAL3,
  kCH2L3,
  kLRW,
  kSRW,
  kRandom,
  kExternal,
};

inline constexpr std::pair<AlgorithmKind, std::string_view> kAlgorithmNames[] = {
    {AlgorithmKind::kCN, "CN"},         {AlgorithmKind::kRA, "RA"},
    {AlgorithmKind::kJA, "JA"},         {AlgorithmKind::kPA, "PA"},
    {AlgorithmKind::kKatz, "Katz"},     {AlgorithmKind::kMFI, "MFI"},
    {AlgorithmKind::kSimRank, "SimRank"}, {AlgorithmKind::kCH2L2, "CH2-L2"},
    {AlgorithmKind::kCNL3, "CN-L3"},    {AlgorithmKind::kRAL3, "RA-L3"},
    {AlgorithmKind::kCH2L3, "CH2-L3"},  {AlgorithmKind::kLRW, "LRW"},
    {AlgorithmKind::kSRW, "SRW"},       {AlgorithmKind::kRandom, "Random"},
    {AlgorithmKind::kExternal, "External"},
};

inline std::string_view to_string(AlgorithmKind kind) {
  for (const auto& [k, name] : kAlgorithmNames)
    if (k == kind) return name;
  return "?";
}

inline AlgorithmKind parse_algorithm_kind(std::string_view name) {
  auto upper = [](std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
  };
  const auto key = upper(name);
  for (const auto& [k, n] : kAlgorithmNames)
    if (upper(n) == key) return k;
  if (key == "KA" || key == "KATZ") return AlgorithmKind::kKatz;
  if (key == "SR") return AlgorithmKind::kSimRank;
  throw ArgumentError("unknown algorithm '" + std::string(name) + "'");
}

struct AlgorithmSpec {
  AlgorithmKind kind = AlgorithmKind::kCN;
  // Katz attenuation; unset means min(0.01, 0.5 / lambda_max).
  std::optional<double> katz_beta;
  double simrank_decay = 0.8;
  int simrank_iterations = 20;
  double simrank_tolerance = 1e-4;
  // RA-L3 path weight 1/sqrt(k1 k2) instead of 1/(k1 k2).
  bool ra_l3_sqrt = false;
  int walk_steps = 3;
  // Largest node count the dense matrix kernels accept.
  std::size_t dense_node_cap = 5000;
  // External score file. "{trial}" and "{q_index}" are substituted per cell.
  std::string external_path;

  std::string name() const { return std::string(to_string(kind)); }

  bool dense() const {
    return kind == AlgorithmKind::kKatz || kind == AlgorithmKind::kMFI || kind == AlgorithmKind::kSimRank;
  }

  void validate() const {
    if (katz_beta && !(*katz_beta > 0.0)) throw ArgumentError("Katz beta must be positive");
    if (!(simrank_decay > 0.0 && simrank_decay < 1.0)) throw ArgumentError("SimRank C must lie in (0,1)");
    if (simrank_iterations < 1) throw ArgumentError("SimRank iteration count must be at least 1");
    if (!(simrank_tolerance > 0.0)) throw ArgumentError("SimRank tolerance must be positive");
    if (walk_steps < 1) throw ArgumentError("walk horizon t must be at least 1");
    if (kind == AlgorithmKind::kExternal && external_path.empty())
      throw ArgumentError("External algorithm needs a score file path");
  }
};

struct ScoreTable {
  std::string algorithm;
  // Effective parameters, in insertion order, for the results manifest.
  std::vector<std::pair<std::string, std::string>> parameters;
  std::vector<NodePair> pairs;
  std::vector<double> scores;
  // False when an iterative kernel stopped before reaching its tolerance.
  bool converged = true;
  std::string status;

  std::size_t size() const noexcept { return pairs.size(); }

  // Lookup by unordered pair; pairs must be sorted (as produced here).
  std::optional<double> score(NodeId a, NodeId b) const {
    const auto p = NodePair::of(a, b);
    auto it = std::lower_bound(pairs.begin(), pairs.end(), p);
    if (it == pairs.end() || *it != p) return std::nullopt;
    return scores[static_cast<std::size_t>(it - pairs.begin())];
  }
};

namespace detail {

inline std::string format_real(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

// Canonicalizes, validates and sorts; tables are always in canonical order.
inline std::vector<NodePair> canonical_pairs(const Graph& g, std::span<const NodePair> pairs) {
  std::vector<NodePair> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (p.u == p.v) throw ArgumentError("pair (" + std::to_string(p.u) + "," + std::to_string(p.v) + ") is a self-pair");
    if (p.u >= g.node_count() || p.v >= g.node_count())
      throw ArgumentError("pair (" + std::to_string(p.u) + "," + std::to_string(p.v) + ") names an unknown node");
    out.push_back(NodePair::of(p.u, p.v));
  }
  std::sort(out.begin(), out.end());
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i] == out[i - 1])
      throw ArgumentError("duplicate pair (" + std::to_string(out[i].u) + "," + std::to_string(out[i].v) + ")");
  return out;
}

// Calls f(first, last) for each run of pairs sharing the same u.
template <typename F>
void for_each_source(const std::vector<NodePair>& pairs, F&& f) {
  std::size_t i = 0;
  while (i < pairs.size()) {
    std::size_t j = i;
    while (j < pairs.size() && pairs[j].u == pairs[i].u) ++j;
    f(i, j);
    i = j;
  }
}

inline ScoreTable make_table(std::string name, std::vector<NodePair> pairs) {
  ScoreTable t;
  t.algorithm = std::move(name);
  t.pairs = std::move(pairs);
  t.scores.assign(t.pairs.size(), 0.0);
  return t;
}

inline void require_dense(const Graph& g, const AlgorithmSpec& spec) {
  if (g.node_count() > spec.dense_node_cap)
    throw ArgumentError(spec.name() + ": graph has " + std::to_string(g.node_count()) +
                        " nodes, above the dense-kernel cap of " + std::to_string(spec.dense_node_cap));
}

inline Eigen::MatrixXd adjacency_matrix(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : g.edges()) {
    a(e.u, e.v) = 1.0;
    a(e.v, e.u) = 1.0;
  }
  return a;
}

inline void read_symmetric(const Eigen::MatrixXd& s, ScoreTable& t) {
  for (std::size_t i = 0; i < t.pairs.size(); ++i) {
    const auto [u, v] = t.pairs[i];
    t.scores[i] = 0.5 * (s(u, v) + s(v, u));
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Local indices

inline ScoreTable score_local(const Graph& g, AlgorithmKind kind, std::span<const NodePair> pairs) {
  if (kind != AlgorithmKind::kCN && kind != AlgorithmKind::kRA && kind != AlgorithmKind::kJA &&
      kind != AlgorithmKind::kPA)
    throw ArgumentError("score_local: " + std::string(to_string(kind)) + " is not a local index");
  auto t = detail::make_table(std::string(to_string(kind)), detail::canonical_pairs(g, pairs));
  for (std::size_t i = 0; i < t.pairs.size(); ++i) {
    const auto [u, v] = t.pairs[i];
    const double ku = static_cast<double>(g.degree(u));
    const double kv = static_cast<double>(g.degree(v));
    if (kind == AlgorithmKind::kPA) {
      t.scores[i] = ku * kv;
      continue;
    }
    const auto a = g.neighbors(u);
    const auto b = g.neighbors(v);
    std::size_t common = 0;
    double ra = 0.0;
    for (auto x = a.begin(), y = b.begin(); x != a.end() && y != b.end();) {
      if (*x < *y) {
        ++x;
      } else if (*y < *x) {
        ++y;
      } else {
        ++common;
        ra += 1.0 / static_cast<double>(g.degree(*x));
        ++x;
        ++y;
      }
    }
    switch (kind) {
      case AlgorithmKind::kCN:
        t.scores[i] = static_cast<double>(common);
        break;
      case AlgorithmKind::kRA:
        t.scores[i] = ra;
        break;
      default: {
        const double uni = ku + kv - static_cast<double>(common);
        t.scores[i] = uni > 0.0 ? static_cast<double>(common) / uni : 0.0;
      }
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Global indices

// Spectral radius by power iteration on the all-ones start vector. The norm
// ratio |Ax|/|x| is used rather than the Rayleigh quotient, which stalls
// below lambda_max on bipartite graphs (eigenvalues -lambda and lambda).
inline double estimate_spectral_radius(const Graph& g, int iterations = 100) {
  const std::size_t n = g.node_count();
  if (g.edge_count() == 0) return 0.0;
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n))), y(n);
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    double norm = 0.0;
    for (NodeId i = 0; i < n; ++i) {
      double s = 0.0;
      for (NodeId j : g.neighbors(i)) s += x[j];
      y[i] = s;
      norm += s * s;
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) return 0.0;
    lambda = norm;
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / norm;
  }
  return lambda;
}

inline double default_katz_beta(double lambda_max) {
  return lambda_max > 0.0 ? std::min(0.01, 0.5 / lambda_max) : 0.01;
}

// S = (I - beta A)^{-1} - I.
inline Eigen::MatrixXd katz_matrix(const Graph& g, double beta) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) - beta * detail::adjacency_matrix(g);
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw DivergenceError("Katz: I - beta*A is not positive definite for beta=" + detail::format_real(beta) +
                          "; beta must be below 1/lambda_max");
  Eigen::MatrixXd s = llt.solve(Eigen::MatrixXd::Identity(n, n));
  s.diagonal().array() -= 1.0;
  return s;
}

// (I + L)^{-1}, L = D - A.
inline Eigen::MatrixXd matrix_forest(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::MatrixXd m = -detail::adjacency_matrix(g);
  for (Eigen::Index i = 0; i < n; ++i) m(i, i) = 1.0 + static_cast<double>(g.degree(static_cast<NodeId>(i)));
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  return llt.solve(Eigen::MatrixXd::Identity(n, n));
}

struct SimRankResult {
  Eigen::MatrixXd similarity;
  int iterations = 0;
  double last_change = 0.0;
  bool converged = false;
};

// Fixed point of s(a,b) = C/(k_a k_b) sum_{i in N(a)} sum_{j in N(b)} s(i,j),
// s(a,a) = 1, iterated from the identity.
inline SimRankResult simrank(const Graph& g, double decay, int max_iterations, double tolerance) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::MatrixXd w = detail::adjacency_matrix(g);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto k = g.degree(static_cast<NodeId>(j));
    if (k > 0) w.col(j) /= static_cast<double>(k);
  }
  SimRankResult r;
  r.similarity = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd next(n, n);
  for (int it = 1; it <= max_iterations; ++it) {
    next.noalias() = decay * (w.transpose() * r.similarity * w);
    next.diagonal().setOnes();
    r.last_change = (next - r.similarity).cwiseAbs().maxCoeff();
    r.similarity.swap(next);
    r.iterations = it;
    if (r.last_change < tolerance) {
      r.converged = true;
      break;
    }
  }
  return r;
}

inline ScoreTable score_global(const Graph& g, const AlgorithmSpec& spec, std::span<const NodePair> pairs) {
  spec.validate();
  auto t = detail::make_table(spec.name(), detail::canonical_pairs(g, pairs));
  detail::require_dense(g, spec);
  switch (spec.kind) {
    case AlgorithmKind::kKatz: {
      const double lambda = estimate_spectral_radius(g);
      const double beta = spec.katz_beta.value_or(default_katz_beta(lambda));
      if (beta * lambda >= 1.0)
        throw DivergenceError("Katz: beta=" + detail::format_real(beta) + " must be below 1/lambda_max = " +
                              detail::format_real(1.0 / lambda));
      t.parameters = {{"beta", detail::format_real(beta)}, {"lambda_max", detail::format_real(lambda)}};
      detail::read_symmetric(katz_matrix(g, beta), t);
      break;
    }
    case AlgorithmKind::kMFI:
      detail::read_symmetric(matrix_forest(g), t);
      break;
    case AlgorithmKind::kSimRank: {
      const auto r = simrank(g, spec.simrank_decay, spec.simrank_iterations, spec.simrank_tolerance);
      t.parameters = {{"C", detail::format_real(spec.simrank_decay)},
                      {"iterations", std::to_string(r.iterations)},
                      {"tolerance", detail::format_real(spec.simrank_tolerance)}};
      t.converged = r.converged;
      if (!r.converged)
        t.status = "SimRank not converged after " + std::to_string(r.iterations) +
                   " iterations (last change " + detail::format_real(r.last_change) + ")";
      detail::read_symmetric(r.similarity, t);
      break;
    }
    default:
      throw ArgumentError("score_global: " + spec.name() + " is not a global index");
  }
  return t;
}

// ---------------------------------------------------------------------------
// Quasi-local indices
//
// A length-3 path u-z1-z2-v qualifies when all four nodes are distinct.
// Contributions are summed in (z1, z2) lexicographic order for every pair.

namespace detail {

// Degree split of the local-community members relative to the community and
// the pair itself. `community` must be sorted; `mark` is scratch of size N,
// all false on entry and exit.
inline void community_degrees(const Graph& g, NodeId u, NodeId v, const std::vector<NodeId>& community,
                              std::vector<char>& mark, std::vector<int>& internal,
                              std::vector<int>& external) {
  for (NodeId z : community) mark[z] = 1;
  internal.assign(community.size(), 0);
  external.assign(community.size(), 0);
  for (std::size_t i = 0; i < community.size(); ++i) {
    for (NodeId y : g.neighbors(community[i])) {
      if (mark[y])
        ++internal[i];
      else if (y != u && y != v)
        ++external[i];
    }
  }
  for (NodeId z : community) mark[z] = 0;
}

inline std::size_t index_in(const std::vector<NodeId>& sorted, NodeId z) {
  return static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), z) - sorted.begin());
}

}  // namespace detail

inline double ch2_l2_term(int internal, int external) {
  return (1.0 + internal) / (1.0 + external);
}

inline double ch2_l3_term(int internal1, int external1, int internal2, int external2) {
  return std::sqrt((1.0 + internal1) * (1.0 + internal2)) / std::sqrt((1.0 + external1) * (1.0 + external2));
}

inline double ra_l3_term(std::size_t k1, std::size_t k2, bool sqrt_variant) {
  const double prod = static_cast<double>(k1) * static_cast<double>(k2);
  return sqrt_variant ? 1.0 / std::sqrt(prod) : 1.0 / prod;
}

inline ScoreTable score_quasi_local(const Graph& g, const AlgorithmSpec& spec, std::span<const NodePair> pairs) {
  spec.validate();
  auto t = detail::make_table(spec.name(), detail::canonical_pairs(g, pairs));
  const std::size_t n = g.node_count();
  std::vector<char> mark(n, 0);
  std::vector<int> internal, external;
  std::vector<NodeId> community;

  switch (spec.kind) {
    case AlgorithmKind::kCH2L2: {
      t.parameters = {{"community", "common neighbours"}};
      for (std::size_t i = 0; i < t.pairs.size(); ++i) {
        const auto [u, v] = t.pairs[i];
        community.clear();
        std::set_intersection(g.neighbors(u).begin(), g.neighbors(u).end(), g.neighbors(v).begin(),
                              g.neighbors(v).end(), std::back_inserter(community));
        if (community.empty()) continue;
        detail::community_degrees(g, u, v, community, mark, internal, external);
        double s = 0.0;
        for (std::size_t c = 0; c < community.size(); ++c) s += ch2_l2_term(internal[c], external[c]);
        t.scores[i] = s;
      }
      break;
    }
    case AlgorithmKind::kCNL3:
    case AlgorithmKind::kRAL3: {
      const bool ra = spec.kind == AlgorithmKind::kRAL3;
      if (ra) t.parameters = {{"weight", spec.ra_l3_sqrt ? "1/sqrt(k1*k2)" : "1/(k1*k2)"}};
      std::vector<double> acc(n, 0.0);
      std::vector<NodeId> touched;
      detail::for_each_source(t.pairs, [&](std::size_t first, std::size_t last) {
        const NodeId u = t.pairs[first].u;
        for (NodeId z1 : g.neighbors(u)) {
          for (NodeId z2 : g.neighbors(z1)) {
            if (z2 == u) continue;
            const double w = ra ? ra_l3_term(g.degree(z1), g.degree(z2), spec.ra_l3_sqrt) : 1.0;
            for (NodeId v : g.neighbors(z2)) {
              if (v == z1 || v == u) continue;
              if (acc[v] == 0.0) touched.push_back(v);
              acc[v] += w;
            }
          }
        }
        for (std::size_t i = first; i < last; ++i) t.scores[i] = acc[t.pairs[i].v];
        for (NodeId v : touched) acc[v] = 0.0;
        touched.clear();
      });
      break;
    }
    case AlgorithmKind::kCH2L3: {
      t.parameters = {{"community", "interior nodes of length-3 paths"}};
      struct Path {
        NodeId v, z1, z2;
      };
      std::vector<Path> paths;
      std::vector<char> wanted(n, 0);
      detail::for_each_source(t.pairs, [&](std::size_t first, std::size_t last) {
        const NodeId u = t.pairs[first].u;
        for (std::size_t i = first; i < last; ++i) wanted[t.pairs[i].v] = 1;
        paths.clear();
        for (NodeId z1 : g.neighbors(u))
          for (NodeId z2 : g.neighbors(z1)) {
            if (z2 == u) continue;
            for (NodeId v : g.neighbors(z2))
              if (v != z1 && v != u && wanted[v]) paths.push_back({v, z1, z2});
          }
        std::stable_sort(paths.begin(), paths.end(), [](const Path& a, const Path& b) { return a.v < b.v; });
        std::size_t p = 0;
        for (std::size_t i = first; i < last; ++i) {
          const NodeId v = t.pairs[i].v;
          wanted[v] = 0;
          while (p < paths.size() && paths[p].v < v) ++p;
          std::size_t q = p;
          while (q < paths.size() && paths[q].v == v) ++q;
          if (q == p) continue;
          community.clear();
          for (std::size_t k = p; k < q; ++k) {
            community.push_back(paths[k].z1);
            community.push_back(paths[k].z2);
          }
          std::sort(community.begin(), community.end());
          community.erase(std::unique(community.begin(), community.end()), community.end());
          detail::community_degrees(g, u, v, community, mark, internal, external);
          double s = 0.0;
          for (std::size_t k = p; k < q; ++k) {
            const auto a = detail::index_in(community, paths[k].z1);
            const auto b = detail::index_in(community, paths[k].z2);
            s += ch2_l3_term(internal[a], external[a], internal[b], external[b]);
          }
          t.scores[i] = s;
          p = q;
        }
      });
      break;
    }
    default:
      throw ArgumentError("score_quasi_local: " + spec.name() + " is not a quasi-local index");
  }
  return t;
}

// ---------------------------------------------------------------------------
// Random-walk indices

// Distribution of a walker started at `source` after `steps` steps
// (row `source` of P^steps, P = D^{-1} A). A walker on a degree-0 node has no
// outgoing mass.
inline std::vector<double> walk_distribution(const Graph& g, NodeId source, int steps) {
  const std::size_t n = g.node_count();
  std::vector<double> x(n, 0.0), y(n);
  x[source] = 1.0;
  for (int s = 0; s < steps; ++s) {
    std::fill(y.begin(), y.end(), 0.0);
    for (NodeId a = 0; a < n; ++a) {
      if (x[a] == 0.0 || g.degree(a) == 0) continue;
      const double share = x[a] / static_cast<double>(g.degree(a));
      for (NodeId b : g.neighbors(a)) y[b] += share;
    }
    x.swap(y);
  }
  return x;
}

// LRW(t): s_uv = k_u/(2|E|) pi_uv(t) + k_v/(2|E|) pi_vu(t). SRW(t) sums LRW
// over 1..t. For each source u the forward distribution gives pi_u.(tau) and a
// backward propagation (P^tau e_u) gives pi_.u(tau).
inline ScoreTable score_walk(const Graph& g, const AlgorithmSpec& spec, std::span<const NodePair> pairs) {
  if (spec.kind != AlgorithmKind::kLRW && spec.kind != AlgorithmKind::kSRW)
    throw ArgumentError("score_walk: " + spec.name() + " is not a random-walk index");
  if (spec.walk_steps < 1) throw ArgumentError("walk horizon t must be at least 1");
  spec.validate();
  auto t = detail::make_table(spec.name(), detail::canonical_pairs(g, pairs));
  t.parameters = {{"t", std::to_string(spec.walk_steps)}};
  const std::size_t n = g.node_count();
  const double two_m = 2.0 * static_cast<double>(g.edge_count());
  if (two_m == 0.0) return t;
  const bool superposed = spec.kind == AlgorithmKind::kSRW;

  std::vector<double> fwd(n), bwd(n), next(n), fwd_sum(n), bwd_sum(n);
  detail::for_each_source(t.pairs, [&](std::size_t first, std::size_t last) {
    const NodeId u = t.pairs[first].u;
    std::fill(fwd.begin(), fwd.end(), 0.0);
    std::fill(bwd.begin(), bwd.end(), 0.0);
    std::fill(fwd_sum.begin(), fwd_sum.end(), 0.0);
    std::fill(bwd_sum.begin(), bwd_sum.end(), 0.0);
    fwd[u] = 1.0;
    bwd[u] = 1.0;
    for (int step = 1; step <= spec.walk_steps; ++step) {
      std::fill(next.begin(), next.end(), 0.0);
      for (NodeId a = 0; a < n; ++a) {
        if (fwd[a] == 0.0 || g.degree(a) == 0) continue;
        const double share = fwd[a] / static_cast<double>(g.degree(a));
        for (NodeId b : g.neighbors(a)) next[b] += share;
      }
      fwd.swap(next);
      for (NodeId a = 0; a < n; ++a) {
        const auto k = g.degree(a);
        if (k == 0) {
          next[a] = 0.0;
          continue;
        }
        double s = 0.0;
        for (NodeId b : g.neighbors(a)) s += bwd[b];
        next[a] = s / static_cast<double>(k);
      }
      bwd.swap(next);
      if (superposed || step == spec.walk_steps) {
        for (std::size_t i = first; i < last; ++i) {
          const NodeId v = t.pairs[i].v;
          t.scores[i] += static_cast<double>(g.degree(u)) / two_m * fwd[v] +
                         static_cast<double>(g.degree(v)) / two_m * bwd[v];
        }
      }
    }
  });
  return t;
}

// Uniform scores in [0,1); a calibration baseline, not a similarity index.
inline ScoreTable score_random(const Graph& g, std::span<const NodePair> pairs, std::uint64_t seed) {
  auto t = detail::make_table("Random", detail::canonical_pairs(g, pairs));
  t.parameters = {{"seed", std::to_string(seed)}};
  Rng rng(seed);
  for (auto& s : t.scores) s = uniform_unit(rng);
  return t;
}

// ---------------------------------------------------------------------------
// External score files: "u v score" per line with node labels, '#' comments.

struct ScoreLine {
  NodeLabel u;
  NodeLabel v;
  double score;
  std::size_t line;
};

// Parses every line; rejects non-finite scores, self-pairs and duplicate
// unordered pairs.
inline std::vector<ScoreLine> read_score_lines(std::istream& in) {
  std::vector<ScoreLine> out;
  std::string line;
  std::size_t line_no = 0;
  std::map<std::pair<NodeLabel, NodeLabel>, std::size_t> seen;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto tokens = detail::split_ws(body);
    if (tokens.size() != 3) throw ParseError("expected 'u v score'", line_no);
    const auto a = detail::parse_int<NodeLabel>(tokens[0], line_no);
    const auto b = detail::parse_int<NodeLabel>(tokens[1], line_no);
    if (a == b) throw ParseError("self-pair " + std::to_string(a), line_no);
    double s;
    try {
      std::size_t used = 0;
      s = std::stod(std::string(tokens[2]), &used);
      if (used != tokens[2].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError("bad score '" + std::string(tokens[2]) + "'", line_no);
    }
    if (!std::isfinite(s)) throw ParseError("non-finite score '" + std::string(tokens[2]) + "'", line_no);
    const auto key = std::minmax(a, b);
    if (auto [it, fresh] = seen.emplace(std::pair{key.first, key.second}, line_no); !fresh)
      throw ParseError("duplicate pair (" + std::to_string(a) + "," + std::to_string(b) + "), first seen on line " +
                           std::to_string(it->second),
                       line_no);
    out.push_back({a, b, s, line_no});
  }
  return out;
}

// ScoreTable over exactly `candidates`; lines for other pairs are ignored.
inline ScoreTable load_external_scores(std::istream& in, const Graph& g, std::span<const NodePair> candidates,
                                       std::string name = "External") {
  auto t = detail::make_table(std::move(name), detail::canonical_pairs(g, candidates));
  std::vector<char> covered(t.pairs.size(), 0);
  for (const auto& line : read_score_lines(in)) {
    const auto a = g.id_of(line.u);
    const auto b = g.id_of(line.v);
    if (!a || !b)
      throw ParseError("unknown node label " + std::to_string(a ? line.v : line.u), line.line);
    const auto p = NodePair::of(*a, *b);
    auto it = std::lower_bound(t.pairs.begin(), t.pairs.end(), p);
    if (it == t.pairs.end() || *it != p) continue;
    const auto i = static_cast<std::size_t>(it - t.pairs.begin());
    t.scores[i] = line.score;
    covered[i] = 1;
  }
  std::size_t missing = 0;
  std::string listed;
  for (std::size_t i = 0; i < covered.size(); ++i) {
    if (covered[i]) continue;
    if (missing < 5)
      listed += (missing ? ", (" : "(") + std::to_string(g.label(t.pairs[i].u)) + "," +
                std::to_string(g.label(t.pairs[i].v)) + ")";
    ++missing;
  }
  if (missing)
    throw CoverageError("score file misses " + std::to_string(missing) + " candidate pair(s): " + listed +
                        (missing > 5 ? ", ..." : ""));
  return t;
}

inline void write_scores(std::ostream& out, const ScoreTable& t, const Graph& g) {
  out << "# " << t.algorithm << '\n';
  for (std::size_t i = 0; i < t.pairs.size(); ++i)
    out << g.label(t.pairs[i].u) << ' ' << g.label(t.pairs[i].v) << ' ' << detail::format_real(t.scores[i]) << '\n';
}

// Dispatches on spec.kind. `seed` feeds the Random baseline only. External
// specs are resolved by the caller (they need a file per cell).
inline ScoreTable score_pairs(const Graph& g, const AlgorithmSpec& spec, std::span<const NodePair> pairs,
                              std::uint64_t seed = 0) {
  switch (spec.kind) {
    case AlgorithmKind::kCN:
    case AlgorithmKind::kRA:
    case AlgorithmKind::kJA:
    case AlgorithmKind::kPA:
      return score_local(g, spec.kind, pairs);
    case AlgorithmKind::kKatz:
    case AlgorithmKind::kMFI:
    case AlgorithmKind::kSimRank:
      return score_global(g, spec, pairs);
    case AlgorithmKind::kCH2L2:
    case AlgorithmKind::kCNL3:
    case AlgorithmKind::kRAL3:
    case AlgorithmKind::kCH2L3:
      return score_quasi_local(g, spec, pairs);
    case AlgorithmKind::kLRW:
    case AlgorithmKind::kSRW:
      return score_walk(g, spec, pairs);
    case AlgorithmKind::kRandom:
      return score_random(g, pairs, seed);
    case AlgorithmKind::kExternal:
      break;
  }
  throw ArgumentError("score_pairs: External scores must be loaded with load_external_scores");
}

}  // namespace lpdisc
