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

// Train/test splitting, retention-rate subsampling of the training edges and
// per-trial seed derivation.

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lpdisc/error.hpp"
#include "lpdisc/graph.hpp"
#include "lpdisc/random.hpp"

namespace lpdisc {

enum class RetentionMode { kIndependent, kNested };

inline std::string_view to_string(RetentionMode mode) {
  return mode == RetentionMode::kNested ? "nested" : "independent";
}

inline RetentionMode parse_retention_mode(std::string_view name) {
  if (name == "independent") return RetentionMode::kIndependent;
  if (name == "nested") return RetentionMode::kNested;
  throw ArgumentError("unknown retention mode '" + std::string(name) + "'");
}

// Training / test partition of a graph's edges. Both halves are sorted.
// Negatives (U - E) are implied by the source graph and never stored here.
struct EdgeSplit {
  std::vector<NodePair> training;
  std::vector<NodePair> test;
};

struct RetentionSample {
  double q = 0.0;
  RetentionMode mode = RetentionMode::kIndependent;
  std::vector<NodePair> retained;  // sorted subset of EdgeSplit::training
};

struct TrialPlan {
  std::vector<double> q_grid = default_q_grid();
  std::size_t trials = 100;
  std::uint64_t master_seed = 0;
  RetentionMode mode = RetentionMode::kIndependent;
  double test_fraction = 0.1;

  static std::vector<double> default_q_grid() {
    return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  }

  void validate() const {
    if (q_grid.size() < 2) throw ArgumentError("q grid needs at least 2 retention rates");
    for (std::size_t i = 0; i < q_grid.size(); ++i) {
      const double q = q_grid[i];
      if (!(q > 0.0 && q < 1.0)) throw ArgumentError("retention rate " + std::to_string(q) + " not in (0,1)");
      if (i > 0 && !(q_grid[i - 1] < q)) throw ArgumentError("q grid must be strictly increasing");
    }
    if (trials < 1) throw ArgumentError("trial count must be at least 1");
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
      throw ArgumentError("test fraction must lie in (0,1)");
  }
};

// Stream seed for one (trial, stage) of a run. Pure function of its inputs.
inline std::uint64_t derive_trial_seed(std::uint64_t master_seed, std::uint64_t trial_index,
                                       std::string_view stage_label) {
  std::uint64_t h = mix64(master_seed);
  h = mix64(h ^ hash_label(stage_label));
  h = mix64(h ^ mix64(trial_index + 0x632be59bd9b4e019ULL));
  return h;
}

// round-half-up
inline std::size_t round_count(double x) { return static_cast<std::size_t>(std::floor(x + 0.5)); }

inline EdgeSplit split_edges(const Graph& graph, double test_fraction, std::uint64_t seed) {
  const std::size_t m = graph.edge_count();
  if (m < 2) throw ArgumentError("split_edges: graph needs at least 2 edges, has " + std::to_string(m));
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw ArgumentError("split_edges: test fraction must lie in (0,1)");
  std::size_t test_count = std::max<std::size_t>(1, round_count(test_fraction * static_cast<double>(m)));
  test_count = std::min(test_count, m - 1);

  std::vector<NodePair> edges(graph.edges().begin(), graph.edges().end());
  Rng rng(seed);
  shuffle(std::span<NodePair>(edges), rng);
  EdgeSplit split;
  split.test.assign(edges.begin(), edges.begin() + static_cast<std::ptrdiff_t>(test_count));
  split.training.assign(edges.begin() + static_cast<std::ptrdiff_t>(test_count), edges.end());
  std::sort(split.test.begin(), split.test.end());
  std::sort(split.training.begin(), split.training.end());
  return split;
}

inline std::size_t retained_count(double q, std::size_t training_size) {
  if (training_size == 0) return 0;
  return std::min(training_size,
                  std::max<std::size_t>(1, round_count(q * static_cast<double>(training_size))));
}

// Independent mode draws a fresh subset for every (trial_seed, q); nested mode
// takes a prefix of one permutation per trial_seed, so subsets grow with q.
inline RetentionSample retain_fraction(const EdgeSplit& split, double q, std::uint64_t trial_seed,
                                       RetentionMode mode) {
  if (!(q > 0.0 && q < 1.0)) throw ArgumentError("retain_fraction: q=" + std::to_string(q) + " not in (0,1)");
  RetentionSample sample;
  sample.q = q;
  sample.mode = mode;
  const std::size_t keep = retained_count(q, split.training.size());
  const std::uint64_t seed = mode == RetentionMode::kNested
                                 ? derive_trial_seed(trial_seed, 0, "retain-nested")
                                 : derive_trial_seed(trial_seed, std::bit_cast<std::uint64_t>(q),
                                                     "retain-independent");
  std::vector<NodePair> edges = split.training;
  Rng rng(seed);
  shuffle(std::span<NodePair>(edges), rng);
  edges.resize(keep);
  std::sort(edges.begin(), edges.end());
  sample.retained = std::move(edges);
  return sample;
}

}  // namespace lpdisc
