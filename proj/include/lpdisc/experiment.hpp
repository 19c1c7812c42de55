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

// The retention-rate protocol: for each trial, split the edges, then for each
// retention rate keep a fraction of the training edges, score the fixed
// candidate set E^P + (U - E) on the retained graph, rank and evaluate.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "lpdisc/discriminability.hpp"
#include "lpdisc/error.hpp"
#include "lpdisc/graph.hpp"
#include "lpdisc/metrics.hpp"
#include "lpdisc/predictors.hpp"
#include "lpdisc/sampling.hpp"

namespace lpdisc {

// A failure inside one cell of the experiment grid.
class ExperimentError : public Error {
 public:
  ExperimentError(std::size_t trial, double q, const std::string& what)
      : Error("trial " + std::to_string(trial) + ", q=" + detail::format_real(q) + ": " + what),
        trial_(trial),
        q_(q) {}

  std::size_t trial() const noexcept { return trial_; }
  double q() const noexcept { return q_; }

 private:
  std::size_t trial_;
  double q_;
};

struct ExperimentOptions {
  TiePolicy tie_policy = TiePolicy::kAverage;
  MetricOptions metric_options{};
  // 0 means std::thread::hardware_concurrency().
  unsigned threads = 0;
  // Trials already computed (resume); values are [rate][metric] flattened.
  std::map<std::size_t, std::vector<double>> completed;
  // Called once per newly finished trial, serialized by the runner.
  std::function<void(std::size_t trial, const std::vector<double>& values)> on_trial;
};

// Seed of trial t; every stage seed of that trial is derived from it.
inline std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t trial) {
  return derive_trial_seed(master_seed, trial, "trial");
}

// E^P merged into the sorted non-edge list.
inline std::vector<NodePair> candidate_pairs(const std::vector<NodePair>& non_edges_sorted,
                                             const std::vector<NodePair>& test) {
  std::vector<NodePair> out;
  out.reserve(non_edges_sorted.size() + test.size());
  std::merge(non_edges_sorted.begin(), non_edges_sorted.end(), test.begin(), test.end(), std::back_inserter(out));
  return out;
}

inline std::string expand_score_path(std::string pattern, std::size_t trial, std::size_t rate) {
  auto replace = [&](const std::string& key, const std::string& value) {
    for (auto pos = pattern.find(key); pos != std::string::npos; pos = pattern.find(key, pos + value.size()))
      pattern.replace(pos, key.size(), value);
  };
  replace("{trial}", std::to_string(trial));
  replace("{q_index}", std::to_string(rate));
  return pattern;
}

namespace detail {

inline std::vector<double> run_trial(const Graph& graph, const std::vector<NodePair>& negatives,
                                     const AlgorithmSpec& spec, const std::vector<Metric>& metrics,
                                     const TrialPlan& plan, const ExperimentOptions& options, std::size_t trial) {
  const std::uint64_t seed = trial_seed(plan.master_seed, trial);
  std::vector<double> values(plan.q_grid.size() * metrics.size());
  double q = 0.0;
  try {
    const auto split = split_edges(graph, plan.test_fraction, derive_trial_seed(seed, 0, "split"));
    const auto candidates = candidate_pairs(negatives, split.test);
    const std::uint64_t retain_seed = derive_trial_seed(seed, 0, "retain");
    for (std::size_t i = 0; i < plan.q_grid.size(); ++i) {
      q = plan.q_grid[i];
      const auto sample = retain_fraction(split, q, retain_seed, plan.mode);
      const Graph training = graph.with_edges(sample.retained);
      ScoreTable table;
      if (spec.kind == AlgorithmKind::kExternal) {
        const auto path = expand_score_path(spec.external_path, trial, i);
        std::ifstream in(path);
        if (!in) throw ArgumentError("cannot open score file '" + path + "'");
        table = load_external_scores(in, graph, candidates);
      } else {
        table = score_pairs(training, spec, candidates, derive_trial_seed(seed, i, "score"));
      }
      const auto outcomes =
          rank_for_metrics(table, split.test, options.tie_policy, derive_trial_seed(seed, i, "tie"));
      for (std::size_t m = 0; m < metrics.size(); ++m)
        values[i * metrics.size() + m] = evaluate(metrics[m], outcomes, options.metric_options);
    }
  } catch (const ExperimentError&) {
    throw;
  } catch (const std::exception& e) {
    throw ExperimentError(trial, q, e.what());
  }
  return values;
}

}  // namespace detail

// Deterministic in plan.master_seed: trials are independent work units whose
// results land in trial-index slots, so the thread count never changes output.
inline ScoreTensor run_experiment(const Graph& graph, const AlgorithmSpec& spec, const std::vector<Metric>& metrics,
                                  const TrialPlan& plan, const ExperimentOptions& options = {}) {
  plan.validate();
  spec.validate();
  if (metrics.empty()) throw ArgumentError("run_experiment needs at least one metric");
  if (spec.dense() && graph.node_count() > spec.dense_node_cap)
    throw ArgumentError(spec.name() + ": graph has " + std::to_string(graph.node_count()) +
                        " nodes, above the dense-kernel cap of " + std::to_string(spec.dense_node_cap));

  ScoreTensor tensor;
  tensor.algorithm = spec.name();
  tensor.metrics = metrics;
  tensor.plan = plan;
  tensor.values.assign(plan.trials * plan.q_grid.size() * metrics.size(), 0.0);
  for (std::size_t t = 0; t < plan.trials; ++t) tensor.trial_seeds.push_back(trial_seed(plan.master_seed, t));

  const std::size_t cell = plan.q_grid.size() * metrics.size();
  std::vector<char> done(plan.trials, 0);
  for (const auto& [t, vals] : options.completed) {
    if (t >= plan.trials || vals.size() != cell) throw ArgumentError("resume data does not match the plan");
    std::copy(vals.begin(), vals.end(), tensor.values.begin() + static_cast<std::ptrdiff_t>(t * cell));
    done[t] = 1;
  }

  const auto negatives = non_edges(graph).pairs;
  std::vector<std::size_t> pending;
  for (std::size_t t = 0; t < plan.trials; ++t)
    if (!done[t]) pending.push_back(t);

  std::vector<std::exception_ptr> errors(plan.trials);
  std::atomic<std::size_t> next{0};
  std::mutex report;
  auto worker = [&] {
    for (std::size_t k = next++; k < pending.size(); k = next++) {
      const std::size_t t = pending[k];
      try {
        auto vals = detail::run_trial(graph, negatives, spec, metrics, plan, options, t);
        std::copy(vals.begin(), vals.end(), tensor.values.begin() + static_cast<std::ptrdiff_t>(t * cell));
        if (options.on_trial) {
          std::lock_guard lock(report);
          options.on_trial(t, vals);
        }
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, pending.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return tensor;
}

}  // namespace lpdisc
