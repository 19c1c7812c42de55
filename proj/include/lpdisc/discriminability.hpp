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

// Paired p-value matrices over retention rates, the binary discriminability
// matrix and its density d, threshold sweeps, grey correlation between
// discriminability sequences and per-group metric rankings.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lpdisc/error.hpp"
#include "lpdisc/metrics.hpp"
#include "lpdisc/sampling.hpp"

namespace lpdisc {

// Metric values indexed [trial][retention index][metric].
struct ScoreTensor {
  std::string algorithm;
  std::vector<Metric> metrics;
  TrialPlan plan;
  std::vector<std::uint64_t> trial_seeds;
  std::vector<double> values;

  std::size_t trials() const noexcept { return plan.trials; }
  std::size_t rates() const noexcept { return plan.q_grid.size(); }
  std::size_t metric_count() const noexcept { return metrics.size(); }

  std::size_t offset(std::size_t trial, std::size_t rate, std::size_t metric) const noexcept {
    return (trial * rates() + rate) * metric_count() + metric;
  }
  double at(std::size_t trial, std::size_t rate, std::size_t metric) const {
    return values.at(offset(trial, rate, metric));
  }

  std::size_t metric_index(Metric m) const {
    auto it = std::find(metrics.begin(), metrics.end(), m);
    if (it == metrics.end()) throw ArgumentError("metric " + std::string(to_string(m)) + " not in tensor");
    return static_cast<std::size_t>(it - metrics.begin());
  }

  // values[trial][rate] for one metric.
  std::vector<std::vector<double>> slice(std::size_t metric) const {
    std::vector<std::vector<double>> out(trials(), std::vector<double>(rates()));
    for (std::size_t t = 0; t < trials(); ++t)
      for (std::size_t i = 0; i < rates(); ++i) out[t][i] = at(t, i, metric);
    return out;
  }
};

class PValueMatrix {
 public:
  PValueMatrix(std::size_t n, std::size_t trials) : n_(n), trials_(trials), p_(n * n, 1.0) {}

  std::size_t size() const noexcept { return n_; }
  std::size_t trials() const noexcept { return trials_; }
  double operator()(std::size_t i, std::size_t j) const { return p_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return p_[i * n_ + j]; }

 private:
  std::size_t n_;
  std::size_t trials_;
  std::vector<double> p_;
};

// values[trial][rate], rates in increasing q. For i < j, p_ij is the fraction
// of trials whose value at q_i is >= the value at q_j (the monotonicity
// assumption fails); p_ii = 1 and the lower triangle mirrors the upper.
inline PValueMatrix pvalue_matrix(const std::vector<std::vector<double>>& values) {
  if (values.empty()) throw ArgumentError("p-value matrix needs at least one trial");
  const std::size_t trials = values.size();
  const std::size_t n = values.front().size();
  for (const auto& row : values)
    if (row.size() != n) throw ArgumentError("ragged trial table");
  PValueMatrix p(n, trials);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      std::size_t violations = 0;
      for (const auto& row : values) violations += row[i] >= row[j];
      p(i, j) = p(j, i) = static_cast<double>(violations) / static_cast<double>(trials);
    }
  return p;
}

inline PValueMatrix pvalue_matrix(const ScoreTensor& tensor, Metric metric) {
  return pvalue_matrix(tensor.slice(tensor.metric_index(metric)));
}

struct DiscriminabilityResult {
  std::size_t n = 0;
  std::vector<std::uint8_t> s;  // row-major n x n
  double d = 0.0;
  double p_star = 0.0;
  std::string metric;
  std::string algorithm;

  int at(std::size_t i, std::size_t j) const { return s[i * n + j]; }
};

// s_ij = 1 iff p_ij < p*, d = sum s_ij / n^2.
inline DiscriminabilityResult discriminability_score(const PValueMatrix& p, double p_star) {
  if (!(p_star > 0.0 && p_star <= 1.0))
    throw ArgumentError("p* must lie in (0,1], got " + std::to_string(p_star));
  DiscriminabilityResult r;
  r.n = p.size();
  r.p_star = p_star;
  r.s.assign(r.n * r.n, 0);
  std::size_t ones = 0;
  for (std::size_t i = 0; i < r.n; ++i)
    for (std::size_t j = 0; j < r.n; ++j)
      if (p(i, j) < p_star) {
        r.s[i * r.n + j] = 1;
        ++ones;
      }
  r.d = static_cast<double>(ones) / static_cast<double>(r.n * r.n);
  return r;
}

// (p*, d) at each threshold of the grid.
inline std::vector<std::pair<double, double>> sweep_pstar(const PValueMatrix& p, std::span<const double> grid) {
  std::vector<std::pair<double, double>> curve;
  curve.reserve(grid.size());
  for (double t : grid) curve.emplace_back(t, discriminability_score(p, t).d);
  return curve;
}

// ---------------------------------------------------------------------------
// Grey correlation

struct GreyCorrelation {
  double xi_ij = 1.0;
  double xi_ji = 1.0;
  double r = 1.0;
};

namespace detail {

// xi of `to` relative to `from`: mean over positions of
// (min_diff + rho max_diff) / (diff_e + rho max_diff), differences taken over
// the two sequences. Positions where numerator and denominator both vanish
// (identical sequences, or rho = 0 with diff_e = min_diff = 0) count as 1.
inline double grey_coefficient(std::span<const double> from, std::span<const double> to, double rho) {
  const std::size_t m = from.size();
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t t = 0; t < m; ++t) {
    const double diff = std::abs(to[t] - from[t]);
    lo = std::min(lo, diff);
    hi = std::max(hi, diff);
  }
  double sum = 0.0;
  for (std::size_t e = 0; e < m; ++e) {
    const double num = lo + rho * hi;
    const double den = std::abs(to[e] - from[e]) + rho * hi;
    sum += den == 0.0 ? 1.0 : num / den;
  }
  return sum / static_cast<double>(m);
}

}  // namespace detail

inline GreyCorrelation grey_correlation(std::span<const double> x_i, std::span<const double> x_j, double rho = 0.5) {
  if (x_i.size() != x_j.size())
    throw ArgumentError("grey correlation needs equal-length sequences (" + std::to_string(x_i.size()) + " vs " +
                        std::to_string(x_j.size()) + ")");
  if (x_i.empty()) throw ArgumentError("grey correlation needs non-empty sequences");
  if (!(rho >= 0.0 && rho <= 1.0)) throw ArgumentError("grey correlation rho must lie in [0,1]");
  GreyCorrelation g;
  g.xi_ij = detail::grey_coefficient(x_i, x_j, rho);
  g.xi_ji = detail::grey_coefficient(x_j, x_i, rho);
  g.r = (g.xi_ij + g.xi_ji) / 2.0;
  return g;
}

// R for every pair of sequences; unit diagonal, symmetric.
inline std::vector<std::vector<double>> grey_matrix(const std::vector<std::vector<double>>& sequences,
                                                    double rho = 0.5) {
  const std::size_t k = sequences.size();
  std::vector<std::vector<double>> r(k, std::vector<double>(k, 1.0));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) r[i][j] = r[j][i] = grey_correlation(sequences[i], sequences[j], rho).r;
  return r;
}

// ---------------------------------------------------------------------------
// Rankings

struct MetricScore {
  std::string metric;
  double d = 0.0;
};

struct RankedMetric {
  std::string group;
  std::string metric;
  double d = 0.0;
  int rank = 0;
};

// Per group: rank 1 for the largest d; equal d share the better rank and the
// next distinct value skips (0.9, 0.9, 0.1 -> 1, 1, 3). Rows are ordered by
// group, then rank, then metric name.
inline std::vector<RankedMetric> rank_metrics(
    const std::vector<std::pair<std::string, std::vector<MetricScore>>>& groups) {
  std::vector<RankedMetric> out;
  for (const auto& [group, scores] : groups) {
    std::vector<RankedMetric> rows;
    for (const auto& s : scores) {
      int better = 0;
      for (const auto& other : scores) better += other.d > s.d;
      rows.push_back({group, s.metric, s.d, better + 1});
    }
    std::sort(rows.begin(), rows.end(), [](const RankedMetric& a, const RankedMetric& b) {
      return a.rank != b.rank ? a.rank < b.rank : a.metric < b.metric;
    });
    out.insert(out.end(), rows.begin(), rows.end());
  }
  return out;
}

}  // namespace lpdisc
