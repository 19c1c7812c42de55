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

// Ranking of scored candidates and the rank-based evaluation metrics.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lpdisc/error.hpp"
#include "lpdisc/graph.hpp"
#include "lpdisc/predictors.hpp"
#include "lpdisc/random.hpp"

namespace lpdisc {

enum class TiePolicy { kAverage, kRandom, kOptimistic, kPessimistic };

inline std::string_view to_string(TiePolicy p) {
  switch (p) {
    case TiePolicy::kAverage:
      return "average";
    case TiePolicy::kRandom:
      return "random";
    case TiePolicy::kOptimistic:
      return "optimistic";
    case TiePolicy::kPessimistic:
      return "pessimistic";
  }
  return "?";
}

inline TiePolicy parse_tie_policy(std::string_view name) {
  if (name == "average") return TiePolicy::kAverage;
  if (name == "random") return TiePolicy::kRandom;
  if (name == "optimistic") return TiePolicy::kOptimistic;
  if (name == "pessimistic") return TiePolicy::kPessimistic;
  throw ArgumentError("unknown tie policy '" + std::string(name) + "'");
}

// Positions (1-based, ascending) of the positives in the descending score
// order over all candidates. Mid-ranks under the average policy may repeat;
// integer ranks are strictly increasing.
struct RankedOutcome {
  std::vector<double> ranks;
  std::size_t candidates = 0;
  TiePolicy tie_policy = TiePolicy::kOptimistic;
  std::uint64_t tie_seed = 0;

  std::size_t positives() const noexcept { return ranks.size(); }
  std::size_t negatives() const noexcept { return candidates - ranks.size(); }

  bool integral() const noexcept {
    return std::all_of(ranks.begin(), ranks.end(), [](double r) { return r == std::floor(r); });
  }

  // Validates and wraps hand-built ranks (integer unless stated otherwise).
  static RankedOutcome from_ranks(std::vector<double> ranks, std::size_t candidates,
                                  TiePolicy policy = TiePolicy::kOptimistic) {
    RankedOutcome o{std::move(ranks), candidates, policy, 0};
    o.validate();
    return o;
  }

  void validate() const {
    if (ranks.empty()) throw ArgumentError("ranked outcome needs at least one positive");
    if (candidates <= ranks.size()) throw ArgumentError("ranked outcome needs at least one negative");
    for (std::size_t i = 0; i < ranks.size(); ++i) {
      if (!(ranks[i] >= 1.0 && ranks[i] <= static_cast<double>(candidates)))
        throw ArgumentError("rank " + std::to_string(ranks[i]) + " outside [1, C]");
      if (i > 0 && ranks[i] < ranks[i - 1]) throw ArgumentError("ranks must be sorted ascending");
      if (i > 0 && ranks[i] == ranks[i - 1] && tie_policy != TiePolicy::kAverage)
        throw ArgumentError("repeated rank " + std::to_string(ranks[i]) + " without average ties");
    }
  }
};

namespace detail {

// Equal-score runs in descending score order: (positives, negatives) each.
struct TieGroup {
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

inline std::vector<TieGroup> tie_groups(const ScoreTable& table, std::span<const NodePair> positives) {
  const std::size_t c = table.size();
  std::vector<char> is_positive(c, 0);
  for (const auto& p : positives) {
    const auto key = NodePair::of(p.u, p.v);
    auto it = std::lower_bound(table.pairs.begin(), table.pairs.end(), key);
    if (it == table.pairs.end() || *it != key)
      throw CoverageError("positive pair (" + std::to_string(key.u) + "," + std::to_string(key.v) +
                          ") has no score");
    auto& flag = is_positive[static_cast<std::size_t>(it - table.pairs.begin())];
    if (flag) throw ArgumentError("positive pair (" + std::to_string(key.u) + "," + std::to_string(key.v) +
                                  ") listed twice");
    flag = 1;
  }
  for (double s : table.scores)
    if (!std::isfinite(s)) throw ArgumentError("non-finite score in table " + table.algorithm);

  std::vector<std::uint32_t> order(c);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return table.scores[a] > table.scores[b] || (table.scores[a] == table.scores[b] && a < b);
  });
  std::vector<TieGroup> groups;
  for (std::size_t i = 0; i < c;) {
    TieGroup grp;
    std::size_t j = i;
    while (j < c && table.scores[order[j]] == table.scores[order[i]]) {
      (is_positive[order[j]] ? grp.positives : grp.negatives)++;
      ++j;
    }
    groups.push_back(grp);
    i = j;
  }
  return groups;
}

inline RankedOutcome assign_ranks(const std::vector<TieGroup>& groups, TiePolicy policy, std::uint64_t seed) {
  RankedOutcome o;
  o.tie_policy = policy;
  o.tie_seed = policy == TiePolicy::kRandom ? seed : 0;
  Rng rng(seed);
  std::size_t start = 0;  // positions before this group
  for (const auto& g : groups) {
    const std::size_t size = g.positives + g.negatives;
    if (g.positives > 0) {
      switch (policy) {
        case TiePolicy::kAverage: {
          const double mid = static_cast<double>(start) + static_cast<double>(size + 1) / 2.0;
          o.ranks.insert(o.ranks.end(), g.positives, mid);
          break;
        }
        case TiePolicy::kOptimistic:
          for (std::size_t k = 1; k <= g.positives; ++k) o.ranks.push_back(static_cast<double>(start + k));
          break;
        case TiePolicy::kPessimistic:
          for (std::size_t k = 1; k <= g.positives; ++k)
            o.ranks.push_back(static_cast<double>(start + g.negatives + k));
          break;
        case TiePolicy::kRandom: {
          // Selection sampling: each a-subset of the group's slots equally likely.
          std::size_t needed = g.positives;
          for (std::size_t slot = 0; slot < size && needed > 0; ++slot) {
            if (uniform_index(rng, size - slot) < needed) {
              o.ranks.push_back(static_cast<double>(start + slot + 1));
              --needed;
            }
          }
          break;
        }
      }
    }
    start += size;
  }
  o.candidates = start;
  return o;
}

}  // namespace detail

// Descending sort by score with ties resolved by `policy`; `seed` drives the
// random policy only.
inline RankedOutcome rank_positives(const ScoreTable& scores, std::span<const NodePair> positives,
                                    TiePolicy policy = TiePolicy::kAverage, std::uint64_t seed = 0) {
  auto o = detail::assign_ranks(detail::tie_groups(scores, positives), policy, seed);
  o.validate();
  return o;
}

// The closed-form metrics read `closed_form` (the requested policy); curve
// metrics need integer ranks and read `curve`, which equals `closed_form`
// unless the requested policy is average, in which case it is the seeded
// random resolution of the same ties.
struct RankedOutcomes {
  RankedOutcome closed_form;
  RankedOutcome curve;
};

inline RankedOutcomes rank_for_metrics(const ScoreTable& scores, std::span<const NodePair> positives,
                                       TiePolicy policy, std::uint64_t seed) {
  const auto groups = detail::tie_groups(scores, positives);
  RankedOutcomes out;
  out.closed_form = detail::assign_ranks(groups, policy, seed);
  out.curve = policy == TiePolicy::kAverage ? detail::assign_ranks(groups, TiePolicy::kRandom, seed)
                                            : out.closed_form;
  out.closed_form.validate();
  out.curve.validate();
  return out;
}

// ---------------------------------------------------------------------------
// Confusion counts at a top-L cut

struct ConfusionCounts {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

// Positives with rank <= k (fractional mid-ranks included).
inline std::size_t true_positives_at(const RankedOutcome& o, double k) {
  return static_cast<std::size_t>(std::upper_bound(o.ranks.begin(), o.ranks.end(), k) - o.ranks.begin());
}

inline ConfusionCounts confusion_at(const RankedOutcome& o, std::size_t cut) {
  if (cut < 1 || cut > o.candidates)
    throw ArgumentError("threshold L=" + std::to_string(cut) + " outside [1, " + std::to_string(o.candidates) + "]");
  ConfusionCounts c;
  c.tp = true_positives_at(o, static_cast<double>(cut));
  c.fp = cut - c.tp;
  c.fn = o.positives() - c.tp;
  c.tn = o.negatives() - c.fp;
  return c;
}

// ---------------------------------------------------------------------------
// Metrics

inline double precision(const RankedOutcome& o, std::size_t cut) {
  const auto c = confusion_at(o, cut);
  return static_cast<double>(c.tp) / static_cast<double>(cut);
}
inline double precision(const RankedOutcome& o) { return precision(o, o.positives()); }

struct MccValue {
  double value = 0.0;
  // A marginal of the confusion table is zero; value is then 0 by convention.
  bool degenerate = false;
};

inline MccValue mcc_value(const RankedOutcome& o, std::size_t cut) {
  const auto c = confusion_at(o, cut);
  const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
  const double fn = static_cast<double>(c.fn), tn = static_cast<double>(c.tn);
  const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (denom == 0.0) return {0.0, true};
  return {(tp * tn - fp * fn) / std::sqrt(denom), false};
}
inline double mcc(const RankedOutcome& o, std::size_t cut) { return mcc_value(o, cut).value; }
inline double mcc(const RankedOutcome& o) { return mcc(o, o.positives()); }

inline double ndcg(const RankedOutcome& o) {
  double dcg = 0.0, ideal = 0.0;
  for (std::size_t i = 0; i < o.ranks.size(); ++i) {
    dcg += 1.0 / std::log2(1.0 + o.ranks[i]);
    ideal += 1.0 / std::log2(2.0 + static_cast<double>(i));
  }
  return dcg / ideal;
}

enum class AucForm { kExact, kApproximate };

// Exact: mean over positives of 1 - (r_i - i)/|U-E|. Approximate: 1 - <r>/C.
inline double auc(const RankedOutcome& o, AucForm form = AucForm::kExact) {
  const double n = static_cast<double>(o.positives());
  if (form == AucForm::kApproximate) {
    const double mean = std::accumulate(o.ranks.begin(), o.ranks.end(), 0.0) / n;
    return 1.0 - mean / static_cast<double>(o.candidates);
  }
  const double neg = static_cast<double>(o.negatives());
  double sum = 0.0;
  for (std::size_t i = 0; i < o.ranks.size(); ++i) sum += 1.0 - (o.ranks[i] - static_cast<double>(i + 1)) / neg;
  return sum / n;
}

// Fraction of (positive, negative) pairs ordered correctly, ties credited 1/2.
inline double auc_pairwise_oracle(const ScoreTable& scores, std::span<const NodePair> positives) {
  std::vector<char> is_positive(scores.size(), 0);
  for (const auto& p : positives) {
    const auto key = NodePair::of(p.u, p.v);
    auto it = std::lower_bound(scores.pairs.begin(), scores.pairs.end(), key);
    if (it == scores.pairs.end() || *it != key) throw CoverageError("positive pair has no score");
    is_positive[static_cast<std::size_t>(it - scores.pairs.begin())] = 1;
  }
  double credit = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!is_positive[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (is_positive[j]) continue;
      ++count;
      if (scores.scores[i] > scores.scores[j])
        credit += 1.0;
      else if (scores.scores[i] == scores.scores[j])
        credit += 0.5;
    }
  }
  if (count == 0) throw ArgumentError("pairwise AUC needs at least one positive and one negative");
  return credit / static_cast<double>(count);
}

namespace detail {
inline void require_integral(const RankedOutcome& o, std::string_view metric) {
  if (!o.integral())
    throw ArgumentError(std::string(metric) + " needs integer ranks; resolve ties with a non-average policy");
}
}  // namespace detail

// Trapezoidal area under the PR curve through the points at each positive.
// Segment i (recall i/n -> (i+1)/n) runs from precision i/(r_{i+1}-1) down to
// (i+1)/r_{i+1}; the first segment starts at precision 1 when r_1 = 1 and 0
// otherwise.
inline double aupr(const RankedOutcome& o) {
  detail::require_integral(o, "AUPR");
  const std::size_t n = o.positives();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r_next = o.ranks[i];
    double head;
    if (i == 0)
      head = r_next == 1.0 ? 1.0 : 0.0;
    else
      head = static_cast<double>(i) / (r_next - 1.0);
    sum += head + static_cast<double>(i + 1) / r_next;
  }
  return sum / (2.0 * static_cast<double>(n));
}

enum class AucPrecisionForm { kTrapezoid, kLiteral };

inline double auc_precision(const RankedOutcome& o, AucPrecisionForm form = AucPrecisionForm::kTrapezoid) {
  detail::require_integral(o, "AUC-Precision");
  const std::size_t n = o.positives();
  std::vector<double> p(n);
  for (std::size_t k = 1; k <= n; ++k)
    p[k - 1] = static_cast<double>(true_positives_at(o, static_cast<double>(k))) / static_cast<double>(k);
  if (n == 1) return p[0];
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  const double denom = static_cast<double>(n - 1);
  if (form == AucPrecisionForm::kLiteral) return total / denom;
  return (total - (p.front() + p.back()) / 2.0) / denom;
}

enum class MrocSweep { kFull, kTruncated };

struct MrocPoint {
  double x = 0.0;  // nmFPR
  double y = 0.0;  // mTPR
};

// Points (nmFPR@k, mTPR@k) for k = 1..C (full) or 1..n (truncated).
inline std::vector<MrocPoint> mroc_curve(const RankedOutcome& o, MrocSweep sweep = MrocSweep::kFull) {
  detail::require_integral(o, "AUC-mROC");
  const double n = static_cast<double>(o.positives());
  const double neg = static_cast<double>(o.negatives());
  const double ln_n = std::log1p(n);
  const double ln_neg = std::log1p(neg);
  const std::size_t last = sweep == MrocSweep::kFull ? o.candidates : o.positives();
  std::vector<MrocPoint> pts;
  pts.reserve(last);
  std::size_t tp = 0;
  for (std::size_t k = 1; k <= last; ++k) {
    while (tp < o.positives() && o.ranks[tp] <= static_cast<double>(k)) ++tp;
    const double fp = static_cast<double>(k - tp);
    const double nm_tpr = std::log1p(static_cast<double>(tp)) / ln_n;
    const double nm_fpr = std::log1p(fp) / ln_neg;
    const double expected = std::log1p(fp * n / neg) / ln_n;
    const double denom = 1.0 - expected;
    const double correction = denom == 0.0 ? 0.0 : (nm_tpr - expected) / denom;
    pts.push_back({nm_fpr, nm_fpr + correction * (1.0 - nm_fpr)});
  }
  return pts;
}

inline double auc_mroc(const RankedOutcome& o, MrocSweep sweep = MrocSweep::kFull) {
  MrocPoint prev{};
  double area = 0.0;
  for (const auto& p : mroc_curve(o, sweep)) {
    area += (p.x - prev.x) * (p.y + prev.y) / 2.0;
    prev = p;
  }
  return area;
}

}  // namespace lpdisc
