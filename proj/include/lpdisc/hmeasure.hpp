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

// H-measure: expected minimum misclassification loss under a Beta(alpha, beta)
// distribution of the cost ratio, relative to the loss of the best trivial
// classifier.
//
// Positives (missing links) are class 1 with prior pi1 = n/C, negatives are
// class 0 with pi0 = |U-E|/C. Classifying the top k candidates as class 1
// costs, at cost ratio c,
//     Q_k(c) = c * pi0 * FPR_k + (1 - c) * pi1 * (1 - TPR_k).
// The pointwise minimum over k is attained on the upper convex hull of the ROC
// points, and each hull vertex is optimal on an interval of c bounded by the
// switching ratios of its two hull segments. On each interval the integral of
// Q against the Beta density reduces to regularized incomplete Beta values.

#include <cmath>
#include <string>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "lpdisc/error.hpp"
#include "lpdisc/evaluation.hpp"

namespace lpdisc {

struct HMeasureConfig {
  double alpha = 2.0;
  double beta = 2.0;

  // alpha = pi1 + 1, beta = pi0 + 1.
  static HMeasureConfig from_priors(const RankedOutcome& o) {
    const double c = static_cast<double>(o.candidates);
    return {static_cast<double>(o.positives()) / c + 1.0, static_cast<double>(o.negatives()) / c + 1.0};
  }

  void validate() const {
    if (!(alpha > 0.0) || !(beta > 0.0))
      throw ArgumentError("H-measure Beta parameters must be positive (alpha=" + std::to_string(alpha) +
                          ", beta=" + std::to_string(beta) + ")");
  }
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

// All C+1 operating points of the ranking, from (0,0) to (1,1).
inline std::vector<RocPoint> roc_points(const RankedOutcome& o) {
  detail::require_integral(o, "ROC");
  const double n = static_cast<double>(o.positives());
  const double neg = static_cast<double>(o.negatives());
  std::vector<RocPoint> pts;
  pts.reserve(o.candidates + 1);
  pts.push_back({0.0, 0.0});
  std::size_t tp = 0;
  for (std::size_t k = 1; k <= o.candidates; ++k) {
    if (tp < o.positives() && o.ranks[tp] == static_cast<double>(k)) ++tp;
    pts.push_back({static_cast<double>(k - tp) / neg, static_cast<double>(tp) / n});
  }
  return pts;
}

// Upper convex hull of points sorted by fpr (then tpr), collinear points
// dropped. Monotone chain.
inline std::vector<RocPoint> roc_upper_hull(const std::vector<RocPoint>& pts) {
  std::vector<RocPoint> hull;
  for (const auto& p : pts) {
    while (hull.size() >= 2) {
      const auto& o = hull[hull.size() - 2];
      const auto& a = hull.back();
      const double cross = (a.fpr - o.fpr) * (p.tpr - o.tpr) - (a.tpr - o.tpr) * (p.fpr - o.fpr);
      if (cross >= 0.0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(p);
  }
  return hull;
}

namespace detail {

// Integral over [a, b] of c * Beta(c; alpha, beta) dc and of (1 - c) * Beta.
inline double beta_first_moment(double alpha, double beta, double a, double b) {
  return alpha / (alpha + beta) *
         (boost::math::ibeta(alpha + 1.0, beta, b) - boost::math::ibeta(alpha + 1.0, beta, a));
}
inline double beta_complement_moment(double alpha, double beta, double a, double b) {
  return beta / (alpha + beta) *
         (boost::math::ibeta(alpha, beta + 1.0, b) - boost::math::ibeta(alpha, beta + 1.0, a));
}

}  // namespace detail

inline double h_measure(const RankedOutcome& o, const HMeasureConfig& config = {}) {
  config.validate();
  const double pi1 = static_cast<double>(o.positives()) / static_cast<double>(o.candidates);
  const double pi0 = 1.0 - pi1;
  const double a = config.alpha, b = config.beta;

  const auto hull = roc_upper_hull(roc_points(o));
  // Vertex j is optimal for c in [switch[j], switch[j-1]]; switch[-1] = 1 and
  // switch[last] = 0.
  double loss = 0.0;
  double upper = 1.0;
  for (std::size_t j = 0; j < hull.size(); ++j) {
    double lower = 0.0;
    if (j + 1 < hull.size()) {
      const double dx = hull[j + 1].fpr - hull[j].fpr;
      const double dy = hull[j + 1].tpr - hull[j].tpr;
      lower = pi1 * dy / (pi0 * dx + pi1 * dy);
    }
    lower = std::min(lower, upper);
    if (upper > lower) {
      loss += pi0 * hull[j].fpr * detail::beta_first_moment(a, b, lower, upper) +
              pi1 * (1.0 - hull[j].tpr) * detail::beta_complement_moment(a, b, lower, upper);
    }
    upper = lower;
  }
  const double max_loss = pi0 * detail::beta_first_moment(a, b, 0.0, pi1) +
                          pi1 * detail::beta_complement_moment(a, b, pi1, 1.0);
  return 1.0 - loss / max_loss;
}

}  // namespace lpdisc
