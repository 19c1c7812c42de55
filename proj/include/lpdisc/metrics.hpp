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

// Name registry for the eight evaluation metrics and a single dispatch point.

#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "lpdisc/error.hpp"
#include "lpdisc/evaluation.hpp"
#include "lpdisc/hmeasure.hpp"

namespace lpdisc {

enum class Metric { kPrecision, kMcc, kNdcg, kAuc, kAupr, kAucPrecision, kHMeasure, kAucMroc };

inline constexpr std::array<Metric, 8> kAllMetrics = {
    Metric::kPrecision, Metric::kMcc,          Metric::kNdcg,     Metric::kAuc,
    Metric::kAupr,      Metric::kAucPrecision, Metric::kHMeasure, Metric::kAucMroc,
};

inline std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::kPrecision:
      return "precision";
    case Metric::kMcc:
      return "mcc";
    case Metric::kNdcg:
      return "ndcg";
    case Metric::kAuc:
      return "auc";
    case Metric::kAupr:
      return "aupr";
    case Metric::kAucPrecision:
      return "auc_precision";
    case Metric::kHMeasure:
      return "h_measure";
    case Metric::kAucMroc:
      return "auc_mroc";
  }
  return "?";
}

// Accepts the canonical names plus case and '-' variants ("H-measure",
// "AUC-mROC").
inline Metric parse_metric(std::string_view name) {
  std::string key(name);
  for (auto& c : key) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (c == '-' || c == ' ') c = '_';
  }
  if (key == "hmeasure") key = "h_measure";
  for (Metric m : kAllMetrics)
    if (to_string(m) == key) return m;
  throw ArgumentError("unknown metric '" + std::string(name) + "'");
}

// Curve metrics consume integer ranks.
constexpr bool is_curve_metric(Metric m) {
  return m == Metric::kAupr || m == Metric::kAucPrecision || m == Metric::kHMeasure || m == Metric::kAucMroc;
}

struct MetricOptions {
  AucForm auc_form = AucForm::kExact;
  AucPrecisionForm auc_precision_form = AucPrecisionForm::kTrapezoid;
  MrocSweep mroc_sweep = MrocSweep::kFull;
  HMeasureConfig h_measure{};
  // Use alpha = pi1 + 1, beta = pi0 + 1 instead of h_measure.alpha/beta.
  bool h_measure_from_priors = false;
};

inline double evaluate(Metric m, const RankedOutcome& o, const MetricOptions& opt = {}) {
  switch (m) {
    case Metric::kPrecision:
      return precision(o);
    case Metric::kMcc:
      return mcc(o);
    case Metric::kNdcg:
      return ndcg(o);
    case Metric::kAuc:
      return auc(o, opt.auc_form);
    case Metric::kAupr:
      return aupr(o);
    case Metric::kAucPrecision:
      return auc_precision(o, opt.auc_precision_form);
    case Metric::kHMeasure:
      return h_measure(o, opt.h_measure_from_priors ? HMeasureConfig::from_priors(o) : opt.h_measure);
    case Metric::kAucMroc:
      return auc_mroc(o, opt.mroc_sweep);
  }
  return 0.0;
}

inline double evaluate(Metric m, const RankedOutcomes& o, const MetricOptions& opt = {}) {
  return evaluate(m, is_curve_metric(m) ? o.curve : o.closed_form, opt);
}

}  // namespace lpdisc
