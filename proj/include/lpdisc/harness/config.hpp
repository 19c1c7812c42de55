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

// Run configuration: a JSON document. Relative paths resolve against the
// directory holding the config file. Unknown keys are rejected so typos
// surface as configuration errors.

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include "lpdisc/error.hpp"
#include "lpdisc/experiment.hpp"

namespace lpdisc::harness {

using json = nlohmann::json;

// Invalid or inconsistent configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct NetworkSource {
  // Either an edge-list path or a generator.
  std::string path;
  bool one_based = false;
  std::string model;  // "er" | "ba"
  std::size_t n = 0;
  std::size_t m = 0;
  std::uint64_t seed = 0;
  bool largest_component = false;
};

struct AlgorithmEntry {
  std::string label;
  AlgorithmSpec spec;
};

struct RunConfig {
  NetworkSource network;
  std::vector<AlgorithmEntry> algorithms;
  std::vector<Metric> metrics;
  TrialPlan plan;
  std::vector<double> p_star{0.01};
  TiePolicy tie_policy = TiePolicy::kAverage;
  MetricOptions metric_options;
  unsigned threads = 0;
  std::string output_dir = "results";
};

namespace detail {

inline void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
T get(const json& obj, const char* key, const std::string& where, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

template <typename Parse>
auto parse_enum(const json& obj, const char* key, const std::string& where, Parse parse, std::string fallback) {
  const auto name = get<std::string>(obj, key, where, std::move(fallback));
  try {
    return parse(name);
  } catch (const ArgumentError& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

inline std::string resolve_path(const std::string& p, const std::filesystem::path& base) {
  if (p.empty()) return p;
  const std::filesystem::path path(p);
  return (path.is_absolute() ? path : base / path).lexically_normal().string();
}

inline AucForm parse_auc_form(std::string_view s) {
  if (s == "exact") return AucForm::kExact;
  if (s == "approximate") return AucForm::kApproximate;
  throw ArgumentError("unknown AUC form '" + std::string(s) + "'");
}

inline AucPrecisionForm parse_auc_precision_form(std::string_view s) {
  if (s == "trapezoid") return AucPrecisionForm::kTrapezoid;
  if (s == "literal") return AucPrecisionForm::kLiteral;
  throw ArgumentError("unknown AUC-Precision form '" + std::string(s) + "'");
}

inline MrocSweep parse_mroc_sweep(std::string_view s) {
  if (s == "full") return MrocSweep::kFull;
  if (s == "truncated") return MrocSweep::kTruncated;
  throw ArgumentError("unknown mROC sweep '" + std::string(s) + "'");
}

inline NetworkSource parse_network(const json& j, const std::filesystem::path& base) {
  const std::string where = "network";
  check_keys(j, where, {"path", "one_based", "model", "n", "m", "seed", "largest_component"});
  NetworkSource s;
  s.path = resolve_path(get<std::string>(j, "path", where, ""), base);
  s.one_based = get<bool>(j, "one_based", where, false);
  s.model = get<std::string>(j, "model", where, "");
  s.n = get<std::size_t>(j, "n", where, 0);
  s.m = get<std::size_t>(j, "m", where, 0);
  s.seed = get<std::uint64_t>(j, "seed", where, 0);
  s.largest_component = get<bool>(j, "largest_component", where, false);
  if (s.path.empty() == s.model.empty()) throw ConfigError(where + ": give exactly one of 'path' or 'model'");
  if (!s.path.empty() && !std::filesystem::is_regular_file(s.path))
    throw ConfigError(where + ".path: no such file '" + s.path + "'");
  if (!s.model.empty() && s.model != "er" && s.model != "ba")
    throw ConfigError(where + ".model: expected 'er' or 'ba', got '" + s.model + "'");
  return s;
}

inline AlgorithmEntry parse_algorithm(const json& j, std::size_t index, const std::filesystem::path& base) {
  const std::string where = "algorithms[" + std::to_string(index) + "]";
  AlgorithmEntry a;
  if (j.is_string()) {
    try {
      a.spec.kind = parse_algorithm_kind(j.get<std::string>());
    } catch (const ArgumentError& e) {
      throw ConfigError(where + ": " + e.what());
    }
    a.label = a.spec.name();
    return a;
  }
  check_keys(j, where,
             {"name", "label", "beta", "simrank_decay", "simrank_iterations", "simrank_tolerance", "ra_l3_sqrt",
              "walk_steps", "dense_node_cap", "path"});
  if (!j.contains("name")) throw ConfigError(where + ": missing 'name'");
  a.spec.kind = parse_enum(j, "name", where, parse_algorithm_kind, "");
  auto& s = a.spec;
  if (j.contains("beta")) s.katz_beta = get<double>(j, "beta", where, 0.0);
  s.simrank_decay = get(j, "simrank_decay", where, s.simrank_decay);
  s.simrank_iterations = get(j, "simrank_iterations", where, s.simrank_iterations);
  s.simrank_tolerance = get(j, "simrank_tolerance", where, s.simrank_tolerance);
  s.ra_l3_sqrt = get(j, "ra_l3_sqrt", where, s.ra_l3_sqrt);
  s.walk_steps = get(j, "walk_steps", where, s.walk_steps);
  s.dense_node_cap = get(j, "dense_node_cap", where, s.dense_node_cap);
  s.external_path = resolve_path(get<std::string>(j, "path", where, ""), base);
  a.label = get<std::string>(j, "label", where, s.name());
  try {
    s.validate();
  } catch (const ArgumentError& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return a;
}

}  // namespace detail

inline RunConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  detail::check_keys(j, "config",
                     {"network", "algorithms", "metrics", "q_grid", "trials", "master_seed", "retention_mode",
                      "test_fraction", "p_star", "tie_policy", "metric_options", "threads", "output_dir"});
  RunConfig c;
  if (!j.contains("network")) throw ConfigError("config: missing 'network'");
  c.network = detail::parse_network(j.at("network"), base_dir);

  if (!j.contains("algorithms") || !j.at("algorithms").is_array() || j.at("algorithms").empty())
    throw ConfigError("algorithms: need a non-empty list");
  std::set<std::string> labels;
  for (std::size_t i = 0; i < j.at("algorithms").size(); ++i) {
    auto a = detail::parse_algorithm(j.at("algorithms")[i], i, base_dir);
    if (!labels.insert(a.label).second)
      throw ConfigError("algorithms[" + std::to_string(i) + "]: duplicate label '" + a.label + "'");
    c.algorithms.push_back(std::move(a));
  }

  if (!j.contains("metrics")) throw ConfigError("metrics: missing");
  const auto& metrics = j.at("metrics");
  if (metrics.is_string() && metrics.get<std::string>() == "all") {
    c.metrics.assign(kAllMetrics.begin(), kAllMetrics.end());
  } else {
    if (!metrics.is_array() || metrics.empty()) throw ConfigError("metrics: need a non-empty list or \"all\"");
    for (std::size_t i = 0; i < metrics.size(); ++i) {
      const std::string where = "metrics[" + std::to_string(i) + "]";
      if (!metrics[i].is_string()) throw ConfigError(where + ": expected a metric name");
      Metric m;
      try {
        m = parse_metric(metrics[i].get<std::string>());
      } catch (const ArgumentError& e) {
        throw ConfigError(where + ": " + e.what());
      }
      if (std::find(c.metrics.begin(), c.metrics.end(), m) != c.metrics.end())
        throw ConfigError(where + ": duplicate metric '" + std::string(to_string(m)) + "'");
      c.metrics.push_back(m);
    }
  }

  const std::string top = "config";
  c.plan.q_grid = detail::get(j, "q_grid", top, c.plan.q_grid);
  c.plan.trials = detail::get(j, "trials", top, c.plan.trials);
  c.plan.master_seed = detail::get(j, "master_seed", top, c.plan.master_seed);
  c.plan.mode = detail::parse_enum(j, "retention_mode", top, parse_retention_mode, "independent");
  c.plan.test_fraction = detail::get(j, "test_fraction", top, c.plan.test_fraction);
  try {
    c.plan.validate();
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("plan: ") + e.what());
  }

  c.p_star = detail::get(j, "p_star", top, c.p_star);
  if (c.p_star.empty()) throw ConfigError("p_star: need at least one threshold");
  for (double t : c.p_star)
    if (!(t > 0.0 && t <= 1.0)) throw ConfigError("p_star: " + lpdisc::detail::format_real(t) + " not in (0,1]");

  c.tie_policy = detail::parse_enum(j, "tie_policy", top, parse_tie_policy, "average");
  c.threads = detail::get(j, "threads", top, c.threads);
  c.output_dir = detail::resolve_path(detail::get<std::string>(j, "output_dir", top, c.output_dir), base_dir);

  if (j.contains("metric_options")) {
    const auto& o = j.at("metric_options");
    const std::string where = "metric_options";
    detail::check_keys(o, where,
                       {"auc_form", "auc_precision_form", "mroc_sweep", "h_measure_alpha", "h_measure_beta",
                        "h_measure_from_priors"});
    auto& m = c.metric_options;
    m.auc_form = detail::parse_enum(o, "auc_form", where, detail::parse_auc_form, "exact");
    m.auc_precision_form =
        detail::parse_enum(o, "auc_precision_form", where, detail::parse_auc_precision_form, "trapezoid");
    m.mroc_sweep = detail::parse_enum(o, "mroc_sweep", where, detail::parse_mroc_sweep, "full");
    m.h_measure.alpha = detail::get(o, "h_measure_alpha", where, m.h_measure.alpha);
    m.h_measure.beta = detail::get(o, "h_measure_beta", where, m.h_measure.beta);
    m.h_measure_from_priors = detail::get(o, "h_measure_from_priors", where, false);
    try {
      m.h_measure.validate();
    } catch (const ArgumentError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }

  // Every external score file the plan will read must exist up front.
  for (const auto& a : c.algorithms) {
    if (a.spec.kind != AlgorithmKind::kExternal) continue;
    for (std::size_t t = 0; t < c.plan.trials; ++t)
      for (std::size_t i = 0; i < c.plan.q_grid.size(); ++i) {
        const auto path = expand_score_path(a.spec.external_path, t, i);
        if (!std::filesystem::is_regular_file(path))
          throw ConfigError("algorithms (" + a.label + "): no such score file '" + path + "'");
      }
  }
  return c;
}

namespace detail {

inline std::string_view to_string(AucForm f) { return f == AucForm::kExact ? "exact" : "approximate"; }
inline std::string_view to_string(AucPrecisionForm f) {
  return f == AucPrecisionForm::kTrapezoid ? "trapezoid" : "literal";
}
inline std::string_view to_string(MrocSweep s) { return s == MrocSweep::kFull ? "full" : "truncated"; }

}  // namespace detail

// Fully resolved form: every default spelled out, paths absolute. Parsing
// this document back yields the same configuration.
inline json to_json(const RunConfig& c) {
  json net = json::object();
  if (!c.network.path.empty()) {
    net["path"] = c.network.path;
    net["one_based"] = c.network.one_based;
  } else {
    net["model"] = c.network.model;
    net["n"] = c.network.n;
    net["m"] = c.network.m;
    net["seed"] = c.network.seed;
  }
  net["largest_component"] = c.network.largest_component;

  json algs = json::array();
  for (const auto& a : c.algorithms) {
    const auto& s = a.spec;
    json e = {{"name", s.name()}, {"label", a.label}};
    switch (s.kind) {
      case AlgorithmKind::kKatz:
        if (s.katz_beta) e["beta"] = *s.katz_beta;
        e["dense_node_cap"] = s.dense_node_cap;
        break;
      case AlgorithmKind::kMFI:
        e["dense_node_cap"] = s.dense_node_cap;
        break;
      case AlgorithmKind::kSimRank:
        e["simrank_decay"] = s.simrank_decay;
        e["simrank_iterations"] = s.simrank_iterations;
        e["simrank_tolerance"] = s.simrank_tolerance;
        e["dense_node_cap"] = s.dense_node_cap;
        break;
      case AlgorithmKind::kRAL3:
        e["ra_l3_sqrt"] = s.ra_l3_sqrt;
        break;
      case AlgorithmKind::kLRW:
      case AlgorithmKind::kSRW:
        e["walk_steps"] = s.walk_steps;
        break;
      case AlgorithmKind::kExternal:
        e["path"] = s.external_path;
        break;
      default:
        break;
    }
    algs.push_back(std::move(e));
  }

  json metrics = json::array();
  for (Metric m : c.metrics) metrics.push_back(std::string(to_string(m)));

  const auto& m = c.metric_options;
  return {
      {"network", net},
      {"algorithms", algs},
      {"metrics", metrics},
      {"q_grid", c.plan.q_grid},
      {"trials", c.plan.trials},
      {"master_seed", c.plan.master_seed},
      {"retention_mode", std::string(to_string(c.plan.mode))},
      {"test_fraction", c.plan.test_fraction},
      {"p_star", c.p_star},
      {"tie_policy", std::string(to_string(c.tie_policy))},
      {"metric_options",
       {{"auc_form", std::string(detail::to_string(m.auc_form))},
        {"auc_precision_form", std::string(detail::to_string(m.auc_precision_form))},
        {"mroc_sweep", std::string(detail::to_string(m.mroc_sweep))},
        {"h_measure_alpha", m.h_measure.alpha},
        {"h_measure_beta", m.h_measure.beta},
        {"h_measure_from_priors", m.h_measure_from_priors}}},
      {"threads", c.threads},
      {"output_dir", c.output_dir},
  };
}

// Reads a config file, or a results manifest (its embedded config).
inline RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (j.is_object() && j.contains("manifest_version")) {
    if (!j.contains("config")) throw ConfigError(path + ": manifest has no 'config'");
    j = j.at("config");
  }
  const auto base = std::filesystem::absolute(path).parent_path();
  return parse_config(j, base);
}

}  // namespace lpdisc::harness
