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

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include "lpdisc/harness/config.hpp"
#include "lpdisc/harness/csv.hpp"
#include "lpdisc/harness/digest.hpp"
#include "lpdisc/lpdisc.hpp"

#ifndef LPDISC_VERSION
#define LPDISC_VERSION "0.0.0"
#endif

namespace lpdisc::harness {

namespace fs = std::filesystem;

// Data files written by cmd_run, in manifest order.
inline constexpr const char* kRunFiles[] = {"trials.csv", "summary.csv", "pvalues.csv", "discriminability.csv",
                                            "rankings.csv"};
inline constexpr const char* kManifestFile = "manifest.json";

inline Graph load_network(const NetworkSource& s) {
  Graph g = s.path.empty() ? (s.model == "er" ? generate_er(s.n, s.m, s.seed) : generate_ba(s.n, s.m, s.seed))
                           : load_edge_list_file(s.path, {.one_based = s.one_based});
  return s.largest_component ? largest_component(g) : g;
}

// ---------------------------------------------------------------------------
// run

struct RunResult {
  std::string output_dir;
  json manifest;
  std::vector<std::pair<std::string, ScoreTensor>> tensors;  // by algorithm label
};

namespace detail {

// Hash of everything that determines the numbers (not threads or location).
inline std::string config_digest(const RunConfig& c) {
  auto j = to_json(c);
  j.erase("threads");
  j.erase("output_dir");
  return sha256_string(j.dump());
}

inline std::string checkpoint_path(const std::string& dir, std::size_t algorithm) {
  return (fs::path(dir) / (".checkpoint-" + std::to_string(algorithm) + ".jsonl")).string();
}

// Trials recorded by an interrupted run with the same digest. A torn last
// line is skipped.
inline std::map<std::size_t, std::vector<double>> read_checkpoint(const std::string& path, const std::string& digest,
                                                                  std::size_t cell) {
  std::map<std::size_t, std::vector<double>> done;
  std::ifstream in(path);
  std::string line;
  if (!in || !std::getline(in, line)) return done;
  const auto head = json::parse(line, nullptr, false);
  if (head.is_discarded() || head.value("config_sha256", "") != digest) return done;
  while (std::getline(in, line)) {
    const auto j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("trial") || !j.contains("values")) continue;
    auto values = j.at("values").get<std::vector<double>>();
    if (values.size() == cell) done[j.at("trial").get<std::size_t>()] = std::move(values);
  }
  return done;
}

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace detail

inline RunResult cmd_run(const RunConfig& c, std::ostream* log = nullptr) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  fs::create_directories(c.output_dir);
  const Graph graph = load_network(c.network);
  const std::string digest = detail::config_digest(c);
  if (log)
    *log << "network: " << graph.node_count() << " nodes, " << graph.edge_count() << " edges\n";

  RunResult result;
  result.output_dir = c.output_dir;
  json timings = json::object();
  const std::size_t cell = c.plan.q_grid.size() * c.metrics.size();
  for (std::size_t a = 0; a < c.algorithms.size(); ++a) {
    const auto& entry = c.algorithms[a];
    const auto t0 = clock::now();
    const auto ckpt = detail::checkpoint_path(c.output_dir, a);
    ExperimentOptions opts;
    opts.tie_policy = c.tie_policy;
    opts.metric_options = c.metric_options;
    opts.threads = c.threads;
    opts.completed = detail::read_checkpoint(ckpt, digest, cell);
    std::ofstream out(ckpt, std::ios::trunc);
    out << json{{"config_sha256", digest}, {"algorithm", entry.label}}.dump() << '\n';
    for (const auto& [t, v] : opts.completed) out << json{{"trial", t}, {"values", v}}.dump() << '\n';
    out.flush();
    if (log && !opts.completed.empty())
      *log << entry.label << ": resuming with " << opts.completed.size() << " checkpointed trial(s)\n";
    opts.on_trial = [&](std::size_t t, const std::vector<double>& v) {
      out << json{{"trial", t}, {"values", v}}.dump() << '\n';
      out.flush();
    };
    ScoreTensor tensor;
    try {
      tensor = run_experiment(graph, entry.spec, c.metrics, c.plan, opts);
    } catch (const ExperimentError& e) {
      throw ExperimentError(e.trial(), e.q(), entry.label + ": " + e.what());
    }
    tensor.algorithm = entry.label;
    const double secs = std::chrono::duration<double>(clock::now() - t0).count();
    timings[entry.label] = secs;
    if (log) *log << entry.label << ": " << c.plan.trials << " trials in " << secs << " s\n";
    result.tensors.emplace_back(entry.label, std::move(tensor));
  }

  Table trials{{"algorithm", "trial", "seed", "q_index", "q", "metric", "value"}, {}};
  Table summary{{"algorithm", "q_index", "q", "metric", "mean", "sd"}, {}};
  Table pvalues{{"algorithm", "metric", "i", "j", "q_i", "q_j", "p"}, {}};
  Table disc{{"algorithm", "metric", "p_star", "d"}, {}};
  Table ranks{{"group", "p_star", "metric", "d", "rank"}, {}};
  const auto& q = c.plan.q_grid;
  for (const auto& [label, tensor] : result.tensors) {
    for (std::size_t t = 0; t < c.plan.trials; ++t)
      for (std::size_t i = 0; i < q.size(); ++i)
        for (std::size_t m = 0; m < c.metrics.size(); ++m)
          trials.rows.push_back({label, std::to_string(t), std::to_string(tensor.trial_seeds[t]), std::to_string(i),
                                 format_number(q[i]), std::string(to_string(c.metrics[m])),
                                 format_number(tensor.at(t, i, m))});
    for (std::size_t i = 0; i < q.size(); ++i)
      for (std::size_t m = 0; m < c.metrics.size(); ++m) {
        std::vector<double> v;
        for (std::size_t t = 0; t < c.plan.trials; ++t) v.push_back(tensor.at(t, i, m));
        summary.rows.push_back({label, std::to_string(i), format_number(q[i]), std::string(to_string(c.metrics[m])),
                                format_number(detail::mean_of(v)), format_number(detail::sd_of(v))});
      }
    std::map<double, std::vector<MetricScore>> by_pstar;
    for (std::size_t m = 0; m < c.metrics.size(); ++m) {
      const std::string name(to_string(c.metrics[m]));
      const auto p = pvalue_matrix(tensor.slice(m));
      for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < p.size(); ++j)
          pvalues.rows.push_back({label, name, std::to_string(i), std::to_string(j), format_number(q[i]),
                                  format_number(q[j]), format_number(p(i, j))});
      for (double ps : c.p_star) {
        const double d = discriminability_score(p, ps).d;
        disc.rows.push_back({label, name, format_number(ps), format_number(d)});
        by_pstar[ps].push_back({name, d});
      }
    }
    for (double ps : c.p_star)
      for (const auto& r : rank_metrics({{label, by_pstar[ps]}}))
        ranks.rows.push_back({r.group, format_number(ps), r.metric, format_number(r.d), std::to_string(r.rank)});
  }

  const Table* tables[] = {&trials, &summary, &pvalues, &disc, &ranks};
  json files = json::object();
  for (std::size_t k = 0; k < std::size(kRunFiles); ++k) {
    const auto path = (fs::path(c.output_dir) / kRunFiles[k]).string();
    write_table_file(path, *tables[k]);
    files[kRunFiles[k]] = sha256_file(path);
  }

  json seeds = json::object();
  for (const auto& [label, tensor] : result.tensors) seeds[label] = tensor.trial_seeds;
  json network = {{"nodes", graph.node_count()}, {"edges", graph.edge_count()}};
  if (!c.network.path.empty()) network["sha256"] = sha256_file(c.network.path);
  timings["total"] = std::chrono::duration<double>(clock::now() - start).count();
  result.manifest = {
      {"manifest_version", 1},
      {"lpdisc_version", LPDISC_VERSION},
      {"config", to_json(c)},
      {"config_sha256", digest},
      {"network", network},
      {"trial_seeds", seeds},
      {"files", files},
      {"timings_seconds", timings},
  };
  std::ofstream mf(fs::path(c.output_dir) / kManifestFile);
  mf << result.manifest.dump(2) << '\n';
  if (!mf) throw Error("cannot write manifest in '" + c.output_dir + "'");
  for (std::size_t a = 0; a < c.algorithms.size(); ++a) fs::remove(detail::checkpoint_path(c.output_dir, a));
  return result;
}

// ---------------------------------------------------------------------------
// metrics

struct MetricsRequest {
  std::vector<Metric> metrics;
  TiePolicy tie_policy = TiePolicy::kAverage;
  std::uint64_t tie_seed = 0;
  MetricOptions options;
};

// Positives file: "u v" per line, node labels, '#' comments.
inline std::vector<std::pair<NodeLabel, NodeLabel>> read_pair_lines(std::istream& in) {
  std::vector<std::pair<NodeLabel, NodeLabel>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = lpdisc::detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto tokens = lpdisc::detail::split_ws(body);
    if (tokens.size() != 2) throw ParseError("expected 'u v'", line_no);
    out.emplace_back(lpdisc::detail::parse_int<NodeLabel>(tokens[0], line_no),
                     lpdisc::detail::parse_int<NodeLabel>(tokens[1], line_no));
  }
  return out;
}

// Every scored pair is a candidate; the positives must be among them.
inline Table cmd_metrics(std::istream& scores, std::istream& positives, const MetricsRequest& req) {
  if (req.metrics.empty()) throw ArgumentError("no metrics requested");
  const auto lines = read_score_lines(scores);
  const auto pos = read_pair_lines(positives);
  if (pos.empty()) throw ArgumentError("positives file lists no pairs");
  if (lines.size() <= pos.size()) throw ArgumentError("score file needs at least one negative pair");

  std::vector<NodeLabel> labels;
  for (const auto& l : lines) {
    labels.push_back(l.u);
    labels.push_back(l.v);
  }
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  auto id = [&](NodeLabel x) -> std::optional<NodeId> {
    auto it = std::lower_bound(labels.begin(), labels.end(), x);
    if (it == labels.end() || *it != x) return std::nullopt;
    return static_cast<NodeId>(it - labels.begin());
  };

  std::vector<std::pair<NodePair, double>> entries;
  for (const auto& l : lines) entries.push_back({NodePair::of(*id(l.u), *id(l.v)), l.score});
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  ScoreTable table;
  table.algorithm = "scores";
  for (const auto& [p, s] : entries) {
    table.pairs.push_back(p);
    table.scores.push_back(s);
  }

  std::vector<NodePair> positive_pairs;
  for (const auto& [u, v] : pos) {
    const auto a = id(u), b = id(v);
    if (!a || !b || u == v)
      throw CoverageError("positive pair (" + std::to_string(u) + "," + std::to_string(v) + ") has no score");
    positive_pairs.push_back(NodePair::of(*a, *b));
  }
  RankedOutcomes outcomes;
  try {
    outcomes = rank_for_metrics(table, positive_pairs, req.tie_policy, req.tie_seed);
  } catch (const CoverageError&) {
    for (const auto& [u, v] : pos) {
      const auto p = NodePair::of(*id(u), *id(v));
      if (!std::binary_search(table.pairs.begin(), table.pairs.end(), p))
        throw CoverageError("positive pair (" + std::to_string(u) + "," + std::to_string(v) + ") has no score");
    }
    throw;
  }

  Table out{{"metric", "value"}, {}};
  for (Metric m : req.metrics)
    out.rows.push_back({std::string(to_string(m)), format_number(evaluate(m, outcomes, req.options))});
  return out;
}

// ---------------------------------------------------------------------------
// correlate

// One discriminability sequence per table: rows with columns "metric" and
// "d", optionally "algorithm" and "p_star". With several algorithms the d
// values are averaged per metric.
struct Group {
  std::string name;
  std::vector<std::string> metrics;
  std::vector<double> d;
};

inline Group read_group(const std::string& name, const Table& t, std::optional<double> p_star) {
  const auto mc = t.column("metric");
  const auto dc = t.column("d");
  std::optional<std::size_t> pc;
  for (std::size_t i = 0; i < t.header.size(); ++i)
    if (t.header[i] == "p_star") pc = i;
  std::set<double> thresholds;
  if (pc)
    for (const auto& r : t.rows) thresholds.insert(parse_number(r[*pc]));
  if (pc && !p_star) {
    if (thresholds.size() != 1)
      throw ArgumentError(name + ": table holds " + std::to_string(thresholds.size()) +
                          " p* values; choose one with --p-star");
    p_star = *thresholds.begin();
  }
  Group g{name, {}, {}};
  std::vector<std::size_t> counts;
  for (const auto& r : t.rows) {
    if (pc && std::abs(parse_number(r[*pc]) - *p_star) > 1e-12) continue;
    auto it = std::find(g.metrics.begin(), g.metrics.end(), r[mc]);
    if (it == g.metrics.end()) {
      g.metrics.push_back(r[mc]);
      g.d.push_back(0.0);
      counts.push_back(0);
      it = g.metrics.end() - 1;
    }
    const auto k = static_cast<std::size_t>(it - g.metrics.begin());
    g.d[k] += parse_number(r[dc]);
    ++counts[k];
  }
  if (g.metrics.empty()) throw ArgumentError(name + ": no rows at the selected p*");
  for (std::size_t k = 0; k < g.d.size(); ++k) g.d[k] /= static_cast<double>(counts[k]);
  return g;
}

inline Table cmd_correlate(const std::vector<Group>& groups, double rho = 0.5) {
  if (groups.size() < 2) throw ArgumentError("correlate needs at least two tables");
  const auto& ref = groups.front();
  std::vector<std::vector<double>> seqs;
  for (const auto& g : groups) {
    std::vector<std::string> missing, extra;
    for (const auto& m : ref.metrics)
      if (std::find(g.metrics.begin(), g.metrics.end(), m) == g.metrics.end()) missing.push_back(m);
    for (const auto& m : g.metrics)
      if (std::find(ref.metrics.begin(), ref.metrics.end(), m) == ref.metrics.end()) extra.push_back(m);
    if (!missing.empty() || !extra.empty()) {
      auto join = [](const std::vector<std::string>& v) {
        std::string s;
        for (const auto& x : v) s += (s.empty() ? "" : " ") + x;
        return s.empty() ? std::string("none") : s;
      };
      throw ArgumentError("metric sets differ between '" + ref.name + "' and '" + g.name + "': missing [" +
                          join(missing) + "], extra [" + join(extra) + "]");
    }
    std::vector<double> seq;
    for (const auto& m : ref.metrics)
      seq.push_back(g.d[static_cast<std::size_t>(std::find(g.metrics.begin(), g.metrics.end(), m) - g.metrics.begin())]);
    seqs.push_back(std::move(seq));
  }
  const auto r = grey_matrix(seqs, rho);
  Table out{{"group"}, {}};
  for (const auto& g : groups) out.header.push_back(g.name);
  for (std::size_t i = 0; i < groups.size(); ++i) {
    std::vector<std::string> row{groups[i].name};
    for (std::size_t j = 0; j < groups.size(); ++j) row.push_back(format_number(r[i][j]));
    out.rows.push_back(std::move(row));
  }
  return out;
}

// ---------------------------------------------------------------------------
// report

struct ReportResult {
  Table curve;  // metric, p_star, d averaged over algorithms
  Table ranks;  // group, p_star, metric, d, rank
};

// Reads a completed run directory; files must match the manifest checksums.
inline ReportResult cmd_report(const std::string& dir) {
  const auto mpath = fs::path(dir) / kManifestFile;
  if (!fs::is_directory(dir)) throw Error("no results directory '" + dir + "'");
  std::ifstream in(mpath);
  if (!in) throw Error("'" + dir + "' has no " + kManifestFile + " (incomplete run?)");
  const auto manifest = json::parse(in, nullptr, false);
  if (manifest.is_discarded() || !manifest.contains("files")) throw Error(mpath.string() + ": unreadable manifest");
  for (const char* f : kRunFiles) {
    const auto path = (fs::path(dir) / f).string();
    if (!fs::is_regular_file(path)) throw Error("'" + dir + "' is missing " + f);
    if (manifest["files"].value(f, "") != sha256_file(path))
      throw Error(std::string(f) + " does not match the manifest checksum");
  }
  const Table disc = read_table_file((fs::path(dir) / "discriminability.csv").string());
  const auto ac = disc.column("algorithm"), mc = disc.column("metric"), pc = disc.column("p_star"),
             dc = disc.column("d");

  // Keys in first-seen order so the output follows the run's ordering.
  std::vector<std::string> metrics, thresholds, algorithms;
  auto index = [](std::vector<std::string>& v, const std::string& x) {
    auto it = std::find(v.begin(), v.end(), x);
    if (it == v.end()) {
      v.push_back(x);
      return v.size() - 1;
    }
    return static_cast<std::size_t>(it - v.begin());
  };
  std::map<std::pair<std::size_t, std::size_t>, std::pair<double, std::size_t>> sums;
  for (const auto& r : disc.rows) {
    index(algorithms, r[ac]);
    const auto m = index(metrics, r[mc]);
    const auto p = index(thresholds, r[pc]);
    auto& s = sums[{m, p}];
    s.first += parse_number(r[dc]);
    ++s.second;
  }

  ReportResult out;
  out.curve = {{"metric", "p_star", "d"}, {}};
  for (std::size_t m = 0; m < metrics.size(); ++m)
    for (std::size_t p = 0; p < thresholds.size(); ++p) {
      const auto& s = sums.at({m, p});
      out.curve.rows.push_back({metrics[m], thresholds[p], format_number(s.first / static_cast<double>(s.second))});
    }

  out.ranks = {{"group", "p_star", "metric", "d", "rank"}, {}};
  std::vector<std::pair<std::string, std::vector<MetricScore>>> groups;
  for (std::size_t p = 0; p < thresholds.size(); ++p) {
    groups.clear();
    for (const auto& a : algorithms) {
      std::vector<MetricScore> scores;
      for (const auto& r : disc.rows)
        if (r[ac] == a && r[pc] == thresholds[p]) scores.push_back({r[mc], parse_number(r[dc])});
      groups.emplace_back(a, std::move(scores));
    }
    std::vector<MetricScore> mean;
    for (std::size_t m = 0; m < metrics.size(); ++m) {
      const auto& s = sums.at({m, p});
      mean.push_back({metrics[m], s.first / static_cast<double>(s.second)});
    }
    groups.emplace_back("mean", std::move(mean));
    for (const auto& r : rank_metrics(groups))
      out.ranks.rows.push_back({r.group, thresholds[p], r.metric, format_number(r.d), std::to_string(r.rank)});
  }
  write_table_file((fs::path(dir) / "report_curve.csv").string(), out.curve);
  write_table_file((fs::path(dir) / "report_ranks.csv").string(), out.ranks);
  return out;
}

// ---------------------------------------------------------------------------
// generate

inline Graph cmd_generate(const std::string& model, std::size_t n, std::size_t m, std::uint64_t seed) {
  if (model == "er") return generate_er(n, m, seed);
  if (model == "ba") return generate_ba(n, m, seed);
  throw ArgumentError("unknown model '" + model + "' (expected er or ba)");
}

}  // namespace lpdisc::harness
