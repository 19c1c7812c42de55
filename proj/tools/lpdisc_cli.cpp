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

// lpdisc: run discriminability experiments and evaluate link-prediction
// score files from the command line.
//
// Exit codes: 0 success, 1 runtime failure, 2 invalid configuration or usage.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "lpdisc/harness/commands.hpp"

namespace {

using namespace lpdisc;
using namespace lpdisc::harness;

std::vector<Metric> parse_metric_list(const std::vector<std::string>& names) {
  std::vector<Metric> out;
  for (const auto& raw : names) {
    std::stringstream ss(raw);
    for (std::string name; std::getline(ss, name, ',');) {
      if (name.empty()) continue;
      if (name == "all") {
        out.insert(out.end(), kAllMetrics.begin(), kAllMetrics.end());
        continue;
      }
      try {
        out.push_back(parse_metric(name));
      } catch (const ArgumentError& e) {
        throw ConfigError(std::string("--metric: ") + e.what());
      }
    }
  }
  if (out.empty()) throw ConfigError("--metric: no metric names given");
  return out;
}

// Writes to `path`, or stdout when empty.
void emit(const Table& t, const std::string& path) {
  if (path.empty()) {
    write_table(std::cout, t);
  } else {
    write_table_file(path, t);
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return in;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discriminability of link-prediction evaluation metrics", "lpdisc"};
  app.set_version_flag("--version", LPDISC_VERSION);
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run the experiment described by a config (or a results manifest)");
  std::string config_path, output_override;
  unsigned threads = 0;
  bool quiet = false;
  run->add_option("--config", config_path, "JSON config file or manifest.json")->required();
  run->add_option("--output", output_override, "Override output_dir");
  run->add_option("--threads", threads, "Override threads (0 = all cores)");
  run->add_flag("--quiet", quiet, "No progress on stderr");

  auto* metrics = app.add_subcommand("metrics", "Evaluate one score file against a positives file");
  std::string scores_path, positives_path, tie = "average", metrics_out;
  std::vector<std::string> metric_names;
  std::uint64_t tie_seed = 0;
  double h_alpha = 2.0, h_beta = 2.0;
  metrics->add_option("--scores", scores_path, "Lines 'u v score'")->required();
  metrics->add_option("--positives", positives_path, "Lines 'u v'")->required();
  metrics->add_option("--metric", metric_names, "Metric names, comma separated, or 'all'")->required();
  metrics->add_option("--tie", tie, "average | random | optimistic | pessimistic");
  metrics->add_option("--tie-seed", tie_seed, "Seed for random tie resolution");
  metrics->add_option("--h-alpha", h_alpha, "H-measure Beta alpha");
  metrics->add_option("--h-beta", h_beta, "H-measure Beta beta");
  metrics->add_option("--out", metrics_out, "Output table (default stdout)");

  auto* correlate = app.add_subcommand("correlate", "Grey correlation between discriminability tables");
  std::vector<std::string> tables;
  std::optional<double> p_star;
  double rho = 0.5;
  std::string correlate_out;
  correlate->add_option("tables", tables, "Tables with metric,d columns")->required();
  correlate->add_option("--p-star", p_star, "Threshold to select when a table holds several");
  correlate->add_option("--rho", rho, "Distinguishing coefficient");
  correlate->add_option("--out", correlate_out, "Output table (default stdout)");

  auto* report = app.add_subcommand("report", "Write p* curves and rank tables for a results directory");
  std::string report_dir;
  report->add_option("dir", report_dir, "Directory written by 'run'")->required();

  auto* generate = app.add_subcommand("generate", "Write a synthetic edge list");
  std::string model, generate_out;
  std::size_t n = 0, m = 0;
  std::uint64_t seed = 0;
  generate->add_option("--model", model, "er | ba")->required();
  generate->add_option("--n", n, "Node count")->required();
  generate->add_option("--m", m, "Edge count (er) or edges per new node (ba)")->required();
  generate->add_option("--seed", seed, "Generator seed");
  generate->add_option("--out", generate_out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*run) {
      RunConfig config = load_config_file(config_path);
      if (!output_override.empty()) config.output_dir = output_override;
      if (run->count("--threads")) config.threads = threads;
      const auto result = cmd_run(config, quiet ? nullptr : &std::cerr);
      std::cout << result.output_dir << '\n';
    } else if (*metrics) {
      MetricsRequest req;
      req.metrics = parse_metric_list(metric_names);
      try {
        req.tie_policy = parse_tie_policy(tie);
        req.options.h_measure = {.alpha = h_alpha, .beta = h_beta};
        req.options.h_measure.validate();
      } catch (const ArgumentError& e) {
        throw ConfigError(e.what());
      }
      req.tie_seed = tie_seed;
      auto s = open_input(scores_path);
      auto p = open_input(positives_path);
      emit(cmd_metrics(s, p, req), metrics_out);
    } else if (*correlate) {
      std::vector<Group> groups;
      for (const auto& path : tables) groups.push_back(read_group(path, read_table_file(path), p_star));
      emit(cmd_correlate(groups, rho), correlate_out);
    } else if (*report) {
      const auto r = cmd_report(report_dir);
      std::cout << r.curve.rows.size() << " curve rows, " << r.ranks.rows.size() << " rank rows\n";
    } else if (*generate) {
      const Graph g = cmd_generate(model, n, m, seed);
      if (generate_out.empty()) {
        write_edge_list(std::cout, g);
      } else {
        std::ofstream out(generate_out);
        if (!out) throw Error("cannot write '" + generate_out + "'");
        write_edge_list(out, g);
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "lpdisc: configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "lpdisc: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
