// Copyright 2026 The privmarket Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: strategy, analytics, simulate, ingest-check.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "privmarket/analytics.h"
#include "privmarket/config.h"
#include "privmarket/graph.h"
#include "privmarket/sim.h"
#include "privmarket/strategy.h"

namespace privmarket {
namespace {

namespace fs = std::filesystem;

// 0 = errors only, 1 = progress, 2 = detail.
int LogLevel() {
  const char* env = std::getenv("PRIVMARKET_LOG");
  if (env == nullptr) return 1;
  const std::string v = env;
  if (v == "0" || v == "quiet" || v == "error") return 0;
  if (v == "2" || v == "debug") return 2;
  return 1;
}

void Log(int level, const std::string& message) {
  if (level <= LogLevel()) std::cerr << "[privmarket] " << message << "\n";
}

struct CommonFlags {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<int64_t> trials;
  std::optional<int> workers;
  std::optional<std::string> out;
  std::vector<std::string> overrides;
};

absl::StatusOr<RunConfig> ResolveConfig(const CommonFlags& flags) {
  RunConfig config;
  if (!flags.config_path.empty()) {
    std::ifstream in(flags.config_path);
    if (!in) {
      return absl::NotFoundError(
          absl::StrCat("cannot open config '", flags.config_path, "'"));
    }
    std::stringstream text;
    text << in.rdbuf();
    absl::StatusOr<RunConfig> parsed = ParseRunConfig(text.str());
    if (!parsed.ok()) return parsed.status();
    config = *parsed;
  }
  for (const std::string& o : flags.overrides) {
    if (absl::Status s = ApplyOverride(config, o); !s.ok()) return s;
  }
  // Dedicated flags win over both the file and --set.
  if (flags.seed) config.seed = *flags.seed;
  if (flags.trials) config.trials = *flags.trials;
  if (flags.workers) config.workers = *flags.workers;
  if (flags.out) config.out = *flags.out;
  if (absl::Status s = ValidateRunConfig(config); !s.ok()) return s;
  Log(2, "resolved config:\n" + SerializeRunConfig(config));
  return config;
}

// Files are written to a temporary name and renamed once every output of
// the command is complete; on failure nothing partial is left behind.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}
  ~OutputSet() {
    if (!committed_) {
      std::error_code ec;
      for (const fs::path& p : temps_) fs::remove(p, ec);
    }
  }

  absl::Status Add(const std::string& name, const std::string& content) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) {
      return absl::PermissionDeniedError(absl::StrCat(
          "cannot create output directory '", dir_.string(), "': ",
          ec.message()));
    }
    const fs::path final_path = dir_ / name;
    const fs::path temp = dir_ / (name + ".partial");
    temps_.push_back(temp);
    finals_.push_back(final_path);
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    out << content;
    out.close();
    if (!out) {
      return absl::DataLossError(
          absl::StrCat("failed writing '", temp.string(), "'"));
    }
    return absl::OkStatus();
  }

  absl::Status Commit() {
    for (size_t i = 0; i < temps_.size(); ++i) {
      std::error_code ec;
      fs::rename(temps_[i], finals_[i], ec);
      if (ec) {
        for (size_t j = 0; j < i; ++j) fs::remove(finals_[j], ec);
        return absl::DataLossError(absl::StrCat(
            "cannot move output into place: '", finals_[i].string(), "'"));
      }
      Log(1, "wrote " + finals_[i].string());
    }
    committed_ = true;
    return absl::OkStatus();
  }

 private:
  fs::path dir_;
  std::vector<fs::path> temps_;
  std::vector<fs::path> finals_;
  bool committed_ = false;
};

bool WantsFormat(const RunConfig& c, const std::string& fmt) {
  for (absl::string_view part : absl::StrSplit(c.formats, ',')) {
    if (absl::StripAsciiWhitespace(part) == fmt) return true;
  }
  return false;
}

// Degree distribution for the closed forms: exact for the configuration
// model, empirical for generated or ingested graphs.
absl::StatusOr<DegreeDistribution> AnalyticDistribution(
    const RunConfig& c, const Scenario& sc) {
  if (sc.graph.kind == GraphSpec::Kind::kConfigurationModel) {
    return ParseDegreeDistribution(c.degree_dist);
  }
  absl::StatusOr<std::shared_ptr<const Graph>> g =
      BuildGraph(sc.graph, static_cast<size_t>(c.population), c.seed);
  if (!g.ok()) return g.status();
  return DegreeDistribution::FromGraph(**g);
}

absl::Status CmdStrategy(const CommonFlags& flags) {
  absl::StatusOr<RunConfig> c = ResolveConfig(flags);
  if (!c.ok()) return c.status();
  absl::StatusOr<Scenario> sc = BuildScenario(*c);
  if (!sc.ok()) return sc.status();
  size_t d_max = 0;
  if (c->d_max >= 0) {
    d_max = static_cast<size_t>(c->d_max);
  } else {
    absl::StatusOr<DegreeDistribution> dist = AnalyticDistribution(*c, *sc);
    if (!dist.ok()) return dist.status();
    d_max = dist->max_degree();
  }
  StrategyTable table;
  if (c->strategy == "nd") {
    table = BuildNdTable(d_max);
  } else {
    absl::StatusOr<StrategyTable> mv = BuildMvTable(d_max, sc->params);
    if (!mv.ok()) return mv.status();
    table = *std::move(mv);
  }
  std::ostringstream csv;
  WriteStrategyTable(csv, table);
  OutputSet out(c->out);
  if (absl::Status s = out.Add("strategy.csv", csv.str()); !s.ok()) return s;
  return out.Commit();
}

absl::Status CmdAnalytics(const CommonFlags& flags) {
  absl::StatusOr<RunConfig> c = ResolveConfig(flags);
  if (!c.ok()) return c.status();
  absl::StatusOr<Scenario> sc = BuildScenario(*c);
  if (!sc.ok()) return sc.status();
  absl::StatusOr<DegreeDistribution> dist = AnalyticDistribution(*c, *sc);
  if (!dist.ok()) return dist.status();
  absl::StatusOr<KeyValueReport> report =
      BuildAnalyticReport(sc->params, *dist, c->target_error);
  if (!report.ok()) return report.status();
  std::ostringstream text;
  report->Write(text);
  std::cout << text.str();
  OutputSet out(c->out);
  if (absl::Status s = out.Add("analytics.txt", text.str()); !s.ok()) return s;
  return out.Commit();
}

absl::Status CmdSimulate(const CommonFlags& flags) {
  absl::StatusOr<RunConfig> c = ResolveConfig(flags);
  if (!c.ok()) return c.status();
  absl::StatusOr<Scenario> sc = BuildScenario(*c);
  if (!sc.ok()) return sc.status();
  absl::StatusOr<SweepAxis> axis = ParseSweepAxis(c->sweep_axis);
  if (!axis.ok()) return axis.status();

  std::vector<SweepRow> rows;
  if (*axis == SweepAxis::kNone) {
    absl::StatusOr<std::shared_ptr<const Graph>> graph = BuildGraph(
        sc->graph, static_cast<size_t>(c->population), c->seed);
    if (!graph.ok()) return graph.status();
    Log(1, absl::StrCat("graph: ", (*graph)->node_count(), " nodes, ",
                        (*graph)->edge_count(), " edges"));
    absl::StatusOr<Market> market =
        BuildMarket(sc->params, *graph, sc->market);
    if (!market.ok()) return market.status();
    absl::StatusOr<SimResult> r =
        RunExperiment(*market, c->trials, c->workers, c->seed);
    if (!r.ok()) return r.status();
    rows.push_back({0.0, *std::move(r)});
  } else {
    Log(1, absl::StrCat("sweeping ", c->sweep_axis, " over ",
                        c->sweep_values.size(), " values"));
    absl::StatusOr<std::vector<SweepRow>> swept =
        Sweep(*sc, *axis, c->sweep_values, c->trials, c->workers);
    if (!swept.ok()) return swept.status();
    rows = *std::move(swept);
  }

  OutputSet out(c->out);
  if (WantsFormat(*c, "csv")) {
    std::ostringstream csv;
    WriteResultsCsv(csv, rows, *axis != SweepAxis::kNone);
    if (absl::Status s = out.Add("results.csv", csv.str()); !s.ok()) return s;
  }
  if (WantsFormat(*c, "json")) {
    if (absl::Status s = out.Add("manifest.json", RunManifestJson(*c, rows));
        !s.ok()) {
      return s;
    }
  }
  return out.Commit();
}

absl::Status CmdIngestCheck(const CommonFlags& flags,
                            const std::string& path_arg) {
  absl::StatusOr<RunConfig> c = [&]() -> absl::StatusOr<RunConfig> {
    CommonFlags f = flags;
    if (!path_arg.empty()) {
      f.overrides.push_back("graph=edge-list");
      f.overrides.push_back("edge_list=" + path_arg);
    }
    return ResolveConfig(f);
  }();
  if (!c.ok()) return c.status();
  if (c->edge_list.empty()) {
    return absl::InvalidArgumentError(
        "ingest-check needs an edge list (positional path or edge_list key)");
  }
  std::ifstream in(c->edge_list);
  if (!in) {
    return absl::NotFoundError(
        absl::StrCat("cannot open edge list '", c->edge_list, "'"));
  }
  IngestOptions opts;
  opts.symmetrize = c->symmetrize;
  absl::StatusOr<IngestResult> r = IngestEdgeList(in, opts);
  if (!r.ok()) return r.status();
  const SparsityReport sparsity = CheckSparsity(r->graph);
  KeyValueReport report;
  report.AddText("file", c->edge_list);
  report.AddText("symmetrize", c->symmetrize ? "true" : "false");
  report.Add("nodes", static_cast<double>(r->graph.node_count()));
  report.Add("edges", static_cast<double>(r->graph.edge_count()));
  report.Add("lines_read", static_cast<double>(r->lines_read));
  report.Add("self_loops_dropped", static_cast<double>(r->self_loops_dropped));
  report.Add("duplicates_collapsed",
             static_cast<double>(r->duplicates_collapsed));
  report.Add("unreciprocated_dropped",
             static_cast<double>(r->unreciprocated_dropped));
  report.Add("d_max", static_cast<double>(sparsity.d_max));
  report.Add("n_quarter", sparsity.n_quarter);
  report.Add("d_max_over_n_quarter", sparsity.ratio);
  report.Add("moment_2_5", sparsity.moment_2_5);
  report.AddText("sparsity_flagged", sparsity.flagged ? "true" : "false");
  std::ostringstream text;
  report.Write(text);
  std::cout << text.str();
  OutputSet out(c->out);
  if (absl::Status s = out.Add("ingest.txt", text.str()); !s.ok()) return s;
  return out.Commit();
}

void AddCommonFlags(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config_path, "Run configuration file");
  app->add_option("--seed", f.seed, "Master seed");
  app->add_option("--trials", f.trials, "Monte Carlo trials");
  app->add_option("--workers", f.workers, "Worker threads (0 = all cores)");
  app->add_option("--out", f.out, "Output directory");
  app->add_option("--set", f.overrides, "Override KEY=VALUE (repeatable)")
      ->take_all()
      ->allow_extra_args(false);
}

int Main(int argc, char** argv) {
  CLI::App app{"Simulate and analyze a private data market on a social graph"};
  app.require_subcommand(1);
  CommonFlags flags;
  std::string path_arg;

  CLI::App* strategy = app.add_subcommand(
      "strategy", "Export the equilibrium strategy table");
  CLI::App* analytics =
      app.add_subcommand("analytics", "Closed-form moments and payments");
  CLI::App* simulate =
      app.add_subcommand("simulate", "Monte Carlo run or parameter sweep");
  CLI::App* ingest = app.add_subcommand(
      "ingest-check", "Ingest an edge list and report sparsity");
  for (CLI::App* sub : {strategy, analytics, simulate, ingest}) {
    AddCommonFlags(sub, flags);
  }
  ingest->add_option("path", path_arg, "Edge list file");

  CLI11_PARSE(app, argc, argv);

  absl::Status status;
  if (strategy->parsed()) {
    status = CmdStrategy(flags);
  } else if (analytics->parsed()) {
    status = CmdAnalytics(flags);
  } else if (simulate->parsed()) {
    status = CmdSimulate(flags);
  } else if (ingest->parsed()) {
    status = CmdIngestCheck(flags, path_arg);
  }
  if (!status.ok()) {
    std::cerr << "error: " << status.message() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace
}  // namespace privmarket

int main(int argc, char** argv) { return privmarket::Main(argc, argv); }
