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

#ifndef PRIVMARKET_CONFIG_H_
#define PRIVMARKET_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "privmarket/model.h"
#include "privmarket/sim.h"

namespace privmarket {

inline constexpr char kVersion[] = "0.1.0";

// Flat run configuration. The file format is one "key = value" per line;
// '#' starts a comment. Unknown keys are errors.
struct RunConfig {
  // Model.
  double prior_w1 = 0.5;
  double theta0 = 0.7;
  double alpha = 0.25;
  double epsilon = 0.1;
  int64_t population = 250;
  std::string cost = "quadratic";  // quadratic | linear | linear-capped | table
  double cost_slope = 1.0;
  double cost_knee = 1.0;
  std::string cost_table;  // "zeta:slope,zeta:slope,..."
  uint64_t seed = 1;

  // Graph.
  std::string graph = "er";  // er | config-model | edge-list
  double avg_degree = 4.0;
  std::string degree_dist = "poisson:4:20";
  std::string edge_list;
  bool symmetrize = true;
  // Largest degree exported by the strategy subcommand; -1 derives it from
  // the graph.
  int64_t d_max = -1;

  // Simulation.
  int64_t trials = 1000;
  int workers = 0;
  std::string strategy = "mv";  // mv | nd
  double nd_delta = 1e-6;
  std::optional<double> beta0;
  std::optional<double> beta1;
  std::string sweep_axis = "none";  // none | avg_degree | epsilon | alpha
  std::vector<double> sweep_values;
  double target_error = 0.05;

  // Output.
  std::string out = "out";
  std::string formats = "csv,json";

  bool operator==(const RunConfig&) const = default;
};

// Sets one field from its textual value; errors name the field.
absl::Status ApplySetting(RunConfig& config, absl::string_view key,
                          absl::string_view value);

// Applies "KEY=VALUE".
absl::Status ApplyOverride(RunConfig& config, absl::string_view assignment);

absl::StatusOr<RunConfig> ParseRunConfig(absl::string_view text);

// Every key, in a fixed order, with full-precision numbers.
std::string SerializeRunConfig(const RunConfig& config);

// Cross-field checks, including that referenced files exist.
absl::Status ValidateRunConfig(const RunConfig& config);

absl::StatusOr<CostFunction> BuildCost(const RunConfig& config);
absl::StatusOr<ModelParams> BuildModelParams(const RunConfig& config);
absl::StatusOr<GraphSpec> BuildGraphSpec(const RunConfig& config);
absl::StatusOr<Scenario> BuildScenario(const RunConfig& config);
absl::StatusOr<SweepAxis> ParseSweepAxis(absl::string_view name);

// JSON manifest of a run. Worker count is left out: it cannot change
// results.
std::string RunManifestJson(const RunConfig& config,
                            const std::vector<SweepRow>& rows);

}  // namespace privmarket

#endif  // PRIVMARKET_CONFIG_H_
