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

#include "privmarket/config.h"

#include <string>
#include <vector>

#include "absl/status/status.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "nlohmann/json.hpp"
#include "privmarket/sim.h"

namespace privmarket {
namespace {

using ::testing::HasSubstr;

TEST(ParseRunConfigTest, DefaultsFromEmptyText) {
  absl::StatusOr<RunConfig> c = ParseRunConfig("# nothing\n\n");
  ASSERT_TRUE(c.ok());
  EXPECT_EQ(*c, RunConfig());
}

TEST(ParseRunConfigTest, ReadsFields) {
  absl::StatusOr<RunConfig> c = ParseRunConfig(
      "theta0 = 0.8  # comment\n"
      "graph = config-model\n"
      "degree_dist = point:3\n"
      "sweep_axis = epsilon\n"
      "sweep_values = 0.1, 0.5,1\n"
      "beta0 = 0.9\n"
      "symmetrize = false\n");
  ASSERT_TRUE(c.ok()) << c.status();
  EXPECT_EQ(c->theta0, 0.8);
  EXPECT_EQ(c->graph, "config-model");
  EXPECT_EQ(c->sweep_values, (std::vector<double>{0.1, 0.5, 1}));
  EXPECT_EQ(c->beta0, 0.9);
  EXPECT_FALSE(c->beta1.has_value());
  EXPECT_FALSE(c->symmetrize);
}

TEST(ParseRunConfigTest, RoundTrip) {
  RunConfig c;
  c.theta0 = 0.1 + 0.2 + 0.4;  // not exactly representable in short form
  c.epsilon = 1.0 / 3.0;
  c.cost = "table";
  c.cost_table = "0.5:1,1:2";
  c.sweep_axis = "alpha";
  c.sweep_values = {0.05, 0.1, 1.0 / 7.0};
  c.beta1 = 0.97;
  c.seed = 18446744073709551615ull;
  c.out = "some dir";
  absl::StatusOr<RunConfig> back = ParseRunConfig(SerializeRunConfig(c));
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(*back, c);
  EXPECT_EQ(SerializeRunConfig(*back), SerializeRunConfig(c));
}

TEST(ParseRunConfigTest, ErrorsNameLineAndField) {
  absl::StatusOr<RunConfig> c = ParseRunConfig("seed = 3\ntheta0 = abc\n");
  ASSERT_FALSE(c.ok());
  EXPECT_THAT(c.status().message(), HasSubstr("config line 2"));
  EXPECT_THAT(c.status().message(), HasSubstr("'theta0'"));
  c = ParseRunConfig("bogus = 1\n");
  ASSERT_FALSE(c.ok());
  EXPECT_THAT(c.status().message(), HasSubstr("unknown config key"));
  EXPECT_FALSE(ParseRunConfig("no equals sign\n").ok());
}

TEST(ApplyOverrideTest, SetsAndRejects) {
  RunConfig c;
  ASSERT_TRUE(ApplyOverride(c, "trials=42").ok());
  EXPECT_EQ(c.trials, 42);
  ASSERT_TRUE(ApplyOverride(c, " alpha = 0.1 ").ok());
  EXPECT_EQ(c.alpha, 0.1);
  EXPECT_FALSE(ApplyOverride(c, "trials").ok());
  EXPECT_FALSE(ApplyOverride(c, "trials=-x").ok());
}

TEST(ValidateRunConfigTest, Defaults) {
  EXPECT_TRUE(ValidateRunConfig(RunConfig()).ok());
}

TEST(ValidateRunConfigTest, FieldErrors) {
  RunConfig c;
  c.theta0 = 0.4;
  EXPECT_FALSE(ValidateRunConfig(c).ok());
  c = RunConfig();
  c.trials = 1;
  EXPECT_THAT(ValidateRunConfig(c).message(), HasSubstr("trials"));
  c = RunConfig();
  c.graph = "edge-list";
  c.edge_list = "/nonexistent/edges.txt";
  EXPECT_THAT(ValidateRunConfig(c).message(), HasSubstr("edge_list"));
  c = RunConfig();
  c.sweep_axis = "epsilon";
  EXPECT_THAT(ValidateRunConfig(c).message(), HasSubstr("sweep_values"));
  c = RunConfig();
  c.graph = "config-model";
  c.degree_dist = "weird:1";
  EXPECT_THAT(ValidateRunConfig(c).message(), HasSubstr("degree_dist"));
  c = RunConfig();
  c.graph = "lattice";
  EXPECT_THAT(ValidateRunConfig(c).message(), HasSubstr("graph"));
  c = RunConfig();
  c.strategy = "greedy";
  EXPECT_THAT(ValidateRunConfig(c).message(), HasSubstr("strategy"));
}

TEST(BuildScenarioTest, MapsFields) {
  RunConfig c;
  c.graph = "config-model";
  c.degree_dist = "point:2";
  c.strategy = "nd";
  c.nd_delta = 1e-3;
  c.cost = "linear";
  c.cost_slope = 2;
  absl::StatusOr<Scenario> s = BuildScenario(c);
  ASSERT_TRUE(s.ok()) << s.status();
  EXPECT_EQ(s->graph.kind, GraphSpec::Kind::kConfigurationModel);
  EXPECT_EQ(s->graph.degree_dist, "point:2");
  EXPECT_EQ(s->market.strategy, StrategyKind::kNdBaseline);
  EXPECT_EQ(s->market.nd_delta, 1e-3);
  EXPECT_EQ(s->params.population, 250);
  EXPECT_DOUBLE_EQ(s->params.cost.Derivative(0.3), 2.0);
}

TEST(ParseSweepAxisTest, Names) {
  EXPECT_EQ(*ParseSweepAxis("none"), SweepAxis::kNone);
  EXPECT_EQ(*ParseSweepAxis("avg_degree"), SweepAxis::kAvgDegree);
  EXPECT_EQ(*ParseSweepAxis("epsilon"), SweepAxis::kEpsilon);
  EXPECT_EQ(*ParseSweepAxis("alpha"), SweepAxis::kAlpha);
  EXPECT_FALSE(ParseSweepAxis("theta").ok());
}

TEST(RunManifestJsonTest, RecordsConfigWithoutWorkers) {
  RunConfig c;
  c.workers = 16;
  SweepRow row;
  row.result.trials = 10;
  row.result.population = 250;
  row.result.edges = 480;
  const nlohmann::json j = nlohmann::json::parse(RunManifestJson(c, {row}));
  EXPECT_EQ(j["version"], kVersion);
  EXPECT_EQ(j["seed"], 1);
  EXPECT_FALSE(j["config"].contains("workers"));
  EXPECT_EQ(j["config"]["theta0"], 0.7);
  ASSERT_EQ(j["runs"].size(), 1u);
  EXPECT_EQ(j["runs"][0]["nodes"], 250);
  EXPECT_EQ(j["runs"][0]["edges"], 480);
  EXPECT_TRUE(j["config"]["beta0"].is_null());
  EXPECT_EQ(j["config"]["graph"], "er");
  RunConfig one_worker = c;
  one_worker.workers = 1;
  EXPECT_EQ(RunManifestJson(c, {row}), RunManifestJson(one_worker, {row}));
}

}  // namespace
}  // namespace privmarket
