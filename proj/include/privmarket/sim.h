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

#ifndef PRIVMARKET_SIM_H_
#define PRIVMARKET_SIM_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "privmarket/analytics.h"
#include "privmarket/graph.h"
#include "privmarket/mechanism.h"
#include "privmarket/model.h"
#include "privmarket/strategy.h"

namespace privmarket {

enum class StrategyKind { kMajorityVoting, kNdBaseline };

struct MarketOptions {
  StrategyKind strategy = StrategyKind::kMajorityVoting;
  // Payment scale of the baseline mechanism.
  double nd_delta = 1e-6;
  // Majority-consistency probabilities; required under unequal priors,
  // where no closed form exists.
  std::optional<double> beta0;
  std::optional<double> beta1;
};

// Everything a trial needs, immutable and shared by all workers.
struct Market {
  ModelParams params;
  std::shared_ptr<const Graph> graph;
  StrategyKind strategy = StrategyKind::kMajorityVoting;
  StrategyTable table;
  MechanismConfig mechanism;
  // Analytic moments of the simulated profile on this graph's degree
  // distribution. Used by the MAP detector.
  MomentSummary summary;
  // Moments of the report sum on this particular graph (edge and two-hop
  // covariances from the realized degrees). Absent for abstaining tables.
  std::optional<MomentSummary> graph_summary;
  std::optional<double> beta;
  std::optional<double> expected_total_payment;
  std::optional<double> bhattacharyya;
};

absl::StatusOr<Market> BuildMarket(const ModelParams& params,
                                   std::shared_ptr<const Graph> graph,
                                   const MarketOptions& options = {});

// A market around an explicit strategy table and mechanism; moments come
// from the exact pair statistics.
absl::StatusOr<Market> BuildMarketWithTable(const ModelParams& params,
                                            std::shared_ptr<const Graph> graph,
                                            StrategyTable table,
                                            const MechanismConfig& mechanism);

// Gaussian MAP decision from the report sum; ties decide 0.
int MapEstimate(int64_t sum_reports, int64_t n, const MomentSummary& summary,
                double prior_w1);

struct TrialResult {
  int w = 0;
  int w_hat = 0;
  std::vector<Report> reports;
  std::vector<double> payments;
  std::vector<double> privacy_costs;
  int64_t sum_reports = 0;
};

// One market round. forced_w fixes the world state instead of drawing it.
absl::StatusOr<TrialResult> RunTrial(Rng& rng, const Market& market,
                                     std::optional<int> forced_w = {});

struct Estimate {
  double mean = 0;
  double se = 0;
  double ci_half = 0;  // 95% normal half-width
};

struct SimResult {
  int64_t trials = 0;
  int64_t population = 0;
  int64_t edges = 0;
  Estimate accuracy;
  Estimate avg_payment_per_user;
  Estimate avg_privacy_cost;
  Estimate mean_total_payment;
  // Fraction of users whose others' majority equals W.
  Estimate majority_matches;
  Estimate empirical_mu1;
  Estimate empirical_mu0;
  Estimate empirical_kappa1;
  int64_t trials_w1 = 0;
  // Analytic predictions for the same market.
  MomentSummary analytic;
  std::optional<double> analytic_beta;
  std::optional<double> analytic_total_payment;
  std::optional<double> analytic_bhattacharyya;
};

// Runs `trials` independent rounds. Trial k uses the stream
// (seed, "trial", k); results are reduced in trial order, so the output is
// identical for any worker count. workers = 0 picks the hardware count.
absl::StatusOr<SimResult> RunExperiment(const Market& market, int64_t trials,
                                        int workers, uint64_t seed);

struct NormalityReport {
  // KS distance per world state after standardizing with the graph
  // moments, and (for reference) with the closed-form moments.
  double ks[2] = {0, 0};
  double ks_closed_form[2] = {0, 0};
  int64_t samples_per_state = 0;
  double threshold = 0.05;
  // The asymptotic claim is only checked for large populations.
  bool checked = false;
  bool pass = false;
};

inline constexpr int64_t kNormalityMinPopulation = 1000;

// Kolmogorov-Smirnov distance between the standardized report sum and the
// standard normal, per world state. The pass/fail check uses the graph
// moments when the market has them.
absl::StatusOr<NormalityReport> NormalityProbe(const Market& market,
                                               int64_t trials_per_state,
                                               int workers, uint64_t seed);

double KsDistanceToNormal(std::vector<double> samples);

struct GraphSpec {
  enum class Kind { kErdosRenyi, kConfigurationModel, kEdgeList };
  Kind kind = Kind::kErdosRenyi;
  double avg_degree = 4.0;
  std::string degree_dist = "poisson:4:20";
  std::string edge_list;
  bool symmetrize = true;
};

// Builds the graph from stream (seed, "graph", 0). Edge lists ignore n and
// define the population themselves.
absl::StatusOr<std::shared_ptr<const Graph>> BuildGraph(const GraphSpec& spec,
                                                        size_t n,
                                                        uint64_t seed);

struct Scenario {
  ModelParams params;
  GraphSpec graph;
  MarketOptions market;
  uint64_t seed = 1;
};

enum class SweepAxis { kNone, kAvgDegree, kEpsilon, kAlpha };

struct SweepRow {
  double axis_value = 0;
  SimResult result;
};

// One experiment per grid value; every point reuses the same graph and
// trial streams, so neighbouring points are coupled.
absl::StatusOr<std::vector<SweepRow>> Sweep(const Scenario& scenario,
                                            SweepAxis axis,
                                            const std::vector<double>& values,
                                            int64_t trials, int workers);

// Header: axis_value,accuracy,accuracy_ci,avg_payment,payment_ci,
// avg_privacy_cost,cost_ci,analytic_mu1,analytic_beta,analytic_payment,
// bhattacharyya. analytic_payment is per user. A row without an axis value
// leaves the first column empty.
void WriteResultsCsv(std::ostream& out, const std::vector<SweepRow>& rows,
                     bool has_axis);

}  // namespace privmarket

#endif  // PRIVMARKET_SIM_H_
