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

#include "privmarket/sim.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace privmarket {
namespace {

// Compensated (Neumaier) running sum.
class Accumulator {
 public:
  void Add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0;
  double comp_ = 0;
};

// Mean and standard error of a sample, both summed in index order.
Estimate Summarize(const std::vector<double>& xs) {
  Estimate e;
  if (xs.empty()) return e;
  Accumulator sum;
  for (double x : xs) sum.Add(x);
  const double n = static_cast<double>(xs.size());
  e.mean = sum.value() / n;
  if (xs.size() < 2) return e;
  Accumulator sq;
  for (double x : xs) sq.Add((x - e.mean) * (x - e.mean));
  e.se = std::sqrt(sq.value() / (n - 1.0) / n);
  e.ci_half = 1.96 * e.se;
  return e;
}

int ResolveWorkers(int workers, int64_t jobs) {
  int w = workers;
  if (w <= 0) {
    w = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }
  return static_cast<int>(std::min<int64_t>(w, std::max<int64_t>(jobs, 1)));
}

// Runs body(k) for k in [0, count) on a pool. Every index is attempted;
// the reported error is the one with the lowest index so failures are
// schedule independent too.
absl::Status ParallelFor(int64_t count, int workers,
                         const std::function<absl::Status(int64_t)>& body) {
  std::vector<absl::Status> errors(static_cast<size_t>(count));
  std::atomic<int64_t> next{0};
  auto worker = [&] {
    for (int64_t k = next.fetch_add(1); k < count; k = next.fetch_add(1)) {
      errors[static_cast<size_t>(k)] = body(k);
    }
  };
  const int n = ResolveWorkers(workers, count);
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (absl::Status& s : errors) {
    if (!s.ok()) return s;
  }
  return absl::OkStatus();
}

Report SampleReport(Rng& rng, const ActionDistribution& a) {
  const double u = rng.Uniform();
  if (u < a.p1) return Report::kOne;
  if (u < a.p1 + a.p0) return Report::kZero;
  return Report::kBottom;
}

struct TrialSummary {
  int w = 0;
  bool correct = false;
  double payment_per_user = 0;
  double privacy_cost_per_user = 0;
  double total_payment = 0;
  double majority_matches = 0;
  int64_t sum_reports = 0;
};

absl::StatusOr<TrialSummary> Summarize(const TrialResult& t) {
  TrialSummary out;
  out.w = t.w;
  out.correct = t.w == t.w_hat;
  out.sum_reports = t.sum_reports;
  const size_t n = t.reports.size();
  if (n == 0) return absl::FailedPreconditionError("empty population");
  Accumulator pay, cost;
  for (double p : t.payments) pay.Add(p);
  for (double c : t.privacy_costs) cost.Add(c);
  out.total_payment = pay.value();
  out.payment_per_user = pay.value() / static_cast<double>(n);
  out.privacy_cost_per_user = cost.value() / static_cast<double>(n);
  size_t participants = 0, ones = 0;
  for (Report r : t.reports) {
    participants += r != Report::kBottom;
    ones += r == Report::kOne;
  }
  const Majority truth = t.w == 1 ? Majority::kOne : Majority::kZero;
  size_t matches = 0;
  for (Report r : t.reports) {
    // A user who abstains still has a well-defined majority of the others.
    const Majority m =
        r == Report::kBottom
            ? MajorityFromCounts(Report::kZero, participants + 1, ones)
            : MajorityFromCounts(r, participants, ones);
    matches += m == truth;
  }
  out.majority_matches = static_cast<double>(matches) / static_cast<double>(n);
  return out;
}

absl::StatusOr<DegreeDistribution> GraphDistribution(const Graph& g) {
  return DegreeDistribution::FromGraph(g);
}

absl::Status CheckGraph(const std::shared_ptr<const Graph>& graph) {
  if (graph == nullptr || graph->node_count() == 0) {
    return absl::InvalidArgumentError("market needs a nonempty graph");
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<Market> BuildMarket(const ModelParams& params,
                                   std::shared_ptr<const Graph> graph,
                                   const MarketOptions& options) {
  if (absl::Status s = CheckGraph(graph); !s.ok()) return s;
  Market m;
  m.params = params;
  m.params.population = static_cast<int64_t>(graph->node_count());
  if (absl::Status s = m.params.Validate(); !s.ok()) return s;
  m.graph = graph;
  m.strategy = options.strategy;
  const int64_t n = m.params.population;
  absl::StatusOr<DegreeDistribution> dist = GraphDistribution(*graph);
  if (!dist.ok()) return dist.status();
  const size_t d_max = graph->max_degree();
  const bool equal = m.params.equal_priors();
  if (!equal && !(options.beta0.has_value() && options.beta1.has_value())) {
    return absl::FailedPreconditionError(
        "unequal priors: beta0 and beta1 must be supplied (no closed form "
        "for the majority accuracy)");
  }

  if (options.strategy == StrategyKind::kNdBaseline) {
    m.table = BuildNdTable(d_max);
    absl::StatusOr<MomentSummary> nd = NdMoments(m.params, *dist);
    if (!nd.ok()) return nd.status();
    m.summary = *nd;
    double beta = 0;
    if (equal) {
      absl::StatusOr<double> b = BetaAccuracy(n, m.summary);
      if (!b.ok()) return b.status();
      beta = *b;
    } else {
      if (*options.beta0 != *options.beta1) {
        return absl::InvalidArgumentError(
            "the baseline mechanism takes one accuracy: beta0 must equal "
            "beta1");
      }
      beta = *options.beta1;
    }
    absl::StatusOr<MechanismConfig> cfg = DesignNdMechanism(
        options.nd_delta, beta, m.params.theta0, m.params.prior_w1);
    if (!cfg.ok()) return cfg.status();
    m.mechanism = *cfg;
    m.mechanism.epsilon = 0;
    m.beta = beta;
    if (equal) {
      absl::StatusOr<double> total =
          ExpectedTotalPayment(m.mechanism.z0, beta, m.summary.mu1, n);
      if (total.ok()) m.expected_total_payment = *total;
    }
  } else {
    absl::StatusOr<StrategyTable> table = BuildMvTable(d_max, m.params);
    if (!table.ok()) return table.status();
    m.table = *std::move(table);
    absl::StatusOr<double> z =
        DesignZ(m.params.epsilon, m.params.theta0, m.params.cost);
    if (!z.ok()) return z.status();
    double beta0 = 0, beta1 = 0;
    if (equal) {
      absl::StatusOr<MomentSummary> mv = MvMomentsEqualPriors(m.params, *dist);
      if (!mv.ok()) return mv.status();
      m.summary = *mv;
      absl::StatusOr<double> b = BetaAccuracy(n, m.summary);
      if (!b.ok()) return b.status();
      beta0 = beta1 = *b;
      m.beta = *b;
    } else {
      absl::StatusOr<PairStatistics> pairs =
          ComputePairStatistics(m.table, m.params, *dist);
      if (!pairs.ok()) return pairs.status();
      m.summary = SummaryFromPairs(*pairs);
      beta0 = *options.beta0;
      beta1 = *options.beta1;
    }
    absl::StatusOr<MechanismConfig> cfg =
        DesignZ0Z1(*z, beta0, beta1, m.params.prior_w1);
    if (!cfg.ok()) return cfg.status();
    m.mechanism = *cfg;
    m.mechanism.epsilon = m.params.epsilon;
    if (equal) {
      absl::StatusOr<double> total =
          ExpectedTotalPayment(m.mechanism.z0, beta1, m.summary.mu1, n);
      if (!total.ok()) return total.status();
      m.expected_total_payment = *total;
    }
  }
  absl::StatusOr<double> b = Bhattacharyya(n, m.summary);
  if (b.ok()) m.bhattacharyya = *b;
  absl::StatusOr<MomentSummary> gm = GraphMoments(m.table, m.params, *graph);
  if (gm.ok()) m.graph_summary = *gm;
  return m;
}

absl::StatusOr<Market> BuildMarketWithTable(const ModelParams& params,
                                            std::shared_ptr<const Graph> graph,
                                            StrategyTable table,
                                            const MechanismConfig& mechanism) {
  if (absl::Status s = CheckGraph(graph); !s.ok()) return s;
  Market m;
  m.params = params;
  m.params.population = static_cast<int64_t>(graph->node_count());
  if (absl::Status s = m.params.Validate(); !s.ok()) return s;
  if (!table.covers(graph->max_degree())) {
    return absl::InvalidArgumentError(absl::StrCat(
        "strategy table covers degrees up to ", table.max_degree(),
        " but the graph has degree ", graph->max_degree()));
  }
  m.graph = graph;
  m.table = std::move(table);
  m.mechanism = mechanism;
  absl::StatusOr<DegreeDistribution> dist = GraphDistribution(*graph);
  if (!dist.ok()) return dist.status();
  absl::StatusOr<PairStatistics> pairs =
      ComputePairStatistics(m.table, m.params, *dist);
  if (!pairs.ok()) return pairs.status();
  m.summary = SummaryFromPairs(*pairs);
  absl::StatusOr<double> b = Bhattacharyya(m.params.population, m.summary);
  if (b.ok()) m.bhattacharyya = *b;
  absl::StatusOr<MomentSummary> gm = GraphMoments(m.table, m.params, *graph);
  if (gm.ok()) m.graph_summary = *gm;
  return m;
}

int MapEstimate(int64_t sum_reports, int64_t n, const MomentSummary& summary,
                double prior_w1) {
  const double mu1 = summary.mu1, mu0 = summary.mu0;
  const double k1 = summary.kappa1, k0 = summary.kappa0;
  if (prior_w1 == 0.5 && k1 == k0 && mu0 == 1.0 - mu1) {
    // The comparison reduces to the sign of (mu1 - mu0)(2 sum - n); do it
    // in integers so ties are exact.
    const int64_t side = 2 * sum_reports - n;
    if (mu1 > mu0) return side > 0 ? 1 : 0;
    if (mu1 < mu0) return side < 0 ? 1 : 0;
    return 0;
  }
  const double x = static_cast<double>(sum_reports) / static_cast<double>(n);
  if (!(k1 > 0 && k0 > 0)) {
    return std::fabs(x - mu1) < std::fabs(x - mu0) ? 1 : 0;
  }
  const double lhs = (x - mu0) * (x - mu0) / k0 - (x - mu1) * (x - mu1) / k1;
  const double rhs = 2.0 / static_cast<double>(n) *
                     std::log(std::sqrt(k1 / k0) * (1.0 - prior_w1) / prior_w1);
  return lhs > rhs ? 1 : 0;
}

absl::StatusOr<TrialResult> RunTrial(Rng& rng, const Market& market,
                                     std::optional<int> forced_w) {
  const Graph& g = *market.graph;
  const size_t n = g.node_count();
  TrialResult t;
  t.w = forced_w.has_value() ? *forced_w
                             : SampleWorld(rng, market.params.prior_w1);
  const std::vector<uint8_t> s =
      SamplePrivateSignals(rng, t.w, market.params.theta0, n);
  const std::vector<uint8_t> c =
      SampleGroupSignals(rng, g, s, market.params.alpha);
  t.reports.resize(n);
  t.privacy_costs.resize(n);
  size_t participants = 0, ones = 0;
  for (NodeId i = 0; i < n; ++i) {
    const size_t d = g.degree(i);
    if (!market.table.covers(d)) {
      return absl::OutOfRangeError(absl::StrCat(
          "user ", i, " has degree ", d, " beyond the strategy table (max ",
          market.table.covers(0) ? market.table.max_degree() : 0, ")"));
    }
    size_t f = 0;
    for (size_t k = 0; k < d; ++k) f += c[g.offset(i) + k];
    const StrategyRow& row = market.table.row(d, f);
    t.reports[i] = SampleReport(rng, row.given(s[i]));
    t.privacy_costs[i] = market.params.cost.Value(row.privacy_level);
    participants += t.reports[i] != Report::kBottom;
    ones += t.reports[i] == Report::kOne;
  }
  t.payments.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const Majority m = MajorityFromCounts(t.reports[i], participants, ones);
    t.payments[i] = PeerPayment(t.reports[i], m, market.mechanism);
  }
  t.sum_reports = static_cast<int64_t>(ones);
  t.w_hat = MapEstimate(t.sum_reports, static_cast<int64_t>(n), market.summary,
                        market.params.prior_w1);
  return t;
}

absl::StatusOr<SimResult> RunExperiment(const Market& market, int64_t trials,
                                        int workers, uint64_t seed) {
  if (trials < 2) {
    return absl::InvalidArgumentError("an experiment needs at least 2 trials");
  }
  if (absl::Status s = CheckGraph(market.graph); !s.ok()) return s;
  std::vector<TrialSummary> per_trial(static_cast<size_t>(trials));
  absl::Status status = ParallelFor(trials, workers, [&](int64_t k) {
    Rng rng(seed, "trial", static_cast<uint64_t>(k));
    absl::StatusOr<TrialResult> t = RunTrial(rng, market);
    if (!t.ok()) return t.status();
    absl::StatusOr<TrialSummary> s = Summarize(*t);
    if (!s.ok()) return s.status();
    per_trial[static_cast<size_t>(k)] = *s;
    return absl::OkStatus();
  });
  if (!status.ok()) return status;

  const double n = static_cast<double>(market.graph->node_count());
  std::vector<double> correct, pay, cost, total, matches, x1, x0;
  for (const TrialSummary& s : per_trial) {
    correct.push_back(s.correct ? 1.0 : 0.0);
    pay.push_back(s.payment_per_user);
    cost.push_back(s.privacy_cost_per_user);
    total.push_back(s.total_payment);
    matches.push_back(s.majority_matches);
    (s.w == 1 ? x1 : x0).push_back(static_cast<double>(s.sum_reports) / n);
  }
  SimResult r;
  r.trials = trials;
  r.population = static_cast<int64_t>(market.graph->node_count());
  r.edges = static_cast<int64_t>(market.graph->edge_count());
  r.accuracy = Summarize(correct);
  r.avg_payment_per_user = Summarize(pay);
  r.avg_privacy_cost = Summarize(cost);
  r.mean_total_payment = Summarize(total);
  r.majority_matches = Summarize(matches);
  r.empirical_mu1 = Summarize(x1);
  r.empirical_mu0 = Summarize(x0);
  r.trials_w1 = static_cast<int64_t>(x1.size());
  if (x1.size() >= 2) {
    // Var(sum)/N = N Var(sum/N); the SE assumes near-normal sums.
    const double m = static_cast<double>(x1.size());
    const double var = r.empirical_mu1.se * r.empirical_mu1.se * m;
    r.empirical_kappa1.mean = n * var;
    r.empirical_kappa1.se = n * var * std::sqrt(2.0 / (m - 1.0));
    r.empirical_kappa1.ci_half = 1.96 * r.empirical_kappa1.se;
  }
  r.analytic = market.summary;
  r.analytic_beta = market.beta;
  r.analytic_total_payment = market.expected_total_payment;
  r.analytic_bhattacharyya = market.bhattacharyya;
  return r;
}

double KsDistanceToNormal(std::vector<double> samples) {
  if (samples.empty()) return 0;
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const double cdf = StdNormalCdf(samples[i]);
    d = std::max(d, static_cast<double>(i + 1) / n - cdf);
    d = std::max(d, cdf - static_cast<double>(i) / n);
  }
  return d;
}

absl::StatusOr<NormalityReport> NormalityProbe(const Market& market,
                                               int64_t trials_per_state,
                                               int workers, uint64_t seed) {
  if (trials_per_state < 1000) {
    return absl::InvalidArgumentError(
        "the normality probe needs at least 1000 trials per world state");
  }
  if (absl::Status s = CheckGraph(market.graph); !s.ok()) return s;
  const MomentSummary& closed = market.summary;
  const MomentSummary& m =
      market.graph_summary.has_value() ? *market.graph_summary : closed;
  if (!(m.kappa1 > 0) || !(m.kappa0 > 0) || !(closed.kappa1 > 0) ||
      !(closed.kappa0 > 0)) {
    return absl::FailedPreconditionError(
        "zero variance: the report sum is degenerate under this strategy");
  }
  const double n = static_cast<double>(market.graph->node_count());
  NormalityReport report;
  report.samples_per_state = trials_per_state;
  for (int w = 0; w <= 1; ++w) {
    std::vector<double> sums(static_cast<size_t>(trials_per_state));
    absl::Status status =
        ParallelFor(trials_per_state, workers, [&](int64_t k) {
          Rng rng(seed, w == 1 ? "normality-w1" : "normality-w0",
                  static_cast<uint64_t>(k));
          absl::StatusOr<TrialResult> t = RunTrial(rng, market, w);
          if (!t.ok()) return t.status();
          sums[static_cast<size_t>(k)] = static_cast<double>(t->sum_reports);
          return absl::OkStatus();
        });
    if (!status.ok()) return status;
    auto standardized = [&](const MomentSummary& s) {
      const double mean = n * (w == 1 ? s.mu1 : s.mu0);
      const double sd = std::sqrt(n * (w == 1 ? s.kappa1 : s.kappa0));
      std::vector<double> z(sums.size());
      for (size_t k = 0; k < sums.size(); ++k) z[k] = (sums[k] - mean) / sd;
      return z;
    };
    report.ks[w] = KsDistanceToNormal(standardized(m));
    report.ks_closed_form[w] = KsDistanceToNormal(standardized(closed));
  }
  report.checked =
      static_cast<int64_t>(market.graph->node_count()) >= kNormalityMinPopulation;
  report.pass = !report.checked || (report.ks[0] < report.threshold &&
                                    report.ks[1] < report.threshold);
  return report;
}

absl::StatusOr<std::shared_ptr<const Graph>> BuildGraph(const GraphSpec& spec,
                                                        size_t n,
                                                        uint64_t seed) {
  Rng rng(seed, "graph", 0);
  switch (spec.kind) {
    case GraphSpec::Kind::kErdosRenyi: {
      absl::StatusOr<Graph> g = GenerateErdosRenyi(rng, n, spec.avg_degree);
      if (!g.ok()) return g.status();
      return std::make_shared<const Graph>(*std::move(g));
    }
    case GraphSpec::Kind::kConfigurationModel: {
      absl::StatusOr<DegreeDistribution> dist =
          ParseDegreeDistribution(spec.degree_dist);
      if (!dist.ok()) return dist.status();
      absl::StatusOr<Graph> g = GenerateConfigurationModel(rng, *dist, n);
      if (!g.ok()) return g.status();
      return std::make_shared<const Graph>(*std::move(g));
    }
    case GraphSpec::Kind::kEdgeList: {
      std::ifstream in(spec.edge_list);
      if (!in) {
        return absl::NotFoundError(
            absl::StrCat("cannot open edge list '", spec.edge_list, "'"));
      }
      IngestOptions opts;
      opts.symmetrize = spec.symmetrize;
      absl::StatusOr<IngestResult> r = IngestEdgeList(in, opts);
      if (!r.ok()) return r.status();
      return std::make_shared<const Graph>(std::move(r->graph));
    }
  }
  return absl::InvalidArgumentError("unknown graph kind");
}

absl::StatusOr<std::vector<SweepRow>> Sweep(const Scenario& scenario,
                                            SweepAxis axis,
                                            const std::vector<double>& values,
                                            int64_t trials, int workers) {
  if (axis == SweepAxis::kNone || values.empty()) {
    return absl::InvalidArgumentError("a sweep needs an axis and values");
  }
  const size_t n = static_cast<size_t>(scenario.params.population);
  std::shared_ptr<const Graph> shared;
  if (axis != SweepAxis::kAvgDegree) {
    absl::StatusOr<std::shared_ptr<const Graph>> g =
        BuildGraph(scenario.graph, n, scenario.seed);
    if (!g.ok()) return g.status();
    shared = *g;
  } else if (scenario.graph.kind == GraphSpec::Kind::kEdgeList) {
    return absl::InvalidArgumentError(
        "an avg_degree sweep needs a generated graph, not an edge list");
  }
  std::vector<SweepRow> rows;
  for (double v : values) {
    ModelParams params = scenario.params;
    std::shared_ptr<const Graph> graph = shared;
    switch (axis) {
      case SweepAxis::kAvgDegree: {
        if (!(v >= 0) || !std::isfinite(v)) {
          return absl::InvalidArgumentError(
              absl::StrCat("invalid avg_degree grid value ", v));
        }
        GraphSpec spec = scenario.graph;
        spec.avg_degree = v;
        if (spec.kind == GraphSpec::Kind::kConfigurationModel) {
          const int d_max = std::max(
              20, static_cast<int>(std::ceil(v + 10.0 * std::sqrt(v))));
          spec.degree_dist = absl::StrFormat("poisson:%.17g:%d", v, d_max);
        }
        absl::StatusOr<std::shared_ptr<const Graph>> g =
            BuildGraph(spec, n, scenario.seed);
        if (!g.ok()) return g.status();
        graph = *g;
        break;
      }
      case SweepAxis::kEpsilon:
        params.epsilon = v;
        break;
      case SweepAxis::kAlpha:
        params.alpha = v;
        break;
      case SweepAxis::kNone:
        break;
    }
    absl::StatusOr<Market> market = BuildMarket(params, graph, scenario.market);
    if (!market.ok()) {
      return absl::Status(market.status().code(),
                          absl::StrCat("sweep value ", v, ": ",
                                       market.status().message()));
    }
    absl::StatusOr<SimResult> r =
        RunExperiment(*market, trials, workers, scenario.seed);
    if (!r.ok()) return r.status();
    rows.push_back({v, *std::move(r)});
  }
  return rows;
}

namespace {

std::string Num(double x) { return absl::StrFormat("%.17g", x); }

std::string OptNum(const std::optional<double>& x) {
  return x.has_value() ? Num(*x) : std::string();
}

}  // namespace

void WriteResultsCsv(std::ostream& out, const std::vector<SweepRow>& rows,
                     bool has_axis) {
  out << "axis_value,accuracy,accuracy_ci,avg_payment,payment_ci,"
         "avg_privacy_cost,cost_ci,analytic_mu1,analytic_beta,"
         "analytic_payment,bhattacharyya\n";
  for (const SweepRow& row : rows) {
    const SimResult& r = row.result;
    std::optional<double> per_user;
    if (r.analytic_total_payment.has_value() && r.population > 0) {
      per_user =
          *r.analytic_total_payment / static_cast<double>(r.population);
    }
    out << (has_axis ? Num(row.axis_value) : std::string()) << ','
        << Num(r.accuracy.mean) << ',' << Num(r.accuracy.ci_half) << ','
        << Num(r.avg_payment_per_user.mean) << ','
        << Num(r.avg_payment_per_user.ci_half) << ','
        << Num(r.avg_privacy_cost.mean) << ','
        << Num(r.avg_privacy_cost.ci_half) << ',' << Num(r.analytic.mu1) << ','
        << OptNum(r.analytic_beta) << ',' << OptNum(per_user) << ','
        << OptNum(r.analytic_bhattacharyya) << '\n';
  }
}

}  // namespace privmarket
