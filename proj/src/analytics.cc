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

#include "privmarket/analytics.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace privmarket {

double BinomPmf(double k, int64_t m, double p) {
  if (m < 0 || k < 0 || k > static_cast<double>(m) || k != std::floor(k)) {
    return 0.0;
  }
  const double md = static_cast<double>(m);
  if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return k == md ? 1.0 : 0.0;
  const double log_choose =
      std::lgamma(md + 1.0) - std::lgamma(k + 1.0) - std::lgamma(md - k + 1.0);
  return std::exp(log_choose + k * std::log(p) + (md - k) * std::log1p(-p));
}

double BinomRange(double k, double l, int64_t m, double p) {
  const double lo = std::max(std::ceil(k), 0.0);
  const double hi = std::min(std::floor(l), static_cast<double>(m));
  double sum = 0;
  for (double i = lo; i <= hi; i += 1.0) sum += BinomPmf(i, m, p);
  return sum;
}

NuValues ComputeNu(size_t d, double tau, double theta1) {
  const double half = 0.5 * static_cast<double>(d);
  const int64_t m = static_cast<int64_t>(d);
  NuValues nu;
  nu.sr = BinomRange(half - tau, half + tau, m, theta1);
  nu.nd = BinomRange(std::floor(half + tau + 1.0), static_cast<double>(d), m,
                     theta1);
  return nu;
}

namespace {

// Shared closed form for MV-type profiles with a common cut tau, SR level
// epsilon at the band (lambda = Pr(X = 1 | SR, W = 1)).
absl::StatusOr<MomentSummary> MvTypeMoments(const ModelParams& params,
                                            const DegreeDistribution& dist,
                                            double tau, double eps) {
  const double theta0 = params.theta0, theta1 = params.theta1();
  const double e = std::exp(eps);
  MomentSummary out;
  out.tau = tau;
  out.lambda = (theta0 * e + 1.0 - theta0) / (e + 1.0);
  const double lambda = out.lambda;

  double mu = 0;
  for (size_t d = 0; d <= dist.max_degree(); ++d) {
    if (dist.mass(d) == 0) continue;
    const NuValues nu = ComputeNu(d, tau, theta1);
    mu += dist.mass(d) * (nu.nd + lambda * nu.sr);
  }
  out.mu1 = mu;
  out.mu0 = 1.0 - mu;

  const double rho0 = dist.rho0();
  if (rho0 >= 1.0) {
    out.no_learning = true;
    out.kappa1 = out.kappa0 = mu - mu * mu;
    return out;
  }
  absl::StatusOr<DegreeDistribution> tilde = dist.ConditionalOnPositive();
  if (!tilde.ok()) return tilde.status();

  const double low_weight = (e * (1.0 - theta0) + theta0) / (e + 1.0);
  const double high_weight = lambda;
  double boundary = 0;
  for (size_t d = 1; d <= tilde->max_degree(); ++d) {
    if (tilde->mass(d) == 0) continue;
    const double half = 0.5 * static_cast<double>(d);
    const int64_t m = static_cast<int64_t>(d) - 1;
    boundary += tilde->mass(d) *
                (low_weight * BinomPmf(std::floor(half + tau), m, theta1) +
                 high_weight * BinomPmf(std::ceil(half - tau - 1.0), m, theta1));
  }
  out.delta =
      theta0 * (1.0 - theta0) * (1.0 - 2.0 * params.alpha) * boundary;
  out.delta_tilde = rho0 *
                    (mu * mu * (2.0 - rho0) - 2.0 * mu * lambda +
                     rho0 * lambda * lambda) /
                    ((1.0 - rho0) * (1.0 - rho0));
  const double ed = dist.Mean(), ed2 = dist.SecondMoment();
  out.kappa1 = out.kappa0 =
      mu - mu * mu + out.delta_tilde * ed2 + out.delta * (ed2 - ed);
  return out;
}

}  // namespace

absl::StatusOr<MomentSummary> MvMomentsEqualPriors(
    const ModelParams& params, const DegreeDistribution& dist) {
  absl::StatusOr<double> tau = EqualPriorsTau(params);
  if (!tau.ok()) return tau.status();
  return MvTypeMoments(params, dist, *tau, params.epsilon);
}

absl::StatusOr<MomentSummary> NdMoments(const ModelParams& params,
                                        const DegreeDistribution& dist) {
  if (absl::Status s = params.Validate(); !s.ok()) return s;
  // The baseline is the MV form with a zero cut and a fair coin (level 0).
  return MvTypeMoments(params, dist, 0.0, 0.0);
}

absl::StatusOr<PairStatistics> ComputePairStatistics(
    const StrategyTable& table, const ModelParams& params,
    const DegreeDistribution& dist) {
  if (absl::Status s = params.Validate(); !s.ok()) return s;
  if (!table.covers(dist.max_degree())) {
    return absl::OutOfRangeError(absl::StrCat(
        "strategy table covers degrees up to ", table.max_degree(),
        ", distribution reaches ", dist.max_degree()));
  }
  const double theta0 = params.theta0, theta1 = params.theta1();
  const double alpha = params.alpha;
  auto pr_s = [&](int s, int w) { return s == w ? theta0 : 1.0 - theta0; };
  auto pr_c = [&](int c, int s) { return c == s ? 1.0 - alpha : alpha; };
  auto pr_x = [&](int w, int s, size_t f, size_t d) {
    const ActionDistribution& a = table.row(d, f).given(s);
    return w == 1 ? a.p1 : a.p0;
  };

  std::optional<DegreeDistribution> tilde;
  if (dist.rho0() < 1.0) {
    absl::StatusOr<DegreeDistribution> t = dist.ConditionalOnPositive();
    if (!t.ok()) return t.status();
    tilde = *std::move(t);
  }
  const double ed = dist.Mean(), ed2 = dist.SecondMoment();

  PairStatistics out;
  for (int w = 0; w <= 1; ++w) {
    const double q = w == 1 ? theta1 : 1.0 - theta1;
    double mu = 0;
    for (size_t d = 0; d <= dist.max_degree(); ++d) {
      if (dist.mass(d) == 0) continue;
      const int64_t m = static_cast<int64_t>(d);
      for (int s = 0; s <= 1; ++s) {
        for (size_t f = 0; f <= d; ++f) {
          mu += dist.mass(d) * pr_s(s, w) * BinomPmf(double(f), m, q) *
                pr_x(w, s, f, d);
        }
      }
    }
    out.mu[w] = mu;
    if (!tilde) {
      out.kappa[w] = mu * (1.0 - mu);
      continue;
    }
    // j[s][l]: Pr(X = w | W = w, S = s, one given group signal equals l).
    double j[2][2] = {{0, 0}, {0, 0}};
    for (size_t d = 1; d <= tilde->max_degree(); ++d) {
      if (tilde->mass(d) == 0) continue;
      const int64_t m = static_cast<int64_t>(d) - 1;
      for (int s = 0; s <= 1; ++s) {
        for (int l = 0; l <= 1; ++l) {
          for (size_t f = 0; f + 1 <= d; ++f) {
            j[s][l] += tilde->mass(d) * BinomPmf(double(f), m, q) *
                       pr_x(w, s, f + l, d);
          }
        }
      }
    }
    double adjacent = 0;
    for (int si = 0; si <= 1; ++si) {
      for (int sj = 0; sj <= 1; ++sj) {
        double inner = 0;
        for (int k = 0; k <= 1; ++k) {
          for (int l = 0; l <= 1; ++l) {
            inner += pr_c(k, sj) * pr_c(l, si) * j[si][k] * j[sj][l];
          }
        }
        adjacent += pr_s(si, w) * pr_s(sj, w) * inner;
      }
    }
    double two_hop = 0;
    for (int sm = 0; sm <= 1; ++sm) {
      double one_side = 0;
      for (int si = 0; si <= 1; ++si) {
        for (int k = 0; k <= 1; ++k) {
          one_side += pr_s(si, w) * pr_c(k, sm) * j[si][k];
        }
      }
      two_hop += pr_s(sm, w) * one_side * one_side;
    }
    out.varsigma[w] = adjacent;
    out.varsigma_tilde[w] = two_hop;
    out.kappa[w] = mu * (1.0 - mu) + ed * (adjacent - two_hop) +
                   ed2 * (two_hop - mu * mu);
  }
  return out;
}

MomentSummary SummaryFromPairs(const PairStatistics& pairs) {
  MomentSummary s;
  s.mu1 = pairs.mu[1];
  s.mu0 = 1.0 - pairs.mu[0];
  s.kappa1 = pairs.kappa[1];
  s.kappa0 = pairs.kappa[0];
  return s;
}

absl::StatusOr<MomentSummary> GraphMoments(const StrategyTable& table,
                                           const ModelParams& params,
                                           const Graph& graph) {
  if (absl::Status s = params.Validate(); !s.ok()) return s;
  const size_t n = graph.node_count();
  if (n == 0) return absl::InvalidArgumentError("empty graph");
  const size_t d_max = graph.max_degree();
  if (!table.covers(d_max)) {
    return absl::OutOfRangeError(absl::StrCat(
        "strategy table covers degrees up to ", table.max_degree(),
        ", graph reaches ", d_max));
  }
  for (size_t d = 0; d <= d_max; ++d) {
    for (const StrategyRow& row : table.degree(d).rows) {
      if (row.given_s0.p_bot > 0 || row.given_s1.p_bot > 0) {
        return absl::FailedPreconditionError(
            "graph moments need a strategy that never abstains");
      }
    }
  }
  const double theta0 = params.theta0, alpha = params.alpha;
  const double q1 = params.theta1();
  std::vector<size_t> count(d_max + 1, 0);
  for (NodeId i = 0; i < n; ++i) ++count[graph.degree(i)];

  MomentSummary out;
  for (int w = 0; w <= 1; ++w) {
    const double q = w == 1 ? q1 : 1.0 - q1;
    auto pr_s = [&](int s) { return s == w ? theta0 : 1.0 - theta0; };
    auto pr_c = [&](int c, int s) { return c == s ? 1.0 - alpha : alpha; };
    // Per degree: mean of 1{X = w}, the one-signal conditionals J[s][l]
    // and the sensitivity to a friend's private signal.
    std::vector<double> mu(d_max + 1, 0);
    std::vector<std::array<std::array<double, 2>, 2>> j(d_max + 1);
    std::vector<double> h(d_max + 1, 0);
    for (size_t d = 0; d <= d_max; ++d) {
      if (count[d] == 0) continue;
      for (int s = 0; s <= 1; ++s) {
        for (size_t f = 0; f <= d; ++f) {
          const ActionDistribution& a = table.row(d, f).given(s);
          mu[d] += pr_s(s) * BinomPmf(double(f), int64_t(d), q) *
                   (w == 1 ? a.p1 : a.p0);
        }
      }
      if (d == 0) continue;
      double a_given[2] = {0, 0};
      for (int s = 0; s <= 1; ++s) {
        for (int l = 0; l <= 1; ++l) {
          double v = 0;
          for (size_t f = 0; f < d; ++f) {
            const ActionDistribution& a = table.row(d, f + l).given(s);
            v += BinomPmf(double(f), int64_t(d) - 1, q) *
                 (w == 1 ? a.p1 : a.p0);
          }
          j[d][s][l] = v;
        }
      }
      for (int sf = 0; sf <= 1; ++sf) {
        for (int s = 0; s <= 1; ++s) {
          for (int l = 0; l <= 1; ++l) {
            a_given[sf] += pr_s(s) * pr_c(l, sf) * j[d][s][l];
          }
        }
      }
      h[d] = a_given[1] - a_given[0];
    }
    auto adjacent_cov = [&](size_t a, size_t b) {
      double v = 0;
      for (int si = 0; si <= 1; ++si) {
        for (int sj = 0; sj <= 1; ++sj) {
          for (int k = 0; k <= 1; ++k) {
            for (int l = 0; l <= 1; ++l) {
              v += pr_s(si) * pr_s(sj) * pr_c(k, sj) * pr_c(l, si) *
                   j[a][si][k] * j[b][sj][l];
            }
          }
        }
      }
      return v - mu[a] * mu[b];
    };
    std::vector<double> adj_cache((d_max + 1) * (d_max + 1),
                                  std::numeric_limits<double>::quiet_NaN());
    double total = 0, mean = 0;
    for (NodeId i = 0; i < n; ++i) {
      const size_t a = graph.degree(i);
      mean += mu[a];
      total += mu[a] * (1.0 - mu[a]);
      for (NodeId k : graph.neighbors(i)) {
        const size_t b = graph.degree(k);
        double& c = adj_cache[a * (d_max + 1) + b];
        if (std::isnan(c)) c = adjacent_cov(a, b);
        total += c;
      }
      // Ordered pairs of distinct friends of i share i's private signal.
      double sum_h = 0, sum_h2 = 0;
      for (NodeId k : graph.neighbors(i)) {
        const double hk = h[graph.degree(k)];
        sum_h += hk;
        sum_h2 += hk * hk;
      }
      total += theta0 * (1.0 - theta0) * (sum_h * sum_h - sum_h2);
    }
    const double m = mean / static_cast<double>(n);
    const double kappa = total / static_cast<double>(n);
    if (w == 1) {
      out.mu1 = m;
      out.kappa1 = kappa;
    } else {
      out.mu0 = 1.0 - m;
      out.kappa0 = kappa;
    }
  }
  return out;
}

double StdNormalCdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

absl::StatusOr<double> BetaAccuracy(int64_t n, const MomentSummary& summary) {
  if (n < 2) return absl::InvalidArgumentError("population must be >= 2");
  if (!(summary.kappa1 > 0)) {
    return absl::FailedPreconditionError(
        "variance coefficient must be positive");
  }
  return StdNormalCdf(std::sqrt((n - 1) / summary.kappa1) *
                      (summary.mu1 - 0.5));
}

absl::StatusOr<double> ExpectedTotalPayment(double z, double beta, double mu1,
                                            int64_t n) {
  if (!(beta > 0.5)) {
    return absl::FailedPreconditionError(
        absl::StrCat("majority accuracy must exceed 0.5, got ", beta));
  }
  return z * (1.0 - beta + mu1 / (2.0 * beta - 1.0)) * static_cast<double>(n);
}

absl::StatusOr<double> ExpectedTotalPaymentIndependent(double z, double beta,
                                                       double mu1, int64_t n) {
  if (!(beta > 0.5)) {
    return absl::FailedPreconditionError(
        absl::StrCat("majority accuracy must exceed 0.5, got ", beta));
  }
  return z * (beta * mu1 + (1.0 - beta) * (1.0 - mu1)) *
         static_cast<double>(n);
}

absl::StatusOr<double> Bhattacharyya(int64_t n, const MomentSummary& summary) {
  const double var = summary.kappa1 + summary.kappa0;
  if (!(var > 0)) {
    return absl::FailedPreconditionError("zero variance: distance undefined");
  }
  const double gap = summary.mu1 - summary.mu0;
  return static_cast<double>(n) / 4.0 * gap * gap / var;
}

absl::StatusOr<MechanismConfig> DesignNdMechanism(double delta,
                                                  double beta_nd,
                                                  double theta0,
                                                  double prior_w1) {
  if (!(delta > 0)) return absl::InvalidArgumentError("delta must be > 0");
  if (!(beta_nd > 0.5)) {
    return absl::FailedPreconditionError(
        "baseline majority accuracy must exceed 0.5");
  }
  const double p1 = prior_w1, p0 = 1.0 - prior_w1;
  const double denom =
      (2.0 * beta_nd - 1.0) * (2.0 * theta0 - 1.0) * p1 * p0;
  MechanismConfig cfg;
  cfg.z = delta;
  cfg.beta0 = cfg.beta1 = beta_nd;
  cfg.z0 = delta * (p1 * beta_nd + p0 * (1.0 - beta_nd)) / denom;
  cfg.z1 = delta * (p1 * (1.0 - beta_nd) + p0 * beta_nd) / denom;
  return cfg;
}

absl::StatusOr<PaymentBoundReport> PaymentBound(double p_e,
                                                const ModelParams& params,
                                                const DegreeDistribution& dist,
                                                int64_t n) {
  if (!(p_e > 0 && p_e < 1)) {
    return absl::InvalidArgumentError("target error must lie in (0, 1)");
  }
  absl::StatusOr<MomentSummary> nd = NdMoments(params, dist);
  if (!nd.ok()) return nd.status();
  absl::StatusOr<MomentSummary> mv = MvMomentsEqualPriors(params, dist);
  if (!mv.ok()) return mv.status();
  PaymentBoundReport report;
  absl::StatusOr<double> b_nd = Bhattacharyya(n, *nd);
  if (!b_nd.ok()) return b_nd.status();
  absl::StatusOr<double> b_mv = Bhattacharyya(n, *mv);
  if (!b_mv.ok()) return b_mv.status();
  report.nd_bhattacharyya = *b_nd;
  report.mv_bhattacharyya = *b_mv;
  if (p_e >= std::exp(-*b_nd)) {
    report.regime = BoundRegime::kSlack;
    report.delta_floor = true;
    return report;
  }
  absl::StatusOr<double> beta = BetaAccuracy(n, *mv);
  if (!beta.ok()) return beta.status();
  absl::StatusOr<double> z = DesignZ(params.epsilon, params.theta0, params.cost);
  if (!z.ok()) return z.status();
  absl::StatusOr<MechanismConfig> cfg =
      DesignZ0Z1(*z, *beta, *beta, params.prior_w1);
  if (!cfg.ok()) return cfg.status();
  absl::StatusOr<double> total = ExpectedTotalPayment(cfg->z0, *beta, mv->mu1, 1);
  if (!total.ok()) return total.status();
  report.bound_per_user = *total;
  return report;
}

void KeyValueReport::Add(const std::string& key, double value) {
  entries_.emplace_back(key, absl::StrFormat("%.17g", value));
}

void KeyValueReport::AddText(const std::string& key,
                             const std::string& value) {
  entries_.emplace_back(key, value);
}

void KeyValueReport::Write(std::ostream& out) const {
  for (const auto& [key, value] : entries_) out << key << '=' << value << '\n';
}

absl::StatusOr<KeyValueReport> BuildAnalyticReport(
    const ModelParams& params, const DegreeDistribution& dist,
    double target_error) {
  if (absl::Status s = params.Validate(); !s.ok()) return s;
  const int64_t n = params.population;
  KeyValueReport r;
  r.Add("population", static_cast<double>(n));
  r.Add("theta1", params.theta1());
  r.Add("bar_a", BarA(params.theta0, params.theta1()));
  r.Add("mean_degree", dist.Mean());
  r.Add("second_moment_degree", dist.SecondMoment());
  r.Add("rho0", dist.rho0());
  absl::StatusOr<double> z = DesignZ(params.epsilon, params.theta0, params.cost);
  if (z.ok()) r.Add("z", *z);

  if (!params.equal_priors()) {
    absl::StatusOr<StrategyTable> table =
        BuildMvTable(dist.max_degree(), params);
    if (!table.ok()) return table.status();
    absl::StatusOr<PairStatistics> pairs =
        ComputePairStatistics(*table, params, dist);
    if (!pairs.ok()) return pairs.status();
    r.Add("mu1", pairs->mu[1]);
    r.Add("mu0", 1.0 - pairs->mu[0]);
    r.Add("kappa1", pairs->kappa[1]);
    r.Add("kappa0", pairs->kappa[0]);
    r.AddText("omitted",
              "tau,lambda,delta,delta_tilde,beta,z0,z1,expected_total_payment,"
              "bhattacharyya_mv,bhattacharyya_nd,payment_regime");
    r.AddText("omission_note",
              "unequal priors: no closed form for the majority accuracy, so "
              "the quantities built on it are not reported");
    return r;
  }

  absl::StatusOr<MomentSummary> mv = MvMomentsEqualPriors(params, dist);
  if (!mv.ok()) return mv.status();
  absl::StatusOr<MomentSummary> nd = NdMoments(params, dist);
  if (!nd.ok()) return nd.status();
  r.Add("tau", mv->tau);
  r.Add("lambda", mv->lambda);
  r.Add("mu1", mv->mu1);
  r.Add("mu0", mv->mu0);
  r.Add("kappa1", mv->kappa1);
  r.Add("kappa0", mv->kappa0);
  r.Add("delta", mv->delta);
  r.Add("delta_tilde", mv->delta_tilde);
  r.AddText("no_learning", mv->no_learning ? "true" : "false");
  // The same variance from the exact pairwise agreement probabilities.
  absl::StatusOr<StrategyTable> table = BuildMvTable(dist.max_degree(), params);
  if (!table.ok()) return table.status();
  absl::StatusOr<PairStatistics> pairs =
      ComputePairStatistics(*table, params, dist);
  if (!pairs.ok()) return pairs.status();
  r.Add("kappa1_pairwise", pairs->kappa[1]);

  absl::StatusOr<double> beta = BetaAccuracy(n, *mv);
  if (beta.ok()) r.Add("beta", *beta);
  if (z.ok() && beta.ok() && *beta > 0.5) {
    absl::StatusOr<MechanismConfig> cfg =
        DesignZ0Z1(*z, *beta, *beta, params.prior_w1);
    if (!cfg.ok()) return cfg.status();
    r.Add("z0", cfg->z0);
    r.Add("z1", cfg->z1);
    absl::StatusOr<double> total =
        ExpectedTotalPayment(cfg->z0, *beta, mv->mu1, n);
    if (!total.ok()) return total.status();
    r.Add("expected_total_payment", *total);
    r.Add("expected_payment_per_user", *total / static_cast<double>(n));
  } else {
    r.AddText("payment_note",
              "payment constants undefined (zero design scalar or majority "
              "accuracy <= 0.5)");
  }
  absl::StatusOr<double> b_mv = Bhattacharyya(n, *mv);
  if (b_mv.ok()) {
    r.Add("bhattacharyya_mv", *b_mv);
    r.Add("error_bound_mv", std::exp(-*b_mv));
  }
  r.Add("mu1_nd", nd->mu1);
  r.Add("kappa1_nd", nd->kappa1);
  absl::StatusOr<double> b_nd = Bhattacharyya(n, *nd);
  if (b_nd.ok()) {
    r.Add("bhattacharyya_nd", *b_nd);
    r.Add("error_bound_nd", std::exp(-*b_nd));
  }
  absl::StatusOr<double> beta_nd = BetaAccuracy(n, *nd);
  if (beta_nd.ok()) r.Add("beta_nd", *beta_nd);
  r.Add("target_error", target_error);
  absl::StatusOr<PaymentBoundReport> bound =
      PaymentBound(target_error, params, dist, n);
  if (bound.ok()) {
    const bool slack = bound->regime == BoundRegime::kSlack;
    r.AddText("payment_regime", slack ? "slack" : "tight");
    if (!slack) r.Add("bound_per_user", bound->bound_per_user);
  } else {
    r.AddText("payment_regime", "undefined");
    r.AddText("payment_regime_note", std::string(bound.status().message()));
  }
  return r;
}

}  // namespace privmarket
