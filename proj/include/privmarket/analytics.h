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

#ifndef PRIVMARKET_ANALYTICS_H_
#define PRIVMARKET_ANALYTICS_H_

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "privmarket/graph.h"
#include "privmarket/mechanism.h"
#include "privmarket/model.h"
#include "privmarket/strategy.h"

namespace privmarket {

// gamma(k; m, p): binomial pmf, zero outside 0..m and for non-integer k.
double BinomPmf(double k, int64_t m, double p);

// Gamma(k, l; m, p): sum of the pmf over integers ceil(k)..floor(l).
double BinomRange(double k, double l, int64_t m, double p);

struct NuValues {
  double sr = 0;  // Pr(|F - d/2| <= tau | W = 1)
  double nd = 0;  // Pr(F > d/2 + tau | W = 1)
};

NuValues ComputeNu(size_t d, double tau, double theta1);

// First and second order statistics of a single report. mu1 and mu0 are
// Pr(X = 1 | W = 1) and Pr(X = 1 | W = 0); kappa_w is the asymptotic
// variance of the report sum divided by N under W = w.
struct MomentSummary {
  double mu1 = 0;
  double mu0 = 0;
  double kappa1 = 0;
  double kappa0 = 0;
  double lambda = 0;
  double delta = 0;
  double delta_tilde = 0;
  double tau = 0;
  // Set when every user is isolated and the social terms vanish.
  bool no_learning = false;
};

// Closed forms for the equilibrium strategy under equal priors.
absl::StatusOr<MomentSummary> MvMomentsEqualPriors(
    const ModelParams& params, const DegreeDistribution& dist);

// Closed forms for the group-majority baseline (fair coin at ties).
absl::StatusOr<MomentSummary> NdMoments(const ModelParams& params,
                                        const DegreeDistribution& dist);

// Exact single-report and pairwise agreement probabilities for an arbitrary
// strategy table, indexed by world state w:
//   mu[w]            Pr(X_i = w | W = w)
//   varsigma[w]      Pr(X_i = X_j = w | W = w), i ~ j, no common friend
//   varsigma_tilde[w] Pr(X_i = X_k = w | W = w), i, k not adjacent, one
//                    common friend
//   kappa[w]         the asymptotic variance coefficient built from them
// Friends' degrees follow the distribution conditioned on D > 0.
struct PairStatistics {
  double mu[2] = {0, 0};
  double varsigma[2] = {0, 0};
  double varsigma_tilde[2] = {0, 0};
  double kappa[2] = {0, 0};
};

absl::StatusOr<PairStatistics> ComputePairStatistics(
    const StrategyTable& table, const ModelParams& params,
    const DegreeDistribution& dist);

// Summary view of exact pair statistics (mu0 = 1 - mu[0]).
MomentSummary SummaryFromPairs(const PairStatistics& pairs);

// Moments of the report sum on one realized graph: every edge and every
// two-hop path contributes the covariance implied by the actual degrees of
// its endpoints. Short cycles are ignored (locally tree-like graphs). The
// table must never abstain. Only mu1, mu0, kappa1 and kappa0 are set.
absl::StatusOr<MomentSummary> GraphMoments(const StrategyTable& table,
                                           const ModelParams& params,
                                           const Graph& graph);

double StdNormalCdf(double x);

// Pr(M_{-i} = W) under the Gaussian approximation; equal priors only.
absl::StatusOr<double> BetaAccuracy(int64_t n, const MomentSummary& summary);

// Total expected payment of the peer mechanism, Z (1 - beta + mu1 /
// (2 beta - 1)) N, as stated for equal priors with Z = Z0 = Z1.
absl::StatusOr<double> ExpectedTotalPayment(double z, double beta, double mu1,
                                            int64_t n);

// Z (beta mu1 + (1 - beta)(1 - mu1)) N: the payment obtained by treating
// a user's report and the others' majority as independent.
absl::StatusOr<double> ExpectedTotalPaymentIndependent(double z, double beta,
                                                       double mu1, int64_t n);

// (N / 4) (mu1 - mu0)^2 / (kappa1 + kappa0).
absl::StatusOr<double> Bhattacharyya(int64_t n, const MomentSummary& summary);

// Payment constants for the baseline mechanism at scale delta (equal or
// unequal priors); every payment is O(delta).
absl::StatusOr<MechanismConfig> DesignNdMechanism(double delta,
                                                  double beta_nd,
                                                  double theta0,
                                                  double prior_w1);

enum class BoundRegime { kSlack, kTight };

struct PaymentBoundReport {
  BoundRegime regime = BoundRegime::kTight;
  double nd_bhattacharyya = 0;
  double mv_bhattacharyya = 0;
  // Per-user payment bound of the equilibrium mechanism (tight regime).
  double bound_per_user = 0;
  // True in the slack regime: any per-user payment delta > 0 suffices.
  bool delta_floor = false;
};

absl::StatusOr<PaymentBoundReport> PaymentBound(double p_e,
                                                const ModelParams& params,
                                                const DegreeDistribution& dist,
                                                int64_t n);

// Ordered key/value block, written one "key=value" per line.
class KeyValueReport {
 public:
  void Add(const std::string& key, double value);
  void AddText(const std::string& key, const std::string& value);
  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }
  void Write(std::ostream& out) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

// Everything the analytics subcommand reports. Under unequal priors the
// quantities that need the equal-priors closed forms are omitted and an
// omission note is added.
absl::StatusOr<KeyValueReport> BuildAnalyticReport(
    const ModelParams& params, const DegreeDistribution& dist,
    double target_error);

}  // namespace privmarket

#endif  // PRIVMARKET_ANALYTICS_H_
