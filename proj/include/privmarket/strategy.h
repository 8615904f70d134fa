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

#ifndef PRIVMARKET_STRATEGY_H_
#define PRIVMARKET_STRATEGY_H_

#include <cstddef>
#include <ostream>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "privmarket/model.h"

namespace privmarket {

// Distribution of a report over {1, 0, bottom}.
struct ActionDistribution {
  double p1 = 0;
  double p0 = 0;
  double p_bot = 0;

  absl::Status Validate() const;
  bool operator==(const ActionDistribution&) const = default;
};

enum class Regime { kNonDisclosive, kRandomizedResponse };

struct StrategyRow {
  size_t f = 0;
  Regime regime = Regime::kNonDisclosive;
  // Solved SR level for this f. Kept for ND rows too (it is computed before
  // the regime is known) but only used by SR rows.
  double xi = 0;
  // Cuts Upsilon_0 / Upsilon_1 evaluated at xi.
  double upsilon0 = 0;
  double upsilon1 = 0;
  ActionDistribution given_s0;
  ActionDistribution given_s1;
  double privacy_level = 0;

  const ActionDistribution& given(int s) const {
    return s == 1 ? given_s1 : given_s0;
  }
};

struct DegreeStrategy {
  size_t d = 0;
  std::vector<StrategyRow> rows;  // rows[f], f = 0..d
  // Realized widths of the SR band: SR rows span [d/2 - tau0, d/2 + tau1].
  // Both are zero when no row plays SR.
  double tau0 = 0;
  double tau1 = 0;
};

class StrategyTable {
 public:
  StrategyTable() = default;
  explicit StrategyTable(std::vector<DegreeStrategy> degrees)
      : degrees_(std::move(degrees)) {}

  bool covers(size_t d) const { return d < degrees_.size(); }
  size_t max_degree() const { return degrees_.size() - 1; }
  const DegreeStrategy& degree(size_t d) const { return degrees_[d]; }
  const StrategyRow& row(size_t d, size_t f) const {
    return degrees_[d].rows[f];
  }
  const std::vector<DegreeStrategy>& degrees() const { return degrees_; }

 private:
  std::vector<DegreeStrategy> degrees_;
};

// Worst-case absolute log-likelihood ratio over all nonempty report events;
// 0/0 counts as ratio 1 and a one-sided zero gives +infinity.
double PrivacyLevel(const ActionDistribution& row_s1,
                    const ActionDistribution& row_s0);

// Half the ratio of private to group log-odds: the majority margin beyond
// which the group signals outweigh the private one.
double BarA(double theta0, double theta1);

int MlEstimate(int s, size_t f, size_t d, double a_bar);

// Symmetric randomized response row: report s w.p. e^xi / (1 + e^xi).
ActionDistribution RandomizedResponse(double xi, int s);

// Derivative of the SR utility in the privacy level eta, scaled so that
// the payment constant matches the design scalar at level epsilon.
double UtilitySlope(double eta, size_t f, size_t d, const ModelParams& params);

absl::StatusOr<double> SolveXi(size_t f, size_t d, const ModelParams& params);

// Cut on side 0 (report-0 side) or 1 at SR level eta, clamped to [0, bar A].
absl::StatusOr<double> Upsilon(int side, double eta,
                               const ModelParams& params);

absl::StatusOr<DegreeStrategy> BuildMvStrategy(size_t d,
                                               const ModelParams& params);
absl::StatusOr<StrategyTable> BuildMvTable(size_t d_max,
                                           const ModelParams& params);

// Closed-form common cut under equal priors.
absl::StatusOr<double> EqualPriorsTau(const ModelParams& params);

// Majority of the group signals, fair coin at ties; ignores s.
DegreeStrategy NdBaselineStrategy(size_t d);
StrategyTable BuildNdTable(size_t d_max);

// CSV columns: degree,f,s,p1,p0,p_bot,regime,xi.
void WriteStrategyTable(std::ostream& out, const StrategyTable& table);

}  // namespace privmarket

#endif  // PRIVMARKET_STRATEGY_H_
