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

#include "privmarket/mechanism.h"

#include <cmath>
#include <cstddef>
#include <span>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"

namespace privmarket {

double GeniePayment(Report x, int w, double z_g, double prior_w1) {
  if (x == Report::kBottom || static_cast<int>(x) != w) return 0.0;
  return z_g / (w == 1 ? prior_w1 : 1.0 - prior_w1);
}

Majority MajorityFromCounts(Report own, size_t participants, size_t ones) {
  if (own == Report::kBottom || participants <= 1) return Majority::kUndefined;
  const size_t others = ones - (own == Report::kOne ? 1 : 0);
  return others >= (participants - 1) / 2 + 1 ? Majority::kOne
                                               : Majority::kZero;
}

Majority MajorityExcluding(std::span<const Report> reports, size_t i) {
  size_t participants = 0, ones = 0;
  for (Report r : reports) {
    participants += r != Report::kBottom;
    ones += r == Report::kOne;
  }
  return MajorityFromCounts(reports[i], participants, ones);
}

double PeerPayment(Report x, Majority m, const MechanismConfig& cfg) {
  if (x == Report::kBottom || m == Majority::kUndefined) return 0.0;
  if (x == Report::kOne) return m == Majority::kOne ? cfg.z1 : 0.0;
  return m == Majority::kZero ? cfg.z0 : 0.0;
}

absl::StatusOr<double> DesignZ(double epsilon, double theta0,
                               const CostFunction& cost) {
  if (!(epsilon >= 0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError("epsilon must be finite and >= 0");
  }
  if (!(theta0 > 0.5 && theta0 < 1.0)) {
    return absl::OutOfRangeError("theta0 must lie in (0.5, 1)");
  }
  const double slope = cost.Derivative(epsilon);
  if (epsilon == 0 && slope == 0) {
    return absl::FailedPreconditionError(
        "epsilon = 0 with zero marginal cost gives a zero payment scalar");
  }
  const double e = std::exp(epsilon);
  return slope * (e + 1.0) * (e + 1.0) / (2.0 * e * (2.0 * theta0 - 1.0));
}

absl::StatusOr<MechanismConfig> DesignZ0Z1(double z, double beta0,
                                           double beta1, double prior_w1) {
  const double denom_beta = beta0 + beta1 - 1.0;
  const double p1 = prior_w1, p0 = 1.0 - prior_w1;
  if (!(denom_beta > 0) || !(p1 > 0 && p0 > 0)) {
    return absl::FailedPreconditionError(absl::StrCat(
        "degenerate payment design: beta0 + beta1 - 1 = ", denom_beta,
        ", prior_w1 = ", prior_w1));
  }
  const double denom = denom_beta * p1 * p0;
  MechanismConfig cfg;
  cfg.z = z;
  cfg.beta0 = beta0;
  cfg.beta1 = beta1;
  cfg.z0 = z * (p1 * beta1 + p0 * (1.0 - beta0)) / denom;
  cfg.z1 = z * (p1 * (1.0 - beta1) + p0 * beta0) / denom;
  return cfg;
}

}  // namespace privmarket
