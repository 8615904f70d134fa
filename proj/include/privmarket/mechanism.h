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

#ifndef PRIVMARKET_MECHANISM_H_
#define PRIVMARKET_MECHANISM_H_

#include <cstddef>
#include <cstdint>
#include <span>

#include "absl/status/statusor.h"
#include "privmarket/model.h"

namespace privmarket {

enum class Report : uint8_t { kZero = 0, kOne = 1, kBottom = 2 };

enum class Majority { kZero, kOne, kUndefined };

struct MechanismConfig {
  double z = 0;
  double z0 = 0;
  double z1 = 0;
  double beta0 = 1;
  double beta1 = 1;
  double epsilon = 0;
};

// Payment with access to the true state: z_g / Pr(W = w) when x = w.
double GeniePayment(Report x, int w, double z_g, double prior_w1);

// Majority of the other participants' reports. n counts every non-bottom
// report including user i's own; M = 1 iff the others' ones reach
// floor((n - 1) / 2) + 1. Undefined when user i abstains or n <= 1.
Majority MajorityExcluding(std::span<const Report> reports, size_t i);

// Same rule from aggregate counts over all users: `participants` non-bottom
// reports of which `ones` are 1, and user i's own report.
Majority MajorityFromCounts(Report own, size_t participants, size_t ones);

double PeerPayment(Report x, Majority m, const MechanismConfig& cfg);

// Design scalar that makes epsilon the SR level at an exact tie.
absl::StatusOr<double> DesignZ(double epsilon, double theta0,
                               const CostFunction& cost);

// Payment constants from the design scalar and the majority-consistency
// probabilities. Fills z, z0, z1, beta0, beta1.
absl::StatusOr<MechanismConfig> DesignZ0Z1(double z, double beta0,
                                           double beta1, double prior_w1);

}  // namespace privmarket

#endif  // PRIVMARKET_MECHANISM_H_
