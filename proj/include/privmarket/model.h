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

#ifndef PRIVMARKET_MODEL_H_
#define PRIVMARKET_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "privmarket/graph.h"
#include "privmarket/rng.h"

namespace privmarket {

enum class CostKind { kQuadratic, kLinear, kLinearCapped, kCustomTable };

// One knot of a tabulated marginal cost: g'(zeta) = slope at zeta.
struct CostKnot {
  double zeta;
  double slope;
};

// Privacy cost g(zeta): convex, nondecreasing, g(0) = 0.
class CostFunction {
 public:
  // g(zeta) = zeta^2.
  static CostFunction Quadratic();
  // g(zeta) = slope * zeta.
  static CostFunction Linear(double slope = 1.0);
  // zeta^2 up to the knee, then the tangent line: the marginal cost is
  // capped at 2 * knee. Convex and continuously differentiable.
  static absl::StatusOr<CostFunction> LinearCapped(double knee);
  // Piecewise-linear marginal cost through the knots (first knot at
  // zeta = 0, constant after the last one); g is its exact integral.
  static absl::StatusOr<CostFunction> FromTable(std::vector<CostKnot> knots);

  // Checks g(0) = 0, g >= 0, g nondecreasing and g' nondecreasing on a
  // 1000-point grid over [0, 10].
  absl::Status Audit() const;

  // g(+inf) = +inf.
  double Value(double zeta) const;
  double Derivative(double zeta) const;

  CostKind kind() const { return kind_; }
  double knee() const { return knee_; }
  double slope() const { return slope_; }
  const std::vector<CostKnot>& knots() const { return knots_; }

 private:
  CostKind kind_ = CostKind::kQuadratic;
  double knee_ = 0;
  double slope_ = 1;
  std::vector<CostKnot> knots_;
  // Prefix integrals of the tabulated marginal cost, one per knot.
  std::vector<double> prefix_;
};

struct ModelParams {
  double prior_w1 = 0.5;
  double theta0 = 0.7;
  double alpha = 0.25;
  double epsilon = 0.1;
  int64_t population = 250;
  CostFunction cost = CostFunction::Quadratic();

  absl::Status Validate() const;
  // Quality of a group signal; only meaningful on validated params.
  double theta1() const;
  // Pr(W = w).
  double prior(int w) const { return w == 1 ? prior_w1 : 1.0 - prior_w1; }
  bool equal_priors() const { return prior_w1 == 0.5; }
};

absl::StatusOr<double> Theta1(double theta0, double alpha);

// Draws W. Accepts degenerate priors 0 and 1 (always 0 / always 1).
int SampleWorld(Rng& rng, double prior_w1);

// Each entry independently equals w with probability theta0.
std::vector<uint8_t> SamplePrivateSignals(Rng& rng, int w, double theta0,
                                          size_t n);

// Group signals laid out like the graph's flat adjacency: entry
// g.offset(i) + k is receiver i's noisy copy of s[g.neighbors(i)[k]].
// Each direction is flipped independently with probability alpha.
std::vector<uint8_t> SampleGroupSignals(Rng& rng, const Graph& g,
                                        const std::vector<uint8_t>& s,
                                        double alpha);

struct SignalRealization {
  int w = 0;
  std::vector<uint8_t> s;
  std::vector<uint8_t> c;
};

SignalRealization SampleRealization(Rng& rng, const Graph& g,
                                    const ModelParams& params);

}  // namespace privmarket

#endif  // PRIVMARKET_MODEL_H_
