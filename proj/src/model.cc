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

#include "privmarket/model.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"

namespace privmarket {

namespace {

constexpr int kAuditPoints = 1000;
constexpr double kAuditMax = 10.0;
constexpr double kAuditSlack = 1e-12;

}  // namespace

CostFunction CostFunction::Quadratic() { return CostFunction(); }

CostFunction CostFunction::Linear(double slope) {
  CostFunction g;
  g.kind_ = CostKind::kLinear;
  g.slope_ = slope;
  return g;
}

absl::StatusOr<CostFunction> CostFunction::LinearCapped(double knee) {
  if (!(knee > 0) || !std::isfinite(knee)) {
    return absl::InvalidArgumentError("cost knee must be positive and finite");
  }
  CostFunction g;
  g.kind_ = CostKind::kLinearCapped;
  g.knee_ = knee;
  return g;
}

absl::StatusOr<CostFunction> CostFunction::FromTable(
    std::vector<CostKnot> knots) {
  if (knots.empty() || knots.front().zeta != 0.0) {
    return absl::InvalidArgumentError(
        "cost table must start with a knot at zeta = 0");
  }
  for (size_t k = 0; k < knots.size(); ++k) {
    if (!std::isfinite(knots[k].zeta) || !std::isfinite(knots[k].slope)) {
      return absl::InvalidArgumentError(
          absl::StrCat("cost table knot ", k, " is not finite"));
    }
    if (k > 0 && !(knots[k].zeta > knots[k - 1].zeta)) {
      return absl::InvalidArgumentError(
          absl::StrCat("cost table zeta values must increase (knot ", k, ")"));
    }
  }
  CostFunction g;
  g.kind_ = CostKind::kCustomTable;
  g.prefix_.assign(knots.size(), 0.0);
  for (size_t k = 1; k < knots.size(); ++k) {
    g.prefix_[k] = g.prefix_[k - 1] + 0.5 * (knots[k].zeta - knots[k - 1].zeta) *
                                          (knots[k].slope + knots[k - 1].slope);
  }
  g.knots_ = std::move(knots);
  if (absl::Status s = g.Audit(); !s.ok()) return s;
  return g;
}

double CostFunction::Value(double zeta) const {
  if (std::isinf(zeta)) return std::numeric_limits<double>::infinity();
  switch (kind_) {
    case CostKind::kQuadratic:
      return zeta * zeta;
    case CostKind::kLinear:
      return slope_ * zeta;
    case CostKind::kLinearCapped:
      return zeta <= knee_ ? zeta * zeta : knee_ * (2.0 * zeta - knee_);
    case CostKind::kCustomTable: {
      auto it = std::upper_bound(
          knots_.begin(), knots_.end(), zeta,
          [](double z, const CostKnot& k) { return z < k.zeta; });
      const size_t k = static_cast<size_t>(it - knots_.begin()) - 1;
      const double dz = zeta - knots_[k].zeta;
      return prefix_[k] + 0.5 * dz * (knots_[k].slope + Derivative(zeta));
    }
  }
  return 0;
}

double CostFunction::Derivative(double zeta) const {
  switch (kind_) {
    case CostKind::kQuadratic:
      return 2.0 * zeta;
    case CostKind::kLinear:
      return slope_;
    case CostKind::kLinearCapped:
      return 2.0 * std::min(zeta, knee_);
    case CostKind::kCustomTable: {
      auto it = std::upper_bound(
          knots_.begin(), knots_.end(), zeta,
          [](double z, const CostKnot& k) { return z < k.zeta; });
      const size_t k = static_cast<size_t>(it - knots_.begin()) - 1;
      if (k + 1 == knots_.size()) return knots_[k].slope;
      const double t =
          (zeta - knots_[k].zeta) / (knots_[k + 1].zeta - knots_[k].zeta);
      return knots_[k].slope + t * (knots_[k + 1].slope - knots_[k].slope);
    }
  }
  return 0;
}

absl::Status CostFunction::Audit() const {
  if (Value(0.0) != 0.0) {
    return absl::InvalidArgumentError("cost function must satisfy g(0) = 0");
  }
  double prev_value = 0, prev_slope = Derivative(0.0);
  if (!(prev_slope >= 0)) {
    return absl::InvalidArgumentError("cost derivative is negative at 0");
  }
  for (int k = 1; k < kAuditPoints; ++k) {
    const double z = kAuditMax * k / (kAuditPoints - 1);
    const double value = Value(z), slope = Derivative(z);
    if (!std::isfinite(value) || !std::isfinite(slope)) {
      return absl::InvalidArgumentError(
          absl::StrCat("cost function not finite at zeta=", z));
    }
    if (value < prev_value - kAuditSlack * std::abs(prev_value)) {
      return absl::InvalidArgumentError(
          absl::StrCat("cost function decreases near zeta=", z));
    }
    if (slope < prev_slope - kAuditSlack * std::abs(prev_slope)) {
      return absl::InvalidArgumentError(
          absl::StrCat("cost function is not convex near zeta=", z));
    }
    prev_value = value;
    prev_slope = slope;
  }
  return absl::OkStatus();
}

absl::StatusOr<double> Theta1(double theta0, double alpha) {
  if (!(theta0 > 0.5 && theta0 < 1.0)) {
    return absl::OutOfRangeError(
        absl::StrCat("theta0 must lie in (0.5, 1), got ", theta0));
  }
  if (!(alpha >= 0.0 && alpha < 0.5)) {
    return absl::OutOfRangeError(
        absl::StrCat("alpha must lie in [0, 0.5), got ", alpha));
  }
  return theta0 * (1.0 - alpha) + (1.0 - theta0) * alpha;
}

absl::Status ModelParams::Validate() const {
  if (!(prior_w1 > 0.0 && prior_w1 < 1.0)) {
    return absl::OutOfRangeError(
        absl::StrCat("prior_w1 must lie in (0, 1), got ", prior_w1));
  }
  if (absl::StatusOr<double> t1 = Theta1(theta0, alpha); !t1.ok()) {
    return t1.status();
  }
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    return absl::OutOfRangeError(
        absl::StrCat("epsilon must be finite and >= 0, got ", epsilon));
  }
  if (population < 2) {
    return absl::OutOfRangeError(
        absl::StrCat("population must be >= 2, got ", population));
  }
  return cost.Audit();
}

double ModelParams::theta1() const {
  return theta0 * (1.0 - alpha) + (1.0 - theta0) * alpha;
}

int SampleWorld(Rng& rng, double prior_w1) {
  return rng.Bernoulli(prior_w1) ? 1 : 0;
}

std::vector<uint8_t> SamplePrivateSignals(Rng& rng, int w, double theta0,
                                          size_t n) {
  std::vector<uint8_t> s(n);
  for (size_t i = 0; i < n; ++i) {
    s[i] = static_cast<uint8_t>(rng.Bernoulli(theta0) ? w : 1 - w);
  }
  return s;
}

std::vector<uint8_t> SampleGroupSignals(Rng& rng, const Graph& g,
                                        const std::vector<uint8_t>& s,
                                        double alpha) {
  std::vector<uint8_t> c(g.incidence_count());
  for (NodeId i = 0; i < g.node_count(); ++i) {
    size_t slot = g.offset(i);
    for (NodeId j : g.neighbors(i)) {
      c[slot++] = static_cast<uint8_t>(s[j] ^ (rng.Bernoulli(alpha) ? 1 : 0));
    }
  }
  return c;
}

SignalRealization SampleRealization(Rng& rng, const Graph& g,
                                    const ModelParams& params) {
  SignalRealization r;
  r.w = SampleWorld(rng, params.prior_w1);
  r.s = SamplePrivateSignals(rng, r.w, params.theta0, g.node_count());
  r.c = SampleGroupSignals(rng, g, r.s, params.alpha);
  return r;
}

}  // namespace privmarket
