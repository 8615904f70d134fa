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

#include "privmarket/strategy.h"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace privmarket {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kXiTolerance = 1e-10;
constexpr double kEtaCeiling = 1e4;

// log(1 + e^x) without overflow.
double Softplus(double x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double LogOdds(double p) { return std::log(p / (1.0 - p)); }

ActionDistribution Deterministic(int x) {
  ActionDistribution a;
  (x == 1 ? a.p1 : a.p0) = 1.0;
  return a;
}

}  // namespace

absl::Status ActionDistribution::Validate() const {
  for (double p : {p1, p0, p_bot}) {
    if (!(p >= 0.0 && p <= 1.0)) {
      return absl::InvalidArgumentError("action probability outside [0, 1]");
    }
  }
  if (std::abs(p1 + p0 + p_bot - 1.0) > 1e-12) {
    return absl::InvalidArgumentError("action probabilities do not sum to 1");
  }
  return absl::OkStatus();
}

double PrivacyLevel(const ActionDistribution& row_s1,
                    const ActionDistribution& row_s0) {
  const double a[3] = {row_s1.p1, row_s1.p0, row_s1.p_bot};
  const double b[3] = {row_s0.p1, row_s0.p0, row_s0.p_bot};
  double worst = 0;
  for (int mask = 1; mask < 8; ++mask) {
    double pa = 0, pb = 0;
    for (int k = 0; k < 3; ++k) {
      if (mask & (1 << k)) {
        pa += a[k];
        pb += b[k];
      }
    }
    if (pa == 0 && pb == 0) continue;
    if (pa == 0 || pb == 0) return kInf;
    worst = std::max(worst, std::abs(std::log(pa / pb)));
  }
  return worst;
}

double BarA(double theta0, double theta1) {
  return 0.5 * LogOdds(theta0) / LogOdds(theta1);
}

int MlEstimate(int s, size_t f, size_t d, double a_bar) {
  const double half = 0.5 * static_cast<double>(d);
  if (static_cast<double>(f) > half + a_bar) return 1;
  if (static_cast<double>(f) < half - a_bar) return 0;
  return s;
}

ActionDistribution RandomizedResponse(double xi, int s) {
  // Both probabilities are formed directly so neither loses precision.
  const double keep = 1.0 / (1.0 + std::exp(-xi));
  const double flip = 1.0 / (1.0 + std::exp(xi));
  ActionDistribution a;
  a.p1 = s == 1 ? keep : flip;
  a.p0 = s == 1 ? flip : keep;
  return a;
}

double UtilitySlope(double eta, size_t f, size_t d,
                    const ModelParams& params) {
  const double eps = params.epsilon;
  const double g_eps = params.cost.Derivative(eps);
  const double marginal = params.cost.Derivative(eta);
  if (g_eps == 0) return -marginal;
  // Posterior-weight fraction (1 + r) / (1 + p0 (r - 1)) with
  // r = (theta1 / (1 - theta1))^(d - 2f), evaluated without forming r.
  const double log_r = (static_cast<double>(d) - 2.0 * static_cast<double>(f)) *
                       LogOdds(params.theta1());
  const double p0 = params.prior(0), p1 = params.prior(1);
  double log_fraction;
  if (log_r > 0) {
    const double inv = std::exp(-log_r);
    log_fraction = std::log1p(inv) - std::log(p1 * inv + p0);
  } else {
    const double r = std::exp(log_r);
    log_fraction = std::log1p(r) - std::log(p1 + p0 * r);
  }
  const double log_gain = (eta - eps) + 2.0 * (Softplus(eps) - Softplus(eta)) +
                          std::log(0.5 * g_eps) + log_fraction;
  return std::exp(log_gain) - marginal;
}

absl::StatusOr<double> SolveXi(size_t f, size_t d, const ModelParams& params) {
  auto slope = [&](double eta) { return UtilitySlope(eta, f, d, params); };
  if (!(slope(0.0) > 0)) return 0.0;
  // Under equal priors the posterior fraction is exactly 2 and epsilon is
  // the root; accept it when the slope vanishes there to rounding.
  const double eps = params.epsilon;
  if (std::abs(slope(eps)) <=
      1e-12 * std::max(1.0, params.cost.Derivative(eps))) {
    return eps;
  }
  double lo = 0.0, hi = eps + 1.0;
  while (slope(hi) > 0) {
    lo = hi;
    hi *= 2.0;
    if (hi > kEtaCeiling) {
      return absl::FailedPreconditionError(absl::StrCat(
          "utility slope stays positive up to eta=", kEtaCeiling,
          " (f=", f, ", d=", d, "); the cost function grows too slowly"));
    }
  }
  while (hi - lo > kXiTolerance) {
    const double mid = 0.5 * (lo + hi);
    const double v = slope(mid);
    if (v == 0) return mid;
    (v > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

absl::StatusOr<double> Upsilon(int side, double eta,
                               const ModelParams& params) {
  if (!(eta >= 0)) {
    return absl::InvalidArgumentError("eta must be >= 0");
  }
  const double theta0 = params.theta0;
  const double bar_a = BarA(theta0, params.theta1());
  const double eps = params.epsilon;
  const double g_eta = params.cost.Value(eta);
  const double g_eps = params.cost.Derivative(eps);
  // B(eta) * e^-eta, the SR cost expressed in payment units.
  double b_scaled = 0;
  if (g_eta > 0) {
    if (g_eps == 0) {
      return absl::OutOfRangeError(
          "cut undefined: positive SR cost with a zero payment scalar");
    }
    b_scaled = (2.0 * theta0 - 1.0) * 2.0 * g_eta * (1.0 + std::exp(-eta)) *
               std::exp(eps - 2.0 * Softplus(eps)) / g_eps;
  }
  const double u = std::exp(-eta);
  const double numerator =
      (1.0 - theta0) + theta0 * u + params.prior(side) * b_scaled;
  const double denominator =
      theta0 + (1.0 - theta0) * u - params.prior(1 - side) * b_scaled;
  if (!(denominator > 0)) {
    return absl::OutOfRangeError(absl::StrCat(
        "log-domain violation in cut ", side, " at eta=", eta,
        ": SR cost exceeds the achievable payment"));
  }
  const double a = -std::log(numerator / denominator) /
                   (2.0 * LogOdds(params.theta1()));
  return std::clamp(a, 0.0, bar_a);
}

absl::StatusOr<DegreeStrategy> BuildMvStrategy(size_t d,
                                               const ModelParams& params) {
  if (absl::Status s = params.Validate(); !s.ok()) return s;
  DegreeStrategy out;
  out.d = d;
  const double half = 0.5 * static_cast<double>(d);
  double sr_min = kInf, sr_max = -kInf;
  for (size_t f = 0; f <= d; ++f) {
    StrategyRow row;
    row.f = f;
    absl::StatusOr<double> xi = SolveXi(f, d, params);
    if (!xi.ok()) return xi.status();
    row.xi = *xi;
    absl::StatusOr<double> u0 = Upsilon(0, row.xi, params);
    if (!u0.ok()) return u0.status();
    absl::StatusOr<double> u1 = Upsilon(1, row.xi, params);
    if (!u1.ok()) return u1.status();
    row.upsilon0 = *u0;
    row.upsilon1 = *u1;
    const double x = static_cast<double>(f);
    if (d > 0 && x < half - row.upsilon0) {
      row.given_s0 = row.given_s1 = Deterministic(0);
    } else if (d > 0 && x > half + row.upsilon1) {
      row.given_s0 = row.given_s1 = Deterministic(1);
    } else {
      row.regime = Regime::kRandomizedResponse;
      row.given_s0 = RandomizedResponse(row.xi, 0);
      row.given_s1 = RandomizedResponse(row.xi, 1);
      sr_min = std::min(sr_min, x);
      sr_max = std::max(sr_max, x);
    }
    row.privacy_level = PrivacyLevel(row.given_s1, row.given_s0);
    out.rows.push_back(row);
  }
  if (sr_max >= sr_min) {
    out.tau0 = half - sr_min;
    out.tau1 = sr_max - half;
  }
  return out;
}

absl::StatusOr<StrategyTable> BuildMvTable(size_t d_max,
                                           const ModelParams& params) {
  std::vector<DegreeStrategy> degrees;
  for (size_t d = 0; d <= d_max; ++d) {
    absl::StatusOr<DegreeStrategy> ds = BuildMvStrategy(d, params);
    if (!ds.ok()) return ds.status();
    degrees.push_back(*std::move(ds));
  }
  return StrategyTable(std::move(degrees));
}

absl::StatusOr<double> EqualPriorsTau(const ModelParams& params) {
  if (!params.equal_priors()) {
    return absl::FailedPreconditionError(
        "the closed-form cut needs equal priors");
  }
  if (absl::Status s = params.Validate(); !s.ok()) return s;
  const double theta0 = params.theta0;
  const double eps = params.epsilon;
  const double g = params.cost.Value(eps);
  const double ratio = g == 0 ? 0.0 : g / params.cost.Derivative(eps);
  const double e = std::exp(eps);
  const double numerator =
      e * (e * theta0 + 1.0 - (2.0 * theta0 - 1.0) * ratio) + 1.0 - theta0;
  const double denominator =
      e * (e * (1.0 - theta0) + 1.0 + (2.0 * theta0 - 1.0) * ratio) + theta0;
  if (!(numerator > 0)) {
    return absl::OutOfRangeError(
        "log-domain violation in the closed-form cut");
  }
  const double a =
      std::log(numerator / denominator) / (2.0 * LogOdds(params.theta1()));
  return std::clamp(a, 0.0, BarA(theta0, params.theta1()));
}

DegreeStrategy NdBaselineStrategy(size_t d) {
  DegreeStrategy out;
  out.d = d;
  for (size_t f = 0; f <= d; ++f) {
    StrategyRow row;
    row.f = f;
    if (2 * f > d) {
      row.given_s0 = row.given_s1 = Deterministic(1);
    } else if (2 * f < d) {
      row.given_s0 = row.given_s1 = Deterministic(0);
    } else {
      row.given_s0.p1 = row.given_s0.p0 = 0.5;
      row.given_s1 = row.given_s0;
    }
    row.privacy_level = PrivacyLevel(row.given_s1, row.given_s0);
    out.rows.push_back(row);
  }
  return out;
}

StrategyTable BuildNdTable(size_t d_max) {
  std::vector<DegreeStrategy> degrees;
  for (size_t d = 0; d <= d_max; ++d) degrees.push_back(NdBaselineStrategy(d));
  return StrategyTable(std::move(degrees));
}

void WriteStrategyTable(std::ostream& out, const StrategyTable& table) {
  out << "degree,f,s,p1,p0,p_bot,regime,xi\n";
  for (const DegreeStrategy& ds : table.degrees()) {
    for (const StrategyRow& row : ds.rows) {
      for (int s = 0; s <= 1; ++s) {
        const ActionDistribution& a = row.given(s);
        const bool sr = row.regime == Regime::kRandomizedResponse;
        out << absl::StrFormat("%d,%d,%d,%.17g,%.17g,%.17g,%s,%.17g\n", ds.d,
                               row.f, s, a.p1, a.p0, a.p_bot, sr ? "SR" : "ND",
                               sr ? row.xi : 0.0);
      }
    }
  }
}

}  // namespace privmarket
