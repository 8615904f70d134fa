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

// Independent reference computations used by the tests. Nothing here calls
// into the closed forms under test; everything is brute force.

#ifndef PRIVMARKET_TESTS_ORACLES_H_
#define PRIVMARKET_TESTS_ORACLES_H_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "privmarket/model.h"
#include "privmarket/strategy.h"

namespace privmarket::oracle {

// C(m, k) p^k (1-p)^(m-k) by repeated multiplication.
inline double NaiveBinomPmf(int64_t k, int64_t m, double p) {
  if (k < 0 || k > m) return 0.0;
  double c = 1.0;
  for (int64_t i = 1; i <= k; ++i) {
    c = c * static_cast<double>(m - k + i) / static_cast<double>(i);
  }
  double v = c;
  for (int64_t i = 0; i < k; ++i) v *= p;
  for (int64_t i = 0; i < m - k; ++i) v *= 1.0 - p;
  return v;
}

inline double PrReport(const StrategyTable& t, size_t d, size_t f, int s,
                       int x) {
  const ActionDistribution& a = t.row(d, f).given(s);
  return x == 1 ? a.p1 : a.p0;
}

// Calls body(bits) for every bit pattern of length n.
inline void ForEachPattern(int n, const std::function<void(uint32_t)>& body) {
  for (uint32_t b = 0; b < (1u << n); ++b) body(b);
}

inline int Bit(uint32_t b, int k) { return static_cast<int>((b >> k) & 1u); }

// Pr(X_i = w | W = w) for a degree-d user, enumerating the user's private
// signal, each friend's private signal and each relay flip.
inline double EnumerateMu(const StrategyTable& t, const ModelParams& p,
                          size_t d, int w) {
  const int n = 1 + 2 * static_cast<int>(d);
  double total = 0;
  ForEachPattern(n, [&](uint32_t b) {
    const int s = Bit(b, 0);
    double pr = s == w ? p.theta0 : 1.0 - p.theta0;
    size_t f = 0;
    for (size_t k = 0; k < d; ++k) {
      const int sj = Bit(b, 1 + 2 * static_cast<int>(k));
      const int flip = Bit(b, 2 + 2 * static_cast<int>(k));
      pr *= sj == w ? p.theta0 : 1.0 - p.theta0;
      pr *= flip ? p.alpha : 1.0 - p.alpha;
      f += static_cast<size_t>(sj ^ flip);
    }
    total += pr * PrReport(t, d, f, s, w);
  });
  return total;
}

// Group-signal probability Pr(C = c | W = w) for a friend not otherwise
// involved.
inline double PrC(const ModelParams& p, int c, int w) {
  const double q = w == 1 ? p.theta1() : 1.0 - p.theta1();
  return c == 1 ? q : 1.0 - q;
}

// Pr(X_i = X_j = w | W = w) for adjacent i, j (degrees a, b) with no common
// friend. Enumerates both private signals, both relays across the edge and
// every other group signal.
inline double EnumerateVarsigma(const StrategyTable& t, const ModelParams& p,
                                size_t a, size_t b, int w) {
  const int others_i = static_cast<int>(a) - 1;
  const int others_j = static_cast<int>(b) - 1;
  const int n = 4 + others_i + others_j;
  double total = 0;
  ForEachPattern(n, [&](uint32_t bits) {
    const int si = Bit(bits, 0), sj = Bit(bits, 1);
    const int flip_ij = Bit(bits, 2), flip_ji = Bit(bits, 3);
    double pr = (si == w ? p.theta0 : 1.0 - p.theta0) *
                (sj == w ? p.theta0 : 1.0 - p.theta0) *
                (flip_ij ? p.alpha : 1.0 - p.alpha) *
                (flip_ji ? p.alpha : 1.0 - p.alpha);
    size_t fi = static_cast<size_t>(sj ^ flip_ij);
    size_t fj = static_cast<size_t>(si ^ flip_ji);
    for (int k = 0; k < others_i; ++k) {
      const int c = Bit(bits, 4 + k);
      pr *= PrC(p, c, w);
      fi += static_cast<size_t>(c);
    }
    for (int k = 0; k < others_j; ++k) {
      const int c = Bit(bits, 4 + others_i + k);
      pr *= PrC(p, c, w);
      fj += static_cast<size_t>(c);
    }
    total += pr * PrReport(t, a, fi, si, w) * PrReport(t, b, fj, sj, w);
  });
  return total;
}

// Pr(X_i = X_k = w | W = w) for non-adjacent i, k (degrees a, b) with
// exactly one common friend l.
inline double EnumerateVarsigmaTilde(const StrategyTable& t,
                                     const ModelParams& p, size_t a, size_t b,
                                     int w) {
  const int others_i = static_cast<int>(a) - 1;
  const int others_k = static_cast<int>(b) - 1;
  const int n = 5 + others_i + others_k;
  double total = 0;
  ForEachPattern(n, [&](uint32_t bits) {
    const int sl = Bit(bits, 0), si = Bit(bits, 1), sk = Bit(bits, 2);
    const int flip_i = Bit(bits, 3), flip_k = Bit(bits, 4);
    double pr = (sl == w ? p.theta0 : 1.0 - p.theta0) *
                (si == w ? p.theta0 : 1.0 - p.theta0) *
                (sk == w ? p.theta0 : 1.0 - p.theta0) *
                (flip_i ? p.alpha : 1.0 - p.alpha) *
                (flip_k ? p.alpha : 1.0 - p.alpha);
    size_t fi = static_cast<size_t>(sl ^ flip_i);
    size_t fk = static_cast<size_t>(sl ^ flip_k);
    for (int k = 0; k < others_i; ++k) {
      const int c = Bit(bits, 5 + k);
      pr *= PrC(p, c, w);
      fi += static_cast<size_t>(c);
    }
    for (int k = 0; k < others_k; ++k) {
      const int c = Bit(bits, 5 + others_i + k);
      pr *= PrC(p, c, w);
      fk += static_cast<size_t>(c);
    }
    total += pr * PrReport(t, a, fi, si, w) * PrReport(t, b, fk, sk, w);
  });
  return total;
}

// Expected utility of the three candidate behaviours for a user who saw f
// ones among d group signals, under the genie-style payment with design
// scalar z: always report 1, always report 0, or randomized response at
// level eta.
struct UtilityModel {
  double theta0, theta1, p1, p0, z;
  const CostFunction* cost;
  size_t d, f;

  double Y1() const {
    return std::pow(theta1, double(f)) * std::pow(1 - theta1, double(d - f));
  }
  double Y0() const {
    return std::pow(theta1, double(d - f)) * std::pow(1 - theta1, double(f));
  }
  double Nd1() const { return z * Y1() / (p1 * Y1() + p0 * Y0()); }
  double Nd0() const { return z * Y0() / (p1 * Y1() + p0 * Y0()); }
  double Sr(double eta) const {
    const double q = std::exp(eta) / (1.0 + std::exp(eta));
    return z * (Y1() + Y0()) * (q * theta0 + (1 - q) * (1 - theta0)) /
               (p1 * Y1() + p0 * Y0()) -
           cost->Value(eta);
  }
};

struct BruteForceChoice {
  Regime regime = Regime::kNonDisclosive;
  double xi = 0;
  double best_sr = 0;
  double best_nd = 0;
};

// Grid search over eta in [0, eta_max] with the given step.
inline BruteForceChoice BruteForceBestResponse(const UtilityModel& u,
                                               double step, double eta_max) {
  BruteForceChoice c;
  c.best_sr = -std::numeric_limits<double>::infinity();
  const int64_t steps = static_cast<int64_t>(std::llround(eta_max / step));
  for (int64_t k = 0; k <= steps; ++k) {
    const double eta = static_cast<double>(k) * step;
    const double v = u.Sr(eta);
    if (v > c.best_sr) {
      c.best_sr = v;
      c.xi = eta;
    }
  }
  c.best_nd = std::max(u.Nd1(), u.Nd0());
  c.regime = c.best_sr >= c.best_nd ? Regime::kRandomizedResponse
                                    : Regime::kNonDisclosive;
  return c;
}

}  // namespace privmarket::oracle

#endif  // PRIVMARKET_TESTS_ORACLES_H_
