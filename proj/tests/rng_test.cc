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

#include "privmarket/rng.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "gtest/gtest.h"

namespace privmarket {
namespace {

TEST(RngTest, SameKeyGivesSameStream) {
  Rng a(42, "trial", 7), b(42, "trial", 7);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.NextU64(), b.NextU64());
}

TEST(RngTest, DifferentKeysGiveDifferentStreams) {
  std::set<uint64_t> first;
  first.insert(Rng(42, "trial", 7).NextU64());
  first.insert(Rng(43, "trial", 7).NextU64());
  first.insert(Rng(42, "graph", 7).NextU64());
  first.insert(Rng(42, "trial", 8).NextU64());
  first.insert(Rng(42, "trial", uint64_t{7} << 32).NextU64());
  EXPECT_EQ(first.size(), 5u);
}

TEST(RngTest, UniformStaysInUnitInterval) {
  Rng rng(1, "u", 0);
  double lo = 1, hi = 0, sum = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  // Mean of U(0,1) has SE 1/sqrt(12 n).
  EXPECT_NEAR(sum / n, 0.5, 4.0 / std::sqrt(12.0 * n));
  EXPECT_LT(lo, 1e-4);
  EXPECT_GT(hi, 1 - 1e-4);
}

TEST(RngTest, BernoulliEdgeProbabilities) {
  Rng rng(3, "b", 0);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_FALSE(rng.Bernoulli(0.0));
    EXPECT_FALSE(rng.Bernoulli(-1.0));
    EXPECT_TRUE(rng.Bernoulli(1.0));
  }
}

TEST(RngTest, BernoulliFrequency) {
  Rng rng(5, "b", 1);
  const int n = 100000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += rng.Bernoulli(0.3);
  const double se = std::sqrt(0.3 * 0.7 / n);
  EXPECT_NEAR(static_cast<double>(hits) / n, 0.3, 4 * se);
}

TEST(RngTest, UniformIndexCoversRange) {
  Rng rng(9, "idx", 0);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 5000; ++i) ++counts[rng.UniformIndex(5)];
  for (int c : counts) EXPECT_GT(c, 800);
}

TEST(RngTest, HashTagIsFnv1a) {
  // FNV-1a offset basis for the empty string, and a published test vector.
  EXPECT_EQ(HashTag(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(HashTag("a"), 0xaf63dc4c8601ec8cULL);
}

}  // namespace
}  // namespace privmarket
