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

#include <vector>

#include "absl/status/status.h"
#include "gtest/gtest.h"
#include "privmarket/model.h"

namespace privmarket {
namespace {

TEST(GeniePaymentTest, PaysInverseOfPriorWhenCorrect) {
  EXPECT_DOUBLE_EQ(GeniePayment(Report::kOne, 1, 2.0, 0.8), 2.5);
  EXPECT_DOUBLE_EQ(GeniePayment(Report::kZero, 0, 2.0, 0.8), 10.0);
  EXPECT_EQ(GeniePayment(Report::kOne, 0, 2.0, 0.8), 0.0);
  EXPECT_EQ(GeniePayment(Report::kBottom, 1, 2.0, 0.8), 0.0);
}

TEST(MajorityTest, ExcludesOwnReport) {
  const std::vector<Report> r = {Report::kOne, Report::kOne, Report::kZero,
                                 Report::kZero};
  // Others of user 0: {1, 0, 0} -> 0. Others of user 2: {1, 1, 0} -> 1.
  EXPECT_EQ(MajorityExcluding(r, 0), Majority::kZero);
  EXPECT_EQ(MajorityExcluding(r, 2), Majority::kOne);
}

TEST(MajorityTest, EvenOthersTieGoesToZero) {
  const std::vector<Report> r = {Report::kOne, Report::kOne, Report::kZero};
  // Others of user 0: {1, 0}: one 1 out of two does not reach 2.
  EXPECT_EQ(MajorityExcluding(r, 0), Majority::kZero);
}

TEST(MajorityTest, BottomIsIgnoredAndUndefinedForAbstainers) {
  const std::vector<Report> r = {Report::kBottom, Report::kOne,
                                 Report::kBottom, Report::kOne};
  EXPECT_EQ(MajorityExcluding(r, 0), Majority::kUndefined);
  EXPECT_EQ(MajorityExcluding(r, 1), Majority::kOne);
  const std::vector<Report> alone = {Report::kOne, Report::kBottom};
  EXPECT_EQ(MajorityExcluding(alone, 0), Majority::kUndefined);
}

TEST(MajorityTest, CountsAgreeWithScan) {
  const std::vector<Report> r = {Report::kOne,  Report::kZero, Report::kOne,
                                 Report::kBottom, Report::kZero,
                                 Report::kOne};
  for (size_t i = 0; i < r.size(); ++i) {
    EXPECT_EQ(MajorityExcluding(r, i), MajorityFromCounts(r[i], 5, 3)) << i;
  }
}

TEST(PeerPaymentTest, PaysOnAgreementOnly) {
  MechanismConfig cfg;
  cfg.z0 = 3;
  cfg.z1 = 2;
  EXPECT_EQ(PeerPayment(Report::kOne, Majority::kOne, cfg), 2);
  EXPECT_EQ(PeerPayment(Report::kZero, Majority::kZero, cfg), 3);
  EXPECT_EQ(PeerPayment(Report::kOne, Majority::kZero, cfg), 0);
  EXPECT_EQ(PeerPayment(Report::kZero, Majority::kOne, cfg), 0);
  EXPECT_EQ(PeerPayment(Report::kBottom, Majority::kOne, cfg), 0);
  EXPECT_EQ(PeerPayment(Report::kOne, Majority::kUndefined, cfg), 0);
}

TEST(DesignZTest, FrozenValues) {
  EXPECT_NEAR(*DesignZ(0.1, 0.7, CostFunction::Quadratic()),
              1.0025020840279018, 1e-14);
  EXPECT_NEAR(*DesignZ(0.1, 0.7, CostFunction::Linear(1.0)),
              5.012510420139509, 1e-13);
}

TEST(DesignZTest, RejectsBadInputs) {
  EXPECT_FALSE(DesignZ(-1, 0.7, CostFunction::Quadratic()).ok());
  EXPECT_FALSE(DesignZ(0.1, 0.5, CostFunction::Quadratic()).ok());
  EXPECT_EQ(DesignZ(0.0, 0.7, CostFunction::Quadratic()).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(DesignZ0Z1Test, EqualPriorsAndPerfectMajority) {
  absl::StatusOr<MechanismConfig> cfg = DesignZ0Z1(1.0, 1.0, 1.0, 0.5);
  ASSERT_TRUE(cfg.ok());
  EXPECT_DOUBLE_EQ(cfg->z0, 2.0);
  EXPECT_DOUBLE_EQ(cfg->z1, 2.0);
}

// In expectation over the majority, the peer mechanism rewards reporting 1
// over 0 by exactly what the genie does, in each world state.
TEST(DesignZ0Z1Test, ReproducesGenieIncentives) {
  for (double p1 : {0.3, 0.5, 0.8}) {
    for (double b0 : {0.6, 0.9}) {
      for (double b1 : {0.7, 0.99}) {
        const double z = 1.3;
        absl::StatusOr<MechanismConfig> c = DesignZ0Z1(z, b0, b1, p1);
        ASSERT_TRUE(c.ok());
        const double gap_w1 = c->z1 * b1 - c->z0 * (1 - b1);
        const double gap_w0 = c->z1 * (1 - b0) - c->z0 * b0;
        EXPECT_NEAR(gap_w1,
                    GeniePayment(Report::kOne, 1, z, p1) -
                        GeniePayment(Report::kZero, 1, z, p1),
                    1e-12);
        EXPECT_NEAR(gap_w0,
                    GeniePayment(Report::kOne, 0, z, p1) -
                        GeniePayment(Report::kZero, 0, z, p1),
                    1e-12);
      }
    }
  }
}

TEST(DesignZ0Z1Test, DegenerateInputsFail) {
  EXPECT_EQ(DesignZ0Z1(1.0, 0.5, 0.5, 0.5).status().code(),
            absl::StatusCode::kFailedPrecondition);
  EXPECT_FALSE(DesignZ0Z1(1.0, 0.9, 0.9, 1.0).ok());
}

}  // namespace
}  // namespace privmarket
