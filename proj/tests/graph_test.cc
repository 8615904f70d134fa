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

#include "privmarket/graph.h"

#include <cmath>
#include <cstdint>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "privmarket/rng.h"

namespace privmarket {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;

TEST(GraphTest, FromEdgesDropsLoopsAndRepeats) {
  const Graph g =
      Graph::FromEdges(4, {{0, 1}, {1, 0}, {2, 2}, {1, 2}, {0, 1}, {3, 1}});
  EXPECT_EQ(g.node_count(), 4u);
  EXPECT_EQ(g.edge_count(), 3u);
  EXPECT_EQ(g.degree(1), 3u);
  EXPECT_EQ(g.degree(2), 1u);
  const std::span<const NodeId> nb = g.neighbors(1);
  EXPECT_THAT(std::vector<NodeId>(nb.begin(), nb.end()), ElementsAre(0, 2, 3));
  EXPECT_EQ(g.max_degree(), 3u);
  EXPECT_THAT(g.Edges(), ElementsAre(Edge{0, 1}, Edge{1, 2}, Edge{1, 3}));
  EXPECT_EQ(g.incidence_count(), 6u);
}

TEST(GraphTest, IsolatedNodesKept) {
  const Graph g = Graph::FromEdges(3, {});
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.edge_count(), 0u);
  EXPECT_EQ(g.max_degree(), 0u);
}

TEST(DegreeDistributionTest, CreateValidates) {
  EXPECT_TRUE(DegreeDistribution::Create({0.5, 0.5}).ok());
  EXPECT_FALSE(DegreeDistribution::Create({0.5, 0.6}).ok());
  EXPECT_FALSE(DegreeDistribution::Create({-0.1, 1.1}).ok());
  EXPECT_FALSE(DegreeDistribution::Create({}).ok());
}

TEST(DegreeDistributionTest, Moments) {
  absl::StatusOr<DegreeDistribution> d =
      DegreeDistribution::Create({0.25, 0.25, 0.5});
  ASSERT_TRUE(d.ok());
  EXPECT_DOUBLE_EQ(d->Mean(), 1.25);
  EXPECT_DOUBLE_EQ(d->SecondMoment(), 2.25);
  EXPECT_DOUBLE_EQ(d->rho0(), 0.25);
  absl::StatusOr<DegreeDistribution> t = d->ConditionalOnPositive();
  ASSERT_TRUE(t.ok());
  EXPECT_DOUBLE_EQ(t->mass(0), 0.0);
  EXPECT_NEAR(t->mass(1), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(t->mass(2), 2.0 / 3.0, 1e-15);
}

TEST(DegreeDistributionTest, ConditionalOfIsolatedFails) {
  const DegreeDistribution d = DegreeDistribution::PointMass(0);
  EXPECT_FALSE(d.ConditionalOnPositive().ok());
}

TEST(DegreeDistributionTest, TruncatedPoissonMatchesPmf) {
  absl::StatusOr<DegreeDistribution> d =
      DegreeDistribution::TruncatedPoisson(4.0, 20);
  ASSERT_TRUE(d.ok());
  double z = 0;
  std::vector<double> raw;
  double term = std::exp(-4.0);
  for (int k = 0; k <= 20; ++k) {
    raw.push_back(term);
    z += term;
    term *= 4.0 / (k + 1);
  }
  for (int k = 0; k <= 20; ++k) EXPECT_NEAR(d->mass(k), raw[k] / z, 1e-14);
  EXPECT_NEAR(d->Mean(), 4.0, 1e-6);
}

TEST(DegreeDistributionTest, SampleFrequencies) {
  absl::StatusOr<DegreeDistribution> d =
      DegreeDistribution::Create({0.2, 0.5, 0.3});
  ASSERT_TRUE(d.ok());
  Rng rng(1, "deg", 0);
  std::vector<int> counts(3, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[d->Sample(rng)];
  for (int k = 0; k < 3; ++k) {
    const double p = d->mass(k);
    EXPECT_NEAR(counts[k] / double(n), p, 4 * std::sqrt(p * (1 - p) / n));
  }
}

TEST(ParseDegreeDistributionTest, Forms) {
  absl::StatusOr<DegreeDistribution> a = ParseDegreeDistribution("point:3");
  ASSERT_TRUE(a.ok());
  EXPECT_EQ(a->mass(3), 1.0);
  absl::StatusOr<DegreeDistribution> b =
      ParseDegreeDistribution("poisson:2:10");
  ASSERT_TRUE(b.ok());
  EXPECT_EQ(b->max_degree(), 10u);
  absl::StatusOr<DegreeDistribution> c =
      ParseDegreeDistribution("masses:0.5,0,0.5");
  ASSERT_TRUE(c.ok());
  EXPECT_DOUBLE_EQ(c->Mean(), 1.0);
  EXPECT_FALSE(ParseDegreeDistribution("poisson:x:3").ok());
  EXPECT_FALSE(ParseDegreeDistribution("gaussian:1").ok());
}

TEST(ConfigurationModelTest, RealizesRegularDegreeSequence) {
  Rng rng(5, "graph", 0);
  absl::StatusOr<Graph> g =
      GenerateConfigurationModel(rng, DegreeDistribution::PointMass(3), 500);
  ASSERT_TRUE(g.ok()) << g.status();
  for (NodeId i = 0; i < 500; ++i) EXPECT_EQ(g->degree(i), 3u);
}

TEST(ConfigurationModelTest, PoissonDegreesHaveRightMean) {
  Rng rng(6, "graph", 0);
  absl::StatusOr<DegreeDistribution> d =
      DegreeDistribution::TruncatedPoisson(4.0, 20);
  ASSERT_TRUE(d.ok());
  absl::StatusOr<Graph> g = GenerateConfigurationModel(rng, *d, 5000);
  ASSERT_TRUE(g.ok()) << g.status();
  const double mean = 2.0 * g->edge_count() / 5000.0;
  // Degree variance is about 4; the sample mean has SE ~ 0.03.
  EXPECT_NEAR(mean, 4.0, 0.15);
}

TEST(ConfigurationModelTest, Deterministic) {
  absl::StatusOr<DegreeDistribution> d = ParseDegreeDistribution("poisson:4:20");
  ASSERT_TRUE(d.ok());
  Rng a(9, "graph", 0), b(9, "graph", 0);
  EXPECT_EQ(*GenerateConfigurationModel(a, *d, 300),
            *GenerateConfigurationModel(b, *d, 300));
}

TEST(ErdosRenyiTest, EdgeCountNearExpectation) {
  Rng rng(7, "graph", 0);
  absl::StatusOr<Graph> g = GenerateErdosRenyi(rng, 1000, 4.0);
  ASSERT_TRUE(g.ok());
  // Edges ~ Binomial(n(n-1)/2, p): mean 2000, sd ~ 44.7.
  EXPECT_NEAR(static_cast<double>(g->edge_count()), 2000.0, 4 * 44.7);
  EXPECT_FALSE(GenerateErdosRenyi(rng, 1, 1.0).ok());
  EXPECT_FALSE(GenerateErdosRenyi(rng, 10, 20.0).ok());
}

TEST(IngestTest, CommentsWhitespaceAndCommas) {
  std::istringstream in(
      "# a comment\n"
      "10 20\n"
      "\n"
      "20\t30\n"
      "30,10\n"
      "  # indented comment\n");
  absl::StatusOr<IngestResult> r = IngestEdgeList(in);
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_EQ(r->graph.node_count(), 3u);
  EXPECT_EQ(r->graph.edge_count(), 3u);
  EXPECT_THAT(r->external_ids, ElementsAre(10, 20, 30));
  EXPECT_EQ(r->lines_read, 6u);
}

TEST(IngestTest, SymmetrizeCollapsesReverseAndDropsLoops) {
  std::istringstream in("1 2\n2 1\n2 3\n3 3\n1 2\n");
  absl::StatusOr<IngestResult> r = IngestEdgeList(in);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->graph.node_count(), 3u);
  EXPECT_EQ(r->graph.edge_count(), 2u);
  EXPECT_EQ(r->self_loops_dropped, 1u);
  EXPECT_EQ(r->duplicates_collapsed, 2u);
}

TEST(IngestTest, WithoutSymmetrizeKeepsOnlyReciprocated) {
  std::istringstream in("1 2\n2 1\n2 3\n4 1\n");
  IngestOptions opts;
  opts.symmetrize = false;
  absl::StatusOr<IngestResult> r = IngestEdgeList(in, opts);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->graph.node_count(), 4u);
  EXPECT_EQ(r->graph.edge_count(), 1u);
  EXPECT_EQ(r->unreciprocated_dropped, 2u);
}

TEST(IngestTest, OneBasedKeepsGaps) {
  std::istringstream in("1 2\n5 2\n");
  IngestOptions opts;
  opts.indexing = Indexing::kOneBased;
  absl::StatusOr<IngestResult> r = IngestEdgeList(in, opts);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->graph.node_count(), 5u);
  EXPECT_EQ(r->graph.degree(2), 0u);  // id 3 never appears
  EXPECT_EQ(r->graph.degree(1), 2u);  // id 2
}

TEST(IngestTest, ZeroBasedRejectsNegativeIds) {
  std::istringstream in("0 1\n-1 2\n");
  IngestOptions opts;
  opts.indexing = Indexing::kZeroBased;
  absl::StatusOr<IngestResult> r = IngestEdgeList(in, opts);
  EXPECT_FALSE(r.ok());
  EXPECT_THAT(r.status().message(), HasSubstr("line 2"));
}

TEST(IngestTest, MalformedLineReportsLineNumber) {
  std::istringstream in("# header\n1 2\n3 x\n");
  absl::StatusOr<IngestResult> r = IngestEdgeList(in);
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_THAT(r.status().message(), HasSubstr("line 3"));
  std::istringstream three("1 2 3\n");
  EXPECT_FALSE(IngestEdgeList(three).ok());
}

TEST(IngestTest, EmptyInputIsAnError) {
  std::istringstream in("# only comments\n\n");
  EXPECT_FALSE(IngestEdgeList(in).ok());
}

TEST(IngestTest, WriteReadRoundTrip) {
  Rng rng(3, "graph", 0);
  absl::StatusOr<Graph> g = GenerateErdosRenyi(rng, 60, 1.5);
  ASSERT_TRUE(g.ok());
  std::ostringstream out;
  WriteEdgeList(out, *g);
  std::istringstream in(out.str());
  IngestOptions opts;
  opts.indexing = Indexing::kZeroBased;
  absl::StatusOr<IngestResult> r = IngestEdgeList(in, opts);
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_EQ(r->graph, *g);
}

TEST(SparsityTest, StarIsFlagged) {
  std::vector<Edge> edges;
  for (NodeId i = 1; i < 100; ++i) edges.emplace_back(0, i);
  const Graph star = Graph::FromEdges(100, edges);
  const SparsityReport r = CheckSparsity(star);
  EXPECT_EQ(r.d_max, 99u);
  EXPECT_NEAR(r.n_quarter, std::pow(100.0, 0.25), 1e-12);
  EXPECT_TRUE(r.flagged);
  // (99^2.5 + 99 * 1) / 100.
  EXPECT_NEAR(r.moment_2_5, (std::pow(99.0, 2.5) + 99.0) / 100.0, 1e-9);
}

TEST(SparsityTest, PathIsNotFlagged) {
  std::vector<Edge> edges;
  for (NodeId i = 0; i + 1 < 100; ++i) edges.emplace_back(i, i + 1);
  EXPECT_FALSE(CheckSparsity(Graph::FromEdges(100, edges)).flagged);
}

TEST(DegreeMomentsTest, PathGraphExact) {
  // Path on 4 nodes plus one isolated node: degrees 1,2,2,1,0.
  const Graph g = Graph::FromEdges(5, {{0, 1}, {1, 2}, {2, 3}});
  absl::StatusOr<DegreeMoments> m = ComputeDegreeMoments(g);
  ASSERT_TRUE(m.ok());
  EXPECT_EQ(m->mean, 6.0 / 5.0);
  EXPECT_EQ(m->second, 10.0 / 5.0);
  EXPECT_EQ(m->rho0, 1.0 / 5.0);
  ASSERT_TRUE(m->rho_tilde.has_value());
  EXPECT_DOUBLE_EQ(m->rho_tilde->mass(1), 0.5);
  EXPECT_DOUBLE_EQ(m->rho_tilde->mass(2), 0.5);
}

}  // namespace
}  // namespace privmarket
