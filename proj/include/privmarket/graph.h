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

#ifndef PRIVMARKET_GRAPH_H_
#define PRIVMARKET_GRAPH_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "privmarket/rng.h"

namespace privmarket {

using NodeId = uint32_t;
using Edge = std::pair<NodeId, NodeId>;

// Undirected simple graph in compressed sparse row form. Neighbor lists are
// sorted; there are no self-loops and no repeated neighbors.
class Graph {
 public:
  Graph() = default;

  // Builds a simple graph on nodes [0, n). Self-loops are dropped and
  // repeated pairs (in either orientation) collapse to one edge.
  static Graph FromEdges(size_t n, std::vector<Edge> edges);

  size_t node_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  size_t edge_count() const { return neighbors_.size() / 2; }
  size_t degree(NodeId i) const { return offsets_[i + 1] - offsets_[i]; }
  size_t max_degree() const;

  std::span<const NodeId> neighbors(NodeId i) const {
    return {neighbors_.data() + offsets_[i], degree(i)};
  }

  // Position of node i's first neighbor in the flat adjacency array. Data
  // stored per directed incidence (e.g. group signals) uses this layout.
  size_t offset(NodeId i) const { return offsets_[i]; }
  size_t incidence_count() const { return neighbors_.size(); }

  // Every undirected edge once, as (u, v) with u < v, in sorted order.
  std::vector<Edge> Edges() const;

  bool operator==(const Graph& other) const = default;

 private:
  std::vector<size_t> offsets_;
  std::vector<NodeId> neighbors_;
};

// Finite-support degree distribution rho_d, d = 0..d_max.
class DegreeDistribution {
 public:
  // mass[d] is the probability of degree d. Masses must be nonnegative and
  // sum to one within 1e-12.
  static absl::StatusOr<DegreeDistribution> Create(std::vector<double> mass);
  static DegreeDistribution PointMass(size_t d);
  // Poisson(lambda) conditioned on D <= d_max.
  static absl::StatusOr<DegreeDistribution> TruncatedPoisson(double lambda,
                                                             size_t d_max);
  // Empirical degree distribution of a graph.
  static absl::StatusOr<DegreeDistribution> FromGraph(const Graph& g);

  size_t max_degree() const { return mass_.size() - 1; }
  double mass(size_t d) const { return d < mass_.size() ? mass_[d] : 0.0; }
  const std::vector<double>& masses() const { return mass_; }
  double Mean() const;
  double SecondMoment() const;
  double rho0() const { return mass_[0]; }

  // The distribution conditioned on D > 0; an error when rho0 = 1.
  absl::StatusOr<DegreeDistribution> ConditionalOnPositive() const;

  // Inverse-CDF draw.
  size_t Sample(Rng& rng) const;

 private:
  explicit DegreeDistribution(std::vector<double> mass)
      : mass_(std::move(mass)) {}
  std::vector<double> mass_;
};

struct ConfigurationModelOptions {
  int max_attempts = 1000;
  // Partner redraws allowed for one stub before the pairing is restarted.
  int max_stub_retries = 100;
};

absl::StatusOr<Graph> GenerateConfigurationModel(
    Rng& rng, const DegreeDistribution& dist, size_t n,
    const ConfigurationModelOptions& options = {});

// Parses "point:D", "poisson:LAMBDA:DMAX" or "masses:m0,m1,...".
absl::StatusOr<DegreeDistribution> ParseDegreeDistribution(
    absl::string_view spec);

absl::StatusOr<Graph> GenerateErdosRenyi(Rng& rng, size_t n,
                                         double avg_degree);

enum class Indexing { kAuto, kZeroBased, kOneBased };

struct IngestOptions {
  bool symmetrize = true;
  Indexing indexing = Indexing::kAuto;
};

struct IngestResult {
  Graph graph;
  // external_ids[dense id] is the identifier used in the source file.
  std::vector<int64_t> external_ids;
  size_t lines_read = 0;
  size_t self_loops_dropped = 0;
  size_t duplicates_collapsed = 0;
  // Directed pairs that had no reverse pair; only nonzero when
  // symmetrize=false, in which case they are discarded.
  size_t unreciprocated_dropped = 0;
};

// Reads a SNAP-style edge list: '#' comment lines, then "u v" pairs.
//
// With kAuto indexing the identifiers seen in the file are compacted to
// 0..N-1 in increasing order. kZeroBased/kOneBased keep the identifiers as
// indices, so nodes that never appear in an edge are kept as isolated nodes.
//
// symmetrize=true treats every line as an undirected tie. With
// symmetrize=false a tie is kept only when both directions are listed.
absl::StatusOr<IngestResult> IngestEdgeList(std::istream& in,
                                            const IngestOptions& options = {});

// Writes the graph back as an edge list, one line per undirected edge.
// If external_ids is non-empty it maps dense ids to the emitted labels.
void WriteEdgeList(std::ostream& out, const Graph& g,
                   const std::vector<int64_t>& external_ids = {});

struct SparsityReport {
  size_t d_max = 0;
  double n_quarter = 0;
  double ratio = 0;
  // Empirical E[D^{2 + delta}] for delta = 0.5.
  double moment_2_5 = 0;
  double threshold = 1.0;
  bool flagged = false;
};

SparsityReport CheckSparsity(const Graph& g, double threshold = 1.0);

struct DegreeMoments {
  double mean = 0;
  double second = 0;
  double rho0 = 0;
  std::optional<DegreeDistribution> rho_tilde;
};

absl::StatusOr<DegreeMoments> ComputeDegreeMoments(const Graph& g);

}  // namespace privmarket

#endif  // PRIVMARKET_GRAPH_H_
