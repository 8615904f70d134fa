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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/string_view.h"
#include "absl/strings/strip.h"

namespace privmarket {

Graph Graph::FromEdges(size_t n, std::vector<Edge> edges) {
  for (auto& e : edges) {
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  edges.erase(std::remove_if(edges.begin(), edges.end(),
                             [](const Edge& e) { return e.first == e.second; }),
              edges.end());
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  Graph g;
  g.offsets_.assign(n + 1, 0);
  for (const auto& [u, v] : edges) {
    ++g.offsets_[u + 1];
    ++g.offsets_[v + 1];
  }
  std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
  g.neighbors_.resize(2 * edges.size());
  std::vector<size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& [u, v] : edges) {
    g.neighbors_[fill[u]++] = v;
    g.neighbors_[fill[v]++] = u;
  }
  for (size_t i = 0; i < n; ++i) {
    std::sort(g.neighbors_.begin() + g.offsets_[i],
              g.neighbors_.begin() + g.offsets_[i + 1]);
  }
  return g;
}

size_t Graph::max_degree() const {
  size_t best = 0;
  for (size_t i = 0; i < node_count(); ++i) {
    best = std::max(best, degree(static_cast<NodeId>(i)));
  }
  return best;
}

std::vector<Edge> Graph::Edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (NodeId u = 0; u < node_count(); ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

absl::StatusOr<DegreeDistribution> DegreeDistribution::Create(
    std::vector<double> mass) {
  if (mass.empty()) {
    return absl::InvalidArgumentError("degree distribution has no support");
  }
  double total = 0;
  for (size_t d = 0; d < mass.size(); ++d) {
    if (!(mass[d] >= 0) || !std::isfinite(mass[d])) {
      return absl::InvalidArgumentError(
          absl::StrCat("degree mass at d=", d, " is not a nonnegative number"));
    }
    total += mass[d];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    return absl::InvalidArgumentError(
        absl::StrCat("degree masses sum to ", total, ", expected 1"));
  }
  while (mass.size() > 1 && mass.back() == 0) mass.pop_back();
  return DegreeDistribution(std::move(mass));
}

DegreeDistribution DegreeDistribution::PointMass(size_t d) {
  std::vector<double> mass(d + 1, 0.0);
  mass[d] = 1.0;
  return DegreeDistribution(std::move(mass));
}

absl::StatusOr<DegreeDistribution> DegreeDistribution::TruncatedPoisson(
    double lambda, size_t d_max) {
  if (!(lambda >= 0) || !std::isfinite(lambda)) {
    return absl::InvalidArgumentError("Poisson rate must be finite and >= 0");
  }
  std::vector<double> mass(d_max + 1);
  for (size_t d = 0; d <= d_max; ++d) {
    mass[d] = lambda == 0 ? (d == 0 ? 1.0 : 0.0)
                          : std::exp(d * std::log(lambda) - lambda -
                                     std::lgamma(d + 1.0));
  }
  const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
  for (double& m : mass) m /= total;
  // Renormalizing can leave the sum one ulp off; absorb it into the mode.
  const double drift =
      1.0 - std::accumulate(mass.begin(), mass.end(), 0.0);
  *std::max_element(mass.begin(), mass.end()) += drift;
  return Create(std::move(mass));
}

absl::StatusOr<DegreeDistribution> DegreeDistribution::FromGraph(
    const Graph& g) {
  if (g.node_count() == 0) {
    return absl::InvalidArgumentError("graph has no nodes");
  }
  std::vector<double> counts(g.max_degree() + 1, 0.0);
  for (NodeId i = 0; i < g.node_count(); ++i) counts[g.degree(i)] += 1;
  const double n = static_cast<double>(g.node_count());
  for (double& c : counts) c /= n;
  const double drift =
      1.0 - std::accumulate(counts.begin(), counts.end(), 0.0);
  *std::max_element(counts.begin(), counts.end()) += drift;
  return Create(std::move(counts));
}

double DegreeDistribution::Mean() const {
  double m = 0;
  for (size_t d = 0; d < mass_.size(); ++d) m += d * mass_[d];
  return m;
}

double DegreeDistribution::SecondMoment() const {
  double m = 0;
  for (size_t d = 0; d < mass_.size(); ++d) m += double(d) * d * mass_[d];
  return m;
}

absl::StatusOr<DegreeDistribution>
DegreeDistribution::ConditionalOnPositive() const {
  if (rho0() >= 1.0) {
    return absl::FailedPreconditionError(
        "conditional degree distribution undefined: every node is isolated");
  }
  std::vector<double> mass = mass_;
  mass[0] = 0;
  const double scale = 1.0 - rho0();
  for (double& m : mass) m /= scale;
  const double drift = 1.0 - std::accumulate(mass.begin(), mass.end(), 0.0);
  *std::max_element(mass.begin(), mass.end()) += drift;
  return DegreeDistribution(std::move(mass));
}

size_t DegreeDistribution::Sample(Rng& rng) const {
  const double u = rng.Uniform();
  double acc = 0;
  for (size_t d = 0; d < mass_.size(); ++d) {
    acc += mass_[d];
    if (u < acc) return d;
  }
  // u landed in the rounding gap above the last cumulative value.
  size_t d = mass_.size() - 1;
  while (d > 0 && mass_[d] == 0) --d;
  return d;
}

namespace {

bool Adjacent(const std::vector<std::vector<NodeId>>& adj, NodeId u,
              NodeId v) {
  const auto& a = adj[u].size() <= adj[v].size() ? adj[u] : adj[v];
  const NodeId other = adj[u].size() <= adj[v].size() ? v : u;
  return std::find(a.begin(), a.end(), other) != a.end();
}

// One pass of random stub matching. Returns false when a stub cannot find
// a partner that keeps the graph simple.
bool TryPairing(Rng& rng, const std::vector<size_t>& degrees, int retries,
                std::vector<Edge>& edges) {
  std::vector<NodeId> stubs;
  for (NodeId i = 0; i < degrees.size(); ++i) {
    stubs.insert(stubs.end(), degrees[i], i);
  }
  std::shuffle(stubs.begin(), stubs.end(), rng.engine());
  std::vector<std::vector<NodeId>> adj(degrees.size());
  edges.clear();
  while (!stubs.empty()) {
    const NodeId u = stubs.back();
    stubs.pop_back();
    bool matched = false;
    for (int r = 0; r < retries && !stubs.empty(); ++r) {
      const size_t j = rng.UniformIndex(stubs.size());
      const NodeId v = stubs[j];
      if (v == u || Adjacent(adj, u, v)) continue;
      std::swap(stubs[j], stubs.back());
      stubs.pop_back();
      adj[u].push_back(v);
      adj[v].push_back(u);
      edges.emplace_back(u, v);
      matched = true;
      break;
    }
    if (!matched) return false;
  }
  return true;
}

}  // namespace

absl::StatusOr<Graph> GenerateConfigurationModel(
    Rng& rng, const DegreeDistribution& dist, size_t n,
    const ConfigurationModelOptions& options) {
  if (n < 2) {
    return absl::InvalidArgumentError("configuration model needs n >= 2");
  }
  std::vector<size_t> degrees(n);
  size_t total = 0;
  for (size_t i = 0; i < n; ++i) {
    degrees[i] = dist.Sample(rng);
    total += degrees[i];
  }
  // An odd stub count cannot be paired: redraw one degree until it is even.
  int redraws = 0;
  while (total % 2 == 1) {
    if (++redraws > options.max_attempts) {
      return absl::ResourceExhaustedError(absl::StrCat(
          "could not reach an even degree sum after ", options.max_attempts,
          " redraws"));
    }
    const size_t i = rng.UniformIndex(n);
    total -= degrees[i];
    degrees[i] = dist.Sample(rng);
    total += degrees[i];
  }

  std::vector<Edge> edges;
  for (int attempt = 1; attempt <= options.max_attempts; ++attempt) {
    if (TryPairing(rng, degrees, options.max_stub_retries, edges)) {
      return Graph::FromEdges(n, std::move(edges));
    }
  }
  const size_t d_max = *std::max_element(degrees.begin(), degrees.end());
  return absl::ResourceExhaustedError(absl::StrCat(
      "configuration-model pairing failed after ", options.max_attempts,
      " attempts (n=", n, ", degree sum=", total, ", max degree=", d_max,
      ")"));
}

absl::StatusOr<DegreeDistribution> ParseDegreeDistribution(
    absl::string_view spec) {
  std::vector<absl::string_view> parts = absl::StrSplit(spec, ':');
  auto bad = [&]() {
    return absl::InvalidArgumentError(absl::StrCat(
        "bad degree distribution \"", spec,
        "\" (expected point:D, poisson:LAMBDA:DMAX or masses:m0,m1,...)"));
  };
  if (parts.size() == 2 && parts[0] == "point") {
    size_t d = 0;
    if (!absl::SimpleAtoi(parts[1], &d)) return bad();
    return DegreeDistribution::PointMass(d);
  }
  if (parts.size() == 3 && parts[0] == "poisson") {
    double lambda = 0;
    size_t d_max = 0;
    if (!absl::SimpleAtod(parts[1], &lambda) ||
        !absl::SimpleAtoi(parts[2], &d_max)) {
      return bad();
    }
    return DegreeDistribution::TruncatedPoisson(lambda, d_max);
  }
  if (parts.size() == 2 && parts[0] == "masses") {
    std::vector<double> mass;
    for (absl::string_view token : absl::StrSplit(parts[1], ',')) {
      double m = 0;
      if (!absl::SimpleAtod(token, &m)) return bad();
      mass.push_back(m);
    }
    return DegreeDistribution::Create(std::move(mass));
  }
  return bad();
}

absl::StatusOr<Graph> GenerateErdosRenyi(Rng& rng, size_t n,
                                         double avg_degree) {
  if (n < 2) {
    return absl::InvalidArgumentError("Erdos-Renyi graph needs n >= 2");
  }
  if (!(avg_degree >= 0) || avg_degree > static_cast<double>(n - 1)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "average degree ", avg_degree, " outside [0, ", n - 1, "]"));
  }
  const double p = avg_degree / static_cast<double>(n - 1);
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (rng.Bernoulli(p)) edges.emplace_back(u, v);
    }
  }
  return Graph::FromEdges(n, std::move(edges));
}

absl::StatusOr<IngestResult> IngestEdgeList(std::istream& in,
                                            const IngestOptions& options) {
  IngestResult result;
  std::vector<std::pair<int64_t, int64_t>> raw;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    absl::string_view view = absl::StripAsciiWhitespace(line);
    if (view.empty() || view.front() == '#') continue;
    std::vector<absl::string_view> tokens =
        absl::StrSplit(view, absl::ByAnyChar(" \t,"), absl::SkipEmpty());
    int64_t u = 0, v = 0;
    if (tokens.size() != 2 || !absl::SimpleAtoi(tokens[0], &u) ||
        !absl::SimpleAtoi(tokens[1], &v)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "malformed edge at line ", line_no, ": \"", view, "\""));
    }
    const int64_t lowest = options.indexing == Indexing::kOneBased ? 1 : 0;
    if (options.indexing != Indexing::kAuto && (u < lowest || v < lowest)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "node id below ", lowest, " at line ", line_no));
    }
    raw.emplace_back(u, v);
  }
  result.lines_read = line_no;
  if (raw.empty()) {
    return absl::InvalidArgumentError("edge list is empty");
  }

  // Map external identifiers to dense ids.
  size_t n = 0;
  std::map<int64_t, NodeId> dense;
  if (options.indexing == Indexing::kAuto) {
    for (const auto& [u, v] : raw) {
      dense.emplace(u, 0);
      dense.emplace(v, 0);
    }
    NodeId next = 0;
    for (auto& [id, index] : dense) {
      index = next++;
      result.external_ids.push_back(id);
    }
    n = dense.size();
  } else {
    const int64_t shift = options.indexing == Indexing::kOneBased ? 1 : 0;
    int64_t max_id = 0;
    for (const auto& [u, v] : raw) max_id = std::max({max_id, u, v});
    n = static_cast<size_t>(max_id - shift + 1);
    for (size_t i = 0; i < n; ++i) result.external_ids.push_back(i + shift);
  }
  auto to_dense = [&](int64_t id) -> NodeId {
    if (options.indexing == Indexing::kAuto) return dense.at(id);
    return static_cast<NodeId>(
        id - (options.indexing == Indexing::kOneBased ? 1 : 0));
  };

  std::set<Edge> directed;
  std::vector<Edge> edges;
  for (const auto& [a, b] : raw) {
    const NodeId u = to_dense(a), v = to_dense(b);
    if (u == v) {
      ++result.self_loops_dropped;
      continue;
    }
    if (!directed.emplace(u, v).second) {
      ++result.duplicates_collapsed;
      continue;
    }
  }
  for (const auto& [u, v] : directed) {
    const bool has_reverse = directed.count({v, u}) > 0;
    if (options.symmetrize) {
      if (has_reverse && v < u) {
        ++result.duplicates_collapsed;  // Reverse of a pair already kept.
        continue;
      }
      edges.emplace_back(u, v);
    } else if (has_reverse) {
      if (u < v) edges.emplace_back(u, v);
    } else {
      ++result.unreciprocated_dropped;
    }
  }
  result.graph = Graph::FromEdges(n, std::move(edges));
  return result;
}

void WriteEdgeList(std::ostream& out, const Graph& g,
                   const std::vector<int64_t>& external_ids) {
  auto label = [&](NodeId i) -> int64_t {
    return external_ids.empty() ? static_cast<int64_t>(i) : external_ids[i];
  };
  out << "# Undirected graph\n";
  out << "# Nodes: " << g.node_count() << " Edges: " << g.edge_count()
      << "\n";
  out << "# FromNodeId\tToNodeId\n";
  for (NodeId u = 0; u < g.node_count(); ++u) {
    // Isolated nodes are written as self-loops, which ingestion drops while
    // still registering the node; this keeps write/read round trips exact.
    if (g.degree(u) == 0) {
      out << label(u) << '\t' << label(u) << '\n';
      continue;
    }
    for (NodeId v : g.neighbors(u)) {
      if (u < v) out << label(u) << '\t' << label(v) << '\n';
    }
  }
}

SparsityReport CheckSparsity(const Graph& g, double threshold) {
  SparsityReport report;
  report.threshold = threshold;
  const size_t n = g.node_count();
  report.d_max = g.max_degree();
  report.n_quarter = std::pow(static_cast<double>(n), 0.25);
  report.ratio = n == 0 ? 0.0 : report.d_max / report.n_quarter;
  double acc = 0;
  for (NodeId i = 0; i < n; ++i) acc += std::pow(double(g.degree(i)), 2.5);
  report.moment_2_5 = n == 0 ? 0.0 : acc / n;
  report.flagged = report.ratio > threshold;
  return report;
}

absl::StatusOr<DegreeMoments> ComputeDegreeMoments(const Graph& g) {
  absl::StatusOr<DegreeDistribution> dist = DegreeDistribution::FromGraph(g);
  if (!dist.ok()) return dist.status();
  DegreeMoments m;
  // Sums of integers are exact; divide once so the moments are exact too.
  uint64_t sum = 0, sum_sq = 0, isolated = 0;
  for (NodeId i = 0; i < g.node_count(); ++i) {
    const uint64_t d = g.degree(i);
    sum += d;
    sum_sq += d * d;
    isolated += d == 0;
  }
  const double n = static_cast<double>(g.node_count());
  m.mean = sum / n;
  m.second = sum_sq / n;
  m.rho0 = isolated / n;
  if (m.rho0 < 1.0) {
    absl::StatusOr<DegreeDistribution> tilde = dist->ConditionalOnPositive();
    if (!tilde.ok()) return tilde.status();
    m.rho_tilde = *std::move(tilde);
  }
  return m;
}

}  // namespace privmarket
