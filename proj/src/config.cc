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

#include "privmarket/config.h"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/string_view.h"
#include "json.hpp"

namespace privmarket {
namespace {

absl::Status FieldError(absl::string_view key, absl::string_view message) {
  return absl::InvalidArgumentError(
      absl::StrCat("config field '", key, "': ", message));
}

absl::Status ParseDouble(absl::string_view key, absl::string_view v,
                         double& out) {
  if (!absl::SimpleAtod(v, &out) || !std::isfinite(out)) {
    return FieldError(key, absl::StrCat("expected a finite number, got '", v,
                                        "'"));
  }
  return absl::OkStatus();
}

absl::Status ParseInt(absl::string_view key, absl::string_view v,
                      int64_t& out) {
  if (!absl::SimpleAtoi(v, &out)) {
    return FieldError(key, absl::StrCat("expected an integer, got '", v, "'"));
  }
  return absl::OkStatus();
}

absl::Status ParseBool(absl::string_view key, absl::string_view v,
                       bool& out) {
  if (v == "true" || v == "1") {
    out = true;
  } else if (v == "false" || v == "0") {
    out = false;
  } else {
    return FieldError(key, absl::StrCat("expected true or false, got '", v,
                                        "'"));
  }
  return absl::OkStatus();
}

absl::Status ParseOptionalDouble(absl::string_view key, absl::string_view v,
                                 std::optional<double>& out) {
  if (v.empty()) {
    out.reset();
    return absl::OkStatus();
  }
  double x = 0;
  if (absl::Status s = ParseDouble(key, v, x); !s.ok()) return s;
  out = x;
  return absl::OkStatus();
}

absl::Status ParseOneOf(absl::string_view key, absl::string_view v,
                        const std::vector<absl::string_view>& allowed,
                        std::string& out) {
  for (absl::string_view a : allowed) {
    if (v == a) {
      out = std::string(v);
      return absl::OkStatus();
    }
  }
  return FieldError(key, absl::StrCat("expected one of {",
                                      absl::StrJoin(allowed, ", "), "}, got '",
                                      v, "'"));
}

std::string Num(double x) { return absl::StrFormat("%.17g", x); }

}  // namespace

absl::Status ApplySetting(RunConfig& c, absl::string_view key,
                          absl::string_view raw) {
  const absl::string_view v = absl::StripAsciiWhitespace(raw);
  int64_t i = 0;
  if (key == "prior_w1") return ParseDouble(key, v, c.prior_w1);
  if (key == "theta0") return ParseDouble(key, v, c.theta0);
  if (key == "alpha") return ParseDouble(key, v, c.alpha);
  if (key == "epsilon") return ParseDouble(key, v, c.epsilon);
  if (key == "population") return ParseInt(key, v, c.population);
  if (key == "cost") {
    return ParseOneOf(key, v, {"quadratic", "linear", "linear-capped", "table"},
                      c.cost);
  }
  if (key == "cost_slope") return ParseDouble(key, v, c.cost_slope);
  if (key == "cost_knee") return ParseDouble(key, v, c.cost_knee);
  if (key == "cost_table") {
    c.cost_table = std::string(v);
    return absl::OkStatus();
  }
  if (key == "seed") {
    if (!absl::SimpleAtoi(v, &c.seed)) {
      return FieldError(key, absl::StrCat("expected an unsigned 64-bit "
                                          "integer, got '", v, "'"));
    }
    return absl::OkStatus();
  }
  if (key == "graph") {
    return ParseOneOf(key, v, {"er", "config-model", "edge-list"}, c.graph);
  }
  if (key == "avg_degree") return ParseDouble(key, v, c.avg_degree);
  if (key == "degree_dist") {
    c.degree_dist = std::string(v);
    return absl::OkStatus();
  }
  if (key == "edge_list") {
    c.edge_list = std::string(v);
    return absl::OkStatus();
  }
  if (key == "symmetrize") return ParseBool(key, v, c.symmetrize);
  if (key == "d_max") return ParseInt(key, v, c.d_max);
  if (key == "trials") return ParseInt(key, v, c.trials);
  if (key == "workers") {
    if (absl::Status s = ParseInt(key, v, i); !s.ok()) return s;
    if (i < 0 || i > 4096) return FieldError(key, "must lie in [0, 4096]");
    c.workers = static_cast<int>(i);
    return absl::OkStatus();
  }
  if (key == "strategy") return ParseOneOf(key, v, {"mv", "nd"}, c.strategy);
  if (key == "nd_delta") return ParseDouble(key, v, c.nd_delta);
  if (key == "beta0") return ParseOptionalDouble(key, v, c.beta0);
  if (key == "beta1") return ParseOptionalDouble(key, v, c.beta1);
  if (key == "sweep_axis") {
    return ParseOneOf(key, v, {"none", "avg_degree", "epsilon", "alpha"},
                      c.sweep_axis);
  }
  if (key == "sweep_values") {
    c.sweep_values.clear();
    if (v.empty()) return absl::OkStatus();
    for (absl::string_view part : absl::StrSplit(v, ',')) {
      double x = 0;
      if (absl::Status s =
              ParseDouble(key, absl::StripAsciiWhitespace(part), x);
          !s.ok()) {
        return s;
      }
      c.sweep_values.push_back(x);
    }
    return absl::OkStatus();
  }
  if (key == "target_error") return ParseDouble(key, v, c.target_error);
  if (key == "out") {
    c.out = std::string(v);
    return absl::OkStatus();
  }
  if (key == "formats") {
    for (absl::string_view part : absl::StrSplit(v, ',', absl::SkipEmpty())) {
      part = absl::StripAsciiWhitespace(part);
      if (part != "csv" && part != "json") {
        return FieldError(key, absl::StrCat("unknown format '", part, "'"));
      }
    }
    c.formats = std::string(v);
    return absl::OkStatus();
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown config key '", key, "'"));
}

absl::Status ApplyOverride(RunConfig& config, absl::string_view assignment) {
  const size_t eq = assignment.find('=');
  if (eq == absl::string_view::npos) {
    return absl::InvalidArgumentError(absl::StrCat(
        "override '", assignment, "' is not of the form KEY=VALUE"));
  }
  return ApplySetting(
      config, absl::StripAsciiWhitespace(assignment.substr(0, eq)),
      assignment.substr(eq + 1));
}

absl::StatusOr<RunConfig> ParseRunConfig(absl::string_view text) {
  RunConfig c;
  int line_no = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_no;
    if (const size_t hash = line.find('#'); hash != absl::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = absl::StripAsciiWhitespace(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == absl::string_view::npos) {
      return absl::InvalidArgumentError(
          absl::StrCat("config line ", line_no, ": expected 'key = value'"));
    }
    absl::Status s = ApplySetting(
        c, absl::StripAsciiWhitespace(line.substr(0, eq)), line.substr(eq + 1));
    if (!s.ok()) {
      return absl::Status(s.code(), absl::StrCat("config line ", line_no, ": ",
                                                 s.message()));
    }
  }
  return c;
}

std::string SerializeRunConfig(const RunConfig& c) {
  std::vector<std::string> values;
  for (double v : c.sweep_values) values.push_back(Num(v));
  std::string out;
  auto put = [&out](absl::string_view k, absl::string_view v) {
    absl::StrAppend(&out, k, " = ", v, "\n");
  };
  put("prior_w1", Num(c.prior_w1));
  put("theta0", Num(c.theta0));
  put("alpha", Num(c.alpha));
  put("epsilon", Num(c.epsilon));
  put("population", absl::StrCat(c.population));
  put("cost", c.cost);
  put("cost_slope", Num(c.cost_slope));
  put("cost_knee", Num(c.cost_knee));
  put("cost_table", c.cost_table);
  put("seed", absl::StrCat(c.seed));
  put("graph", c.graph);
  put("avg_degree", Num(c.avg_degree));
  put("degree_dist", c.degree_dist);
  put("edge_list", c.edge_list);
  put("symmetrize", c.symmetrize ? "true" : "false");
  put("d_max", absl::StrCat(c.d_max));
  put("trials", absl::StrCat(c.trials));
  put("workers", absl::StrCat(c.workers));
  put("strategy", c.strategy);
  put("nd_delta", Num(c.nd_delta));
  put("beta0", c.beta0.has_value() ? Num(*c.beta0) : "");
  put("beta1", c.beta1.has_value() ? Num(*c.beta1) : "");
  put("sweep_axis", c.sweep_axis);
  put("sweep_values", absl::StrJoin(values, ","));
  put("target_error", Num(c.target_error));
  put("out", c.out);
  put("formats", c.formats);
  return out;
}

absl::StatusOr<CostFunction> BuildCost(const RunConfig& c) {
  absl::StatusOr<CostFunction> g;
  if (c.cost == "quadratic") {
    g = CostFunction::Quadratic();
  } else if (c.cost == "linear") {
    if (!(c.cost_slope > 0)) return FieldError("cost_slope", "must be > 0");
    g = CostFunction::Linear(c.cost_slope);
  } else if (c.cost == "linear-capped") {
    g = CostFunction::LinearCapped(c.cost_knee);
    if (!g.ok()) return FieldError("cost_knee", g.status().message());
  } else if (c.cost == "table") {
    std::vector<CostKnot> knots;
    for (absl::string_view part :
         absl::StrSplit(c.cost_table, ',', absl::SkipWhitespace())) {
      std::vector<absl::string_view> kv = absl::StrSplit(part, ':');
      CostKnot k{};
      if (kv.size() != 2 ||
          !absl::SimpleAtod(absl::StripAsciiWhitespace(kv[0]), &k.zeta) ||
          !absl::SimpleAtod(absl::StripAsciiWhitespace(kv[1]), &k.slope)) {
        return FieldError("cost_table",
                          absl::StrCat("bad knot '", part,
                                       "', expected zeta:slope"));
      }
      knots.push_back(k);
    }
    g = CostFunction::FromTable(std::move(knots));
    if (!g.ok()) return FieldError("cost_table", g.status().message());
  } else {
    return FieldError("cost", absl::StrCat("unknown cost '", c.cost, "'"));
  }
  if (absl::Status s = g->Audit(); !s.ok()) {
    return FieldError("cost", s.message());
  }
  return g;
}

absl::StatusOr<ModelParams> BuildModelParams(const RunConfig& c) {
  ModelParams p;
  p.prior_w1 = c.prior_w1;
  p.theta0 = c.theta0;
  p.alpha = c.alpha;
  p.epsilon = c.epsilon;
  p.population = c.population;
  absl::StatusOr<CostFunction> g = BuildCost(c);
  if (!g.ok()) return g.status();
  p.cost = *g;
  if (absl::Status s = p.Validate(); !s.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat("model parameters: ", s.message()));
  }
  return p;
}

absl::StatusOr<GraphSpec> BuildGraphSpec(const RunConfig& c) {
  GraphSpec spec;
  spec.avg_degree = c.avg_degree;
  spec.degree_dist = c.degree_dist;
  spec.edge_list = c.edge_list;
  spec.symmetrize = c.symmetrize;
  if (c.graph == "er") {
    spec.kind = GraphSpec::Kind::kErdosRenyi;
  } else if (c.graph == "config-model") {
    spec.kind = GraphSpec::Kind::kConfigurationModel;
  } else if (c.graph == "edge-list") {
    spec.kind = GraphSpec::Kind::kEdgeList;
  } else {
    return FieldError("graph", absl::StrCat("unknown kind '", c.graph, "'"));
  }
  return spec;
}

absl::StatusOr<SweepAxis> ParseSweepAxis(absl::string_view name) {
  if (name == "none") return SweepAxis::kNone;
  if (name == "avg_degree") return SweepAxis::kAvgDegree;
  if (name == "epsilon") return SweepAxis::kEpsilon;
  if (name == "alpha") return SweepAxis::kAlpha;
  return FieldError("sweep_axis", absl::StrCat("unknown axis '", name, "'"));
}

absl::Status ValidateRunConfig(const RunConfig& c) {
  absl::StatusOr<ModelParams> params = BuildModelParams(c);
  if (!params.ok()) return params.status();
  if (absl::StatusOr<GraphSpec> spec = BuildGraphSpec(c); !spec.ok()) {
    return spec.status();
  }
  if (c.strategy != "mv" && c.strategy != "nd") {
    return FieldError("strategy", absl::StrCat("unknown strategy '",
                                               c.strategy, "'"));
  }
  if (c.graph == "er" && !(c.avg_degree >= 0)) {
    return FieldError("avg_degree", "must be >= 0");
  }
  if (c.graph == "config-model") {
    if (absl::StatusOr<DegreeDistribution> d =
            ParseDegreeDistribution(c.degree_dist);
        !d.ok()) {
      return FieldError("degree_dist", d.status().message());
    }
  }
  if (c.graph == "edge-list") {
    if (c.edge_list.empty()) {
      return FieldError("edge_list", "required when graph = edge-list");
    }
    std::error_code ec;
    if (!std::filesystem::is_regular_file(c.edge_list, ec)) {
      return FieldError("edge_list",
                        absl::StrCat("file '", c.edge_list, "' does not exist"));
    }
  }
  if (c.trials < 2) return FieldError("trials", "must be >= 2");
  if (!(c.nd_delta > 0)) return FieldError("nd_delta", "must be > 0");
  for (const auto& [name, beta] :
       {std::pair{"beta0", c.beta0}, std::pair{"beta1", c.beta1}}) {
    if (beta.has_value() && !(*beta > 0 && *beta <= 1)) {
      return FieldError(name, "must lie in (0, 1]");
    }
  }
  if (!(c.target_error > 0 && c.target_error < 1)) {
    return FieldError("target_error", "must lie in (0, 1)");
  }
  if (c.d_max < -1) return FieldError("d_max", "must be >= -1");
  if (c.sweep_axis != "none" && c.sweep_values.empty()) {
    return FieldError("sweep_values", "required when sweep_axis is set");
  }
  if (c.sweep_axis == "avg_degree" && c.graph == "edge-list") {
    return FieldError("sweep_axis",
                      "avg_degree sweeps need a generated graph");
  }
  if (c.out.empty()) return FieldError("out", "must not be empty");
  return absl::OkStatus();
}

absl::StatusOr<Scenario> BuildScenario(const RunConfig& c) {
  if (absl::Status s = ValidateRunConfig(c); !s.ok()) return s;
  Scenario sc;
  absl::StatusOr<ModelParams> params = BuildModelParams(c);
  if (!params.ok()) return params.status();
  sc.params = *params;
  absl::StatusOr<GraphSpec> spec = BuildGraphSpec(c);
  if (!spec.ok()) return spec.status();
  sc.graph = *spec;
  sc.market.strategy = c.strategy == "nd" ? StrategyKind::kNdBaseline
                                          : StrategyKind::kMajorityVoting;
  sc.market.nd_delta = c.nd_delta;
  sc.market.beta0 = c.beta0;
  sc.market.beta1 = c.beta1;
  sc.seed = c.seed;
  return sc;
}

std::string RunManifestJson(const RunConfig& c,
                            const std::vector<SweepRow>& rows) {
  using nlohmann::ordered_json;
  ordered_json config = ordered_json::object();
  for (absl::string_view line :
       absl::StrSplit(SerializeRunConfig(c), '\n', absl::SkipEmpty())) {
    const size_t eq = line.find(" = ");
    const std::string key(line.substr(0, eq));
    if (key == "workers") continue;
    const std::string value(line.substr(eq + 3));
    // Numbers and booleans keep their JSON types; unset optionals are null.
    ordered_json typed = ordered_json::parse(value, nullptr, false);
    if (value.empty()) {
      config[key] = nullptr;
    } else if (typed.is_number() || typed.is_boolean()) {
      config[key] = typed;
    } else {
      config[key] = value;
    }
  }
  ordered_json runs = ordered_json::array();
  for (const SweepRow& row : rows) {
    ordered_json r = ordered_json::object();
    if (c.sweep_axis != "none") r["axis_value"] = row.axis_value;
    r["nodes"] = row.result.population;
    r["edges"] = row.result.edges;
    r["trials"] = row.result.trials;
    runs.push_back(r);
  }
  ordered_json m = ordered_json::object();
  m["version"] = kVersion;
  m["seed"] = c.seed;
  m["config"] = config;
  m["runs"] = runs;
  return m.dump(2) + "\n";
}

}  // namespace privmarket
