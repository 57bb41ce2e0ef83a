// Copyright 2026 The TokenFlow Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tokenflow/experiments.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tokenflow/error.h"

namespace tokenflow {
namespace {

using Index = Eigen::Index;

std::vector<std::string> ClassIds(const Scenario& scenario) {
  std::vector<std::string> ids;
  for (const WorkloadClass& k : scenario.classes()) ids.push_back(k.id);
  return ids;
}

double MaxAbsDiff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.size() == 0 || a.rows() != b.rows() || a.cols() != b.cols()) return kInfinity;
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

std::vector<double> DefaultSweepScales() {
  std::vector<double> scales = {1.0};
  for (int s = 5; s <= 45; s += 5) scales.push_back(s);
  return scales;
}

SweepTable DemandSweep(const Scenario& scenario, std::vector<double> scales,
                       Formulation formulation, const ClearingOptions& options) {
  for (double s : scales) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw Error(ErrorCode::kInvalidValue, "sweep scales must be positive and finite");
    }
  }
  std::sort(scales.begin(), scales.end());
  SweepTable table;
  table.formulation = formulation;
  table.class_ids = ClassIds(scenario);
  for (double scale : scales) {
    const Scenario scaled = scenario.WithDemandScale(scale);
    const ClearingResult r = Clear(scaled, formulation, options);
    SweepRow row;
    row.scale = scale;
    row.status = r.status;
    row.feasible = r.feasible;
    row.aggregate_demand_tokens_per_s = scaled.demand().sum();
    if (r.feasible) {
      const ScarcityReport rep = BuildScarcityReport(r);
      row.total_cost_usd_per_hr = r.total_cost_usd_per_hr;
      row.mean_price = rep.mean_price;
      row.max_price = rep.max_price;
      row.scarce_pairs = rep.scarce_pairs.size();
      row.congested_links = rep.congested_arcs.size();
      row.saturated_links = rep.saturated_arcs.size();
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

ComparisonTable CompareFormulations(const Scenario& scenario, double opex_adder_usd_per_mtok,
                                    const ClearingOptions& options) {
  ComparisonTable table;
  table.class_ids = ClassIds(scenario);
  const ClearingResult base = ClearBaseline(scenario, options);
  const ClearingResult transfer = ClearTransferAware(scenario, options);
  const ClearingResult opex =
      ClearBaseline(ApplyOpexAdder(scenario, opex_adder_usd_per_mtok), options);
  auto row = [&](const char* name, const ClearingResult& r, double adder) {
    ComparisonRow out;
    out.name = name;
    out.formulation = r.formulation;
    out.opex_adder_usd_per_mtok = adder;
    out.feasible = r.feasible;
    if (r.feasible) {
      const ScarcityReport rep = BuildScarcityReport(r);
      out.total_cost_usd_per_hr = r.total_cost_usd_per_hr;
      out.mean_price = rep.mean_price;
      out.congested_links = rep.congested_arcs.size();
      out.saturated_links = rep.saturated_arcs.size();
      out.max_dispatch_diff_tokens_per_s = MaxAbsDiff(r.dispatch, base.dispatch);
      out.max_flow_diff_tokens_per_s =
          r.flows.size() == 0 && base.flows.size() == 0 ? 0.0 : MaxAbsDiff(r.flows, base.flows);
    }
    return out;
  };
  table.rows.push_back(row("baseline", base, 0.0));
  table.rows.push_back(row("transfer-aware", transfer, 0.0));
  table.rows.push_back(row("opex-adder", opex, opex_adder_usd_per_mtok));
  return table;
}

std::vector<std::vector<std::size_t>> ConnectedComponents(const Scenario& scenario,
                                                          const std::vector<std::size_t>& arcs) {
  std::vector<std::size_t> parent(scenario.num_nodes());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (std::size_t a : arcs) {
    const std::size_t u = find(scenario.arc_tail(a));
    const std::size_t v = find(scenario.arc_head(a));
    if (u != v) parent[std::max(u, v)] = std::min(u, v);
  }
  std::vector<std::vector<std::size_t>> components;
  std::vector<long> slot(scenario.num_nodes(), -1);
  for (std::size_t v = 0; v < scenario.num_nodes(); ++v) {
    const std::size_t root = find(v);
    if (slot[root] < 0) {
      slot[root] = static_cast<long>(components.size());
      components.emplace_back();
    }
    components[static_cast<std::size_t>(slot[root])].push_back(v);
  }
  return components;
}

LatencyExperimentResult LatencyExperiment(
    const Scenario& scenario, const std::vector<std::pair<std::size_t, double>>& bounds,
    Formulation formulation, const ClearingOptions& options) {
  Scenario tightened = scenario;
  for (const auto& [cls, ms] : bounds) {
    if (cls >= scenario.num_classes()) {
      throw Error(ErrorCode::kInvalidValue, "latency experiment names an unknown class");
    }
    const std::optional<double> current = scenario.classes()[cls].latency_bound_ms;
    if (current && ms > *current) {
      throw Error(ErrorCode::kPrecondition,
                  "latency bound for '" + scenario.classes()[cls].id + "' would be loosened");
    }
    tightened = tightened.WithLatencyBound(cls, ms);
  }
  LatencyExperimentResult out;
  out.bounds = bounds;
  out.before = Clear(scenario, formulation, options);
  out.after = Clear(tightened, formulation, options);
  if (out.before.feasible && out.after.feasible) {
    out.price_delta = out.after.prices - out.before.prices;
    out.cost_delta_pct = 100.0 * (out.after.total_cost_usd_per_hr - out.before.total_cost_usd_per_hr) /
                         out.before.total_cost_usd_per_hr;
  }
  for (const auto& [cls, ms] : bounds) {
    out.clusters.push_back(ConnectedComponents(tightened, LatencyFilter(tightened, cls)));
  }
  return out;
}

std::vector<std::size_t> LowestQuartilePriceNodes(const Scenario& scenario) {
  const std::size_t n = scenario.num_nodes();
  if (n == 0) return {};
  std::vector<double> prices;
  for (const Node& node : scenario.nodes()) prices.push_back(node.elec_price_usd_per_kwh);
  std::vector<double> sorted = prices;
  std::sort(sorted.begin(), sorted.end());
  const double cut = sorted[(n + 3) / 4 - 1];
  std::vector<std::size_t> nodes;
  for (std::size_t j = 0; j < n; ++j) {
    if (prices[j] <= cut) nodes.push_back(j);
  }
  return nodes;
}

ScaleUpResult ScaleUpRun(const Scenario& scenario, Formulation formulation,
                         const ClearingOptions& options) {
  ScaleUpResult out;
  out.result = Clear(scenario, formulation, options);
  out.low_price_nodes = LowestQuartilePriceNodes(scenario);
  if (!out.result.feasible) return out;
  out.report = BuildScarcityReport(out.result);
  const auto k = static_cast<Index>(scenario.FindClass("chat").value_or(0));
  const double total = out.result.dispatch.col(k).sum();
  double low = 0.0;
  for (std::size_t j : out.low_price_nodes) low += out.result.dispatch(static_cast<Index>(j), k);
  out.low_price_share = total > 0.0 ? low / total : 0.0;
  return out;
}

}  // namespace tokenflow
