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

// Experiment drivers: demand sweeps, formulation comparison, latency
// tightening and the larger-registry scale-up run. Every solve is
// independent, so results depend only on the inputs.

#ifndef TOKENFLOW_EXPERIMENTS_H_
#define TOKENFLOW_EXPERIMENTS_H_

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tokenflow/clearing.h"
#include "tokenflow/pricing.h"

namespace tokenflow {

// {1, 5, 10, ..., 45}.
std::vector<double> DefaultSweepScales();

// Uniform non-energy opex adder of the default comparison, $/M tokens.
inline constexpr double kDefaultOpexAdderUsdPerMtok = 0.67364;

struct SweepRow {
  double scale = 0.0;
  LpStatus status = LpStatus::kSolverError;
  bool feasible = false;
  double aggregate_demand_tokens_per_s = 0.0;
  // Empty / zero when infeasible.
  double total_cost_usd_per_hr = 0.0;
  std::vector<double> mean_price;
  std::vector<double> max_price;
  std::size_t scarce_pairs = 0;
  std::size_t congested_links = 0;
  std::size_t saturated_links = 0;
};

struct SweepTable {
  Formulation formulation = Formulation::kBaseline;
  std::vector<std::string> class_ids;
  std::vector<SweepRow> rows;  // ascending scale
};

// `scales` must be positive; rows come out sorted. Infeasible scales are
// recorded, not thrown.
SweepTable DemandSweep(const Scenario& scenario, std::vector<double> scales,
                       Formulation formulation, const ClearingOptions& options = {});

struct ComparisonRow {
  std::string name;
  Formulation formulation = Formulation::kBaseline;
  double opex_adder_usd_per_mtok = 0.0;
  bool feasible = false;
  double total_cost_usd_per_hr = 0.0;
  std::vector<double> mean_price;
  std::size_t congested_links = 0;
  std::size_t saturated_links = 0;
  // Largest |x - x_base| and |f - f_base| against the baseline row, tokens/s.
  double max_dispatch_diff_tokens_per_s = 0.0;
  double max_flow_diff_tokens_per_s = 0.0;
};

struct ComparisonTable {
  std::vector<std::string> class_ids;
  std::vector<ComparisonRow> rows;  // baseline, transfer-aware, opex-adder
};

ComparisonTable CompareFormulations(const Scenario& scenario,
                                    double opex_adder_usd_per_mtok = kDefaultOpexAdderUsdPerMtok,
                                    const ClearingOptions& options = {});

struct LatencyExperimentResult {
  // (class index, tightened bound in ms).
  std::vector<std::pair<std::size_t, double>> bounds;
  ClearingResult before;
  ClearingResult after;
  // after - before, node x class, $/M tokens; empty when either side is
  // infeasible.
  Eigen::MatrixXd price_delta;
  double cost_delta_pct = 0.0;
  // For every tightened class, the connected components (node indices) of the
  // undirected graph of arcs that remain usable.
  std::vector<std::vector<std::vector<std::size_t>>> clusters;
};

// Throws Error(kPrecondition) if a bound is looser than the class's current
// bound.
LatencyExperimentResult LatencyExperiment(
    const Scenario& scenario, const std::vector<std::pair<std::size_t, double>>& bounds,
    Formulation formulation = Formulation::kBaseline, const ClearingOptions& options = {});

// Connected components of the undirected graph of the given arcs, each sorted,
// ordered by smallest member.
std::vector<std::vector<std::size_t>> ConnectedComponents(const Scenario& scenario,
                                                          const std::vector<std::size_t>& arcs);

struct ScaleUpResult {
  ClearingResult result;
  std::optional<ScarcityReport> report;
  // Nodes whose electricity price is in the cheapest quarter.
  std::vector<std::size_t> low_price_nodes;
  // Fraction of chat dispatch (first class if there is no "chat") processed
  // at low_price_nodes.
  double low_price_share = 0.0;
};

ScaleUpResult ScaleUpRun(const Scenario& scenario, Formulation formulation = Formulation::kBaseline,
                         const ClearingOptions& options = {});

// Cheapest ceil(n/4) nodes by electricity price, ties at the cut included.
std::vector<std::size_t> LowestQuartilePriceNodes(const Scenario& scenario);

}  // namespace tokenflow

#endif  // TOKENFLOW_EXPERIMENTS_H_
