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

// Market clearing: builds the routing/dispatch linear program for a scenario,
// solves it and maps the multipliers back to market quantities.
//
// Three formulations are supported:
//  * baseline: link capacity in token-equivalent units, B = W / min_k a_k,
//    with the transfer tariff folded into a per-token routing coefficient
//    c = c_route + w a_k;
//  * transfer-aware: physical GB/s link rows sum_k gamma_k f_k <= W with
//    the tariff charged per GB carried;
//  * partial service: baseline plus penalized unmet demand y >= 0.
//
// Token rates are reported in tokens/s and prices in $/M tokens. Congestion
// rents are $/M tokens (baseline, partial) or $/GB (transfer-aware).

#ifndef TOKENFLOW_CLEARING_H_
#define TOKENFLOW_CLEARING_H_

#include <cstddef>
#include <memory>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "tokenflow/lp_engine.h"
#include "tokenflow/network_model.h"

namespace tokenflow {

enum class Formulation { kBaseline, kTransferAware, kPartialService };

std::string_view FormulationName(Formulation formulation);
// Accepts "baseline", "transfer" / "transfer-aware", "partial" /
// "partial-service". Throws Error(kInvalidValue) otherwise.
Formulation ParseFormulation(std::string_view name);

struct ClearingOptions {
  LpTolerances lp;
  // Uniform value of lost service used by Clear() for partial service.
  double penalty_usd_per_mtok = 1000.0;
};

struct ClearingResult {
  std::shared_ptr<const Scenario> scenario;
  Formulation formulation = Formulation::kBaseline;
  LpStatus status = LpStatus::kSolverError;
  bool feasible = false;

  // Primal quantities, tokens/s. arc x class, node x class.
  Eigen::MatrixXd flows;
  Eigen::MatrixXd dispatch;
  Eigen::MatrixXd unmet;

  // Duals, $/M tokens except congestion in transfer-aware mode ($/GB).
  Eigen::MatrixXd prices;
  Eigen::MatrixXd scarcity;
  Eigen::VectorXd congestion;

  // Link usage and capacity in the formulation's units: tokens/s of
  // token-equivalent bandwidth, or GB/s. Capacity may be kInfinity.
  Eigen::VectorXd link_usage;
  Eigen::VectorXd link_capacity;

  // Coefficients the program was built with. routing_cost is the per-token
  // arc cost in the objective excluding GB charges, $/M tokens;
  // transfer_intensity is gamma in GB per M tokens.
  Eigen::MatrixXd routing_cost;
  Eigen::MatrixXd transfer_intensity;
  // Per class, the arcs that survive the latency filter.
  std::vector<std::vector<std::size_t>> allowed_arcs;
  // Value of lost service, $/M tokens (partial service only).
  Eigen::MatrixXd penalties;

  double total_cost_usd_per_hr = 0.0;
  LinearProgram lp;
  LpSolution solution;
  KktReport kkt;

  bool ArcAllowed(std::size_t arc, std::size_t cls) const;
  // Physical GB/s on the arc regardless of formulation.
  double PhysicalUsage(std::size_t arc) const;
};

// Arcs usable by the class: all of them when unbounded, otherwise those with
// latency <= bound.
std::vector<std::size_t> LatencyFilter(const Scenario& scenario, std::size_t cls);

ClearingResult ClearBaseline(const Scenario& scenario, const ClearingOptions& options = {});
ClearingResult ClearTransferAware(const Scenario& scenario,
                                  const ClearingOptions& options = {});
// `penalties` is node x class in $/M tokens.
ClearingResult ClearPartialService(const Scenario& scenario, const Eigen::MatrixXd& penalties,
                                   const ClearingOptions& options = {});
// Dispatches on the formulation; partial service uses a uniform penalty.
ClearingResult Clear(const Scenario& scenario, Formulation formulation,
                     const ClearingOptions& options = {});

Scenario ApplyOpexAdder(const Scenario& scenario, double adder_usd_per_mtok);

}  // namespace tokenflow

#endif  // TOKENFLOW_CLEARING_H_
