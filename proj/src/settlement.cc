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

#include "tokenflow/settlement.h"

#include "tokenflow/error.h"

namespace tokenflow {

std::string_view NetworkConventionName(NetworkConvention convention) {
  switch (convention) {
    case NetworkConvention::kTokenUnits:
      return "token_units";
    case NetworkConvention::kTransferUnits:
      return "transfer_units";
  }
  return "unknown";
}

SettlementLedger Settle(const ClearingResult& result) {
  if (!result.feasible) {
    throw Error(ErrorCode::kPrecondition, "cannot settle a clearing without a solution");
  }
  using Index = Eigen::Index;
  const Scenario& s = *result.scenario;
  // tokens/s times $/M tokens, to $/hr.
  const double to_hourly = kSecondsPerHour / kTokensPerMillion;

  SettlementLedger ledger;
  ledger.formulation = result.formulation;
  ledger.convention = result.formulation == Formulation::kTransferAware
                          ? NetworkConvention::kTransferUnits
                          : NetworkConvention::kTokenUnits;
  ledger.node_payments.assign(s.num_nodes(), 0.0);
  ledger.node_compute_revenue.assign(s.num_nodes(), 0.0);
  ledger.arc_network_revenue.assign(s.num_arcs(), 0.0);
  ledger.arc_congestion_revenue.assign(s.num_arcs(), 0.0);

  const Eigen::MatrixXd demand = s.demand();
  for (std::size_t j = 0; j < s.num_nodes(); ++j) {
    for (std::size_t k = 0; k < s.num_classes(); ++k) {
      const auto jj = static_cast<Index>(j);
      const auto kc = static_cast<Index>(k);
      double served = demand(jj, kc);
      if (result.unmet.size() > 0 && result.unmet(jj, kc) > 0.0) {
        served -= result.unmet(jj, kc);
        ledger.has_unmet_demand = true;
      }
      ledger.node_payments[j] += result.prices(jj, kc) * served * to_hourly;
      ledger.node_compute_revenue[j] +=
          (s.MarginalCost(j, k) + result.scarcity(jj, kc)) * result.dispatch(jj, kc) * to_hourly;
    }
  }
  for (std::size_t a = 0; a < s.num_arcs(); ++a) {
    const auto ai = static_cast<Index>(a);
    const double w = s.arcs()[a].transfer_tariff_usd_per_gb;
    const double eta = result.congestion(ai);
    for (std::size_t k = 0; k < s.num_classes(); ++k) {
      const double f = result.flows(ai, static_cast<Index>(k));
      if (f == 0.0) continue;
      if (ledger.convention == NetworkConvention::kTransferUnits) {
        const double gamma = result.transfer_intensity(ai, static_cast<Index>(k));
        ledger.arc_network_revenue[a] += (w + eta) * gamma * f * to_hourly;
        ledger.arc_congestion_revenue[a] += eta * gamma * f * to_hourly;
      } else {
        const double payload = s.classes()[k].payload_gb_per_mtok;
        ledger.arc_network_revenue[a] += (w * payload + eta) * f * to_hourly;
        ledger.arc_congestion_revenue[a] += eta * f * to_hourly;
      }
    }
  }
  for (double v : ledger.node_payments) ledger.user_payments += v;
  for (double v : ledger.node_compute_revenue) ledger.compute_revenue += v;
  for (double v : ledger.arc_network_revenue) ledger.network_revenue += v;
  ledger.surplus = ledger.user_payments - ledger.compute_revenue - ledger.network_revenue;
  return ledger;
}

}  // namespace tokenflow
