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

// Dual-price settlement. Demand pays its locational price, compute providers
// receive g + mu on what they process, network providers receive the tariff
// plus the congestion rent on what they carry. The remainder is the
// merchandising surplus.

#ifndef TOKENFLOW_SETTLEMENT_H_
#define TOKENFLOW_SETTLEMENT_H_

#include <string_view>
#include <vector>

#include "tokenflow/clearing.h"

namespace tokenflow {

// How the network leg is priced.
enum class NetworkConvention {
  // (w a_k + eta) per token carried; used for token-equivalent clearings.
  kTokenUnits,
  // (w + eta) per GB carried, q = gamma f; used for transfer-aware clearings.
  kTransferUnits,
};

std::string_view NetworkConventionName(NetworkConvention convention);

struct SettlementLedger {
  Formulation formulation = Formulation::kBaseline;
  NetworkConvention convention = NetworkConvention::kTokenUnits;
  // True when part of the demand was shed; shed demand pays nothing.
  bool has_unmet_demand = false;

  // All amounts in $/hr.
  double user_payments = 0.0;
  double compute_revenue = 0.0;
  double network_revenue = 0.0;
  double surplus = 0.0;

  std::vector<double> node_payments;
  std::vector<double> node_compute_revenue;
  std::vector<double> arc_network_revenue;
  // Congestion part of arc_network_revenue.
  std::vector<double> arc_congestion_revenue;
};

// Requires a feasible result; throws Error(kPrecondition) otherwise.
SettlementLedger Settle(const ClearingResult& result);

}  // namespace tokenflow

#endif  // TOKENFLOW_SETTLEMENT_H_
