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

// Price analysis on top of a clearing: local and path decompositions of the
// locational prices, the arc price identity, and scarcity statistics.
//
// At any optimum, for an actively processing node
//   pi = g + mu,
// across a used arc
//   pi_i - pi_j = c + eta              (token-equivalent links)
//   pi_i - pi_j = c_route + gamma (w + eta)   (physical links),
// and along an active path from origin o to serving node s
//   pi_o = g_s + mu_s + sum over the path of the arc terms.

#ifndef TOKENFLOW_PRICING_H_
#define TOKENFLOW_PRICING_H_

#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tokenflow/clearing.h"

namespace tokenflow {

// Flow and dispatch below this rate (tokens/s) count as inactive.
inline constexpr double kActivityTolTokensPerS = 1e-3;
// Multipliers above this value ($/M tokens or $/GB) count as binding.
inline constexpr double kPriceTol = 1e-6;

struct PathTerm {
  std::size_t arc = 0;
  double routing = 0.0;     // $/M tokens, includes the GB tariff
  double congestion = 0.0;  // $/M tokens
};

struct PriceDecomposition {
  std::size_t node = 0;
  std::size_t cls = 0;
  double lmp = 0.0;
  double energy = 0.0;
  double opex = 0.0;
  double scarcity = 0.0;
  std::size_t serving_node = 0;
  std::vector<PathTerm> path;
  // Origin is shed in partial-service mode; lmp is compared to the penalty.
  bool unserved = false;
  double penalty = 0.0;

  double RoutingTotal() const;
  double CongestionTotal() const;
  // lmp minus the sum of the components.
  double Residual() const;
};

// Requires local processing above the activity threshold; throws
// Error(kPrecondition) otherwise.
PriceDecomposition DecomposeLocal(const ClearingResult& result, std::size_t node,
                                  std::size_t cls);

// Follows the largest positive outflow until a processing node is reached.
// Throws Error(kPrecondition) when the origin is neither served nor shed.
PriceDecomposition DecomposePath(const ClearingResult& result, std::size_t origin,
                                 std::size_t cls);

enum class ArcActivity { kActive, kInactive, kFiltered };

std::string_view ArcActivityName(ArcActivity activity);

struct ArcIdentity {
  ArcActivity activity = ArcActivity::kInactive;
  // (pi_i - pi_j) - (arc cost + congestion term), $/M tokens. For inactive
  // arcs only residual <= 0 is implied.
  double residual = 0.0;
};

ArcIdentity ArcPriceIdentity(const ClearingResult& result, std::size_t arc, std::size_t cls);

// Per-token arc terms for the class, $/M tokens: (routing, congestion).
std::pair<double, double> ArcPriceTerms(const ClearingResult& result, std::size_t arc,
                                        std::size_t cls);

struct ScarcityReport {
  double tol = kPriceTol;
  std::vector<std::pair<std::size_t, std::size_t>> scarce_pairs;  // (node, class)
  std::vector<std::size_t> congested_arcs;  // eta > tol
  std::vector<std::size_t> saturated_arcs;  // usage at capacity
  // Unweighted means over nodes.
  std::vector<double> mean_price;
  std::vector<double> max_price;
  Eigen::MatrixXd utilization;  // x / C, 0 where C = 0
};

// Requires a feasible result.
ScarcityReport BuildScarcityReport(const ClearingResult& result, double tol = kPriceTol);

}  // namespace tokenflow

#endif  // TOKENFLOW_PRICING_H_
