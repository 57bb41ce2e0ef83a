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

// Domain model of the token-flow network: compute nodes, directed arcs,
// workload classes and the demand they carry.
//
// Units follow the reference data tables: token rates in tokens/s, energy in
// kWh per million tokens, payload in GB per million tokens, link capacity in
// GB/s and prices in $/kWh or $/GB. Derived per-token costs are exposed in
// $/M tokens, which is also the unit used when assembling linear programs.

#ifndef TOKENFLOW_NETWORK_MODEL_H_
#define TOKENFLOW_NETWORK_MODEL_H_

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tokenflow {

inline constexpr double kTokensPerMillion = 1.0e6;
inline constexpr double kSecondsPerHour = 3600.0;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct WorkloadClass {
  std::string id;
  std::string label;
  double energy_kwh_per_mtok = 0.0;   // e_k
  double payload_gb_per_mtok = 0.0;   // a_k
  // Maximum tolerated arc latency; nullopt means unconstrained.
  std::optional<double> latency_bound_ms;
};

struct Node {
  std::string id;
  std::string metro;
  double latitude = 0.0;
  double longitude = 0.0;
  double site_power_mw = 0.0;
  double elec_price_usd_per_kwh = 0.0;
  // Per-class processing capacity C_{j,k}, tokens/s. Indexed like
  // Scenario::classes().
  std::vector<double> capacity_tokens_per_s;
  // Optional per-class energy intensity replacing the class default.
  std::vector<std::optional<double>> energy_override_kwh_per_mtok;
  double opex_adder_usd_per_mtok = 0.0;
};

struct Arc {
  std::string from;
  std::string to;
  double distance_km = 0.0;
  double latency_ms = 0.0;
  double physical_capacity_gb_per_s = 0.0;  // may be kInfinity
  double transfer_tariff_usd_per_gb = 0.0;
  // Private per-class routing cost c^route, $/M tokens. Empty means zero.
  std::vector<double> routing_cost_usd_per_mtok;
  double overhead_factor = 1.0;
};

// Immutable, validated market instance. Nodes are kept sorted by id and arcs
// by (from, to) so that matrix layouts, and hence LP variable indices, do not
// depend on input order. Workload classes keep their declared order.
class Scenario {
 public:
  // Validates every invariant and throws tokenflow::Error on violation.
  // `demand_tokens_per_s` is node x class in the order of `nodes` as passed
  // (it is permuted together with the nodes).
  static Scenario Create(std::vector<Node> nodes, std::vector<Arc> arcs,
                         std::vector<WorkloadClass> classes,
                         Eigen::MatrixXd demand_tokens_per_s,
                         double demand_scale = 1.0);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  const std::vector<WorkloadClass>& classes() const { return classes_; }
  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_arcs() const { return arcs_.size(); }
  std::size_t num_classes() const { return classes_.size(); }

  // Unscaled demand d_{j,k} in tokens/s.
  const Eigen::MatrixXd& base_demand() const { return base_demand_; }
  double demand_scale() const { return demand_scale_; }
  // demand_scale * base_demand, tokens/s.
  Eigen::MatrixXd demand() const { return base_demand_ * demand_scale_; }

  std::size_t arc_tail(std::size_t arc) const { return tails_[arc]; }
  std::size_t arc_head(std::size_t arc) const { return heads_[arc]; }

  std::optional<std::size_t> FindNode(const std::string& id) const;
  std::optional<std::size_t> FindClass(const std::string& id) const;
  std::optional<std::size_t> FindArc(const std::string& from,
                                     const std::string& to) const;

  // Marginal processing cost g_{j,k} in $/M tokens.
  double MarginalCost(std::size_t node, std::size_t cls) const;
  // Energy part of g_{j,k} (excludes the opex adder), $/M tokens.
  double EnergyCost(std::size_t node, std::size_t cls) const;
  // c^route_{ij,k}, $/M tokens.
  double RouteCost(std::size_t arc, std::size_t cls) const;
  // gamma_{ij,k}: GB carried per M useful tokens on the arc.
  double TransferIntensity(std::size_t arc, std::size_t cls) const;
  // Smallest class payload (GB/M tokens); sets token-equivalent bandwidth.
  double MinPayload() const;

  // Copy-with-modification helpers. All return validated scenarios.
  Scenario WithDemandScale(double scale) const;
  Scenario WithLatencyBound(std::size_t cls, std::optional<double> ms) const;
  Scenario WithOpexAdder(double added_usd_per_mtok) const;
  Scenario WithLinkCapacity(double gb_per_s) const;
  Scenario WithTransferTariff(double usd_per_gb) const;

 private:
  Scenario() = default;
  void Validate();

  std::vector<Node> nodes_;
  std::vector<Arc> arcs_;
  std::vector<WorkloadClass> classes_;
  Eigen::MatrixXd base_demand_;
  double demand_scale_ = 1.0;
  std::vector<std::size_t> tails_;
  std::vector<std::size_t> heads_;
};

// Node x arc incidence matrix A: +1 at the sending node, -1 at the receiving
// node, so that A f is net outbound flow.
Eigen::MatrixXd IncidenceMatrix(const Scenario& scenario);

// g_{j,k} = elec_price_j * e_{j,k} + opex_adder_j, node x class, $/M tokens.
Eigen::MatrixXd MarginalCostMatrix(const Scenario& scenario);

}  // namespace tokenflow

#endif  // TOKENFLOW_NETWORK_MODEL_H_
