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

// Turns a hub registry (sites, power, electricity prices, population weights)
// into a Scenario: capacities from site power, arcs between nearby hubs with a
// fiber latency model, and population-weighted demand.

#ifndef TOKENFLOW_SCENARIO_PIPELINE_H_
#define TOKENFLOW_SCENARIO_PIPELINE_H_

#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tokenflow/network_model.h"

namespace tokenflow {

inline constexpr double kEarthRadiusKm = 6371.0;

struct HubRegistryEntry {
  std::string hub;
  std::string metro;
  std::string state;
  double latitude = 0.0;
  double longitude = 0.0;
  int facility_count = 0;
  double est_power_mw = 0.0;
  double elec_price_usd_per_kwh = 0.0;
  double population_weight = 0.0;
};

struct PipelineParams {
  // tokens/s per MW of site power, one entry per workload class.
  std::vector<double> throughput_per_mw;
  double max_arc_distance_km = 2500.0;
  std::set<std::string> backbone_metros;
  double backbone_capacity_gbps = 100.0;
  double default_capacity_gbps = 10.0;
  double per_hop_overhead_ms = 5.0;
  double fiber_speed_km_per_ms = 200.0;
  double transfer_tariff_usd_per_gb = 0.01;
  // tokens/s per class at population weight 1.0.
  std::vector<double> base_demand_rates;
  double demand_scale = 1.0;
};

// Defaults used for the U.S. case studies; class order chat, image, code,
// batch.
PipelineParams DefaultPipelineParams();
std::vector<WorkloadClass> DefaultWorkloadClasses();

// C_{j,k} = est_power * throughput_k, tokens/s.
std::vector<double> DeriveCapacity(const HubRegistryEntry& entry,
                                   const PipelineParams& params);

// Great-circle distance on a sphere of radius kEarthRadiusKm.
double HaversineKm(double lat1, double lon1, double lat2, double lon2);

// One node per registry entry, capacities from DeriveCapacity.
std::vector<Node> BuildNodes(const std::vector<HubRegistryEntry>& registry,
                             const PipelineParams& params);

// Two directed arcs for each hub pair within max_arc_distance_km. Backbone
// capacity applies only when both endpoints are backbone metros. Gbps are
// converted to GB/s by dividing by 8.
std::vector<Arc> BuildArcs(const std::vector<HubRegistryEntry>& registry,
                           const PipelineParams& params);

// d_{j,k} = population_weight_j * base_rate_k * demand_scale, tokens/s. Rows
// follow registry order.
Eigen::MatrixXd GenerateDemand(const std::vector<HubRegistryEntry>& registry,
                               const PipelineParams& params);

// Full pipeline. The Scenario stores unscaled demand and carries
// params.demand_scale as its scale factor.
Scenario BuildScenario(const std::vector<HubRegistryEntry>& registry,
                       const PipelineParams& params,
                       const std::vector<WorkloadClass>& classes);

void ValidateRegistry(const std::vector<HubRegistryEntry>& registry,
                      const PipelineParams& params, std::size_t num_classes);

}  // namespace tokenflow

#endif  // TOKENFLOW_SCENARIO_PIPELINE_H_
