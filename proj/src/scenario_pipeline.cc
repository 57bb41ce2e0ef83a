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

#include "tokenflow/scenario_pipeline.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "tokenflow/error.h"

namespace tokenflow {
namespace {

constexpr double kBitsPerByte = 8.0;

double Radians(double degrees) { return degrees * std::numbers::pi / 180.0; }

}  // namespace

PipelineParams DefaultPipelineParams() {
  PipelineParams p;
  p.throughput_per_mw = {5000.0, 200.0, 4000.0, 1000.0};
  p.backbone_metros = {"ashburn", "dallas", "siliconvalley",
                       "chicago", "atlanta", "newyork"};
  p.base_demand_rates = {50000.0, 5000.0, 30000.0, 10000.0};
  return p;
}

std::vector<WorkloadClass> DefaultWorkloadClasses() {
  return {
      {"chat", "Interactive chat", 1.0, 0.5, 100.0},
      {"image", "Image generation", 500.0, 100.0, std::nullopt},
      {"code", "Code review", 2.0, 1.0, 200.0},
      {"batch", "Batch training", 10.0, 10.0, std::nullopt},
  };
}

std::vector<double> DeriveCapacity(const HubRegistryEntry& entry,
                                   const PipelineParams& params) {
  std::vector<double> capacity;
  capacity.reserve(params.throughput_per_mw.size());
  for (double per_mw : params.throughput_per_mw) {
    capacity.push_back(entry.est_power_mw * per_mw);
  }
  return capacity;
}

double HaversineKm(double lat1, double lon1, double lat2, double lon2) {
  const double phi1 = Radians(lat1);
  const double phi2 = Radians(lat2);
  const double dphi = Radians(lat2 - lat1);
  const double dlambda = Radians(lon2 - lon1);
  const double s = std::sin(dphi / 2.0);
  const double t = std::sin(dlambda / 2.0);
  double h = s * s + std::cos(phi1) * std::cos(phi2) * t * t;
  h = std::min(1.0, std::max(0.0, h));
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

std::vector<Arc> BuildArcs(const std::vector<HubRegistryEntry>& registry,
                           const PipelineParams& params) {
  std::vector<Arc> arcs;
  for (std::size_t i = 0; i < registry.size(); ++i) {
    for (std::size_t j = i + 1; j < registry.size(); ++j) {
      const HubRegistryEntry& a = registry[i];
      const HubRegistryEntry& b = registry[j];
      const double km = HaversineKm(a.latitude, a.longitude, b.latitude, b.longitude);
      if (km > params.max_arc_distance_km) continue;
      const bool backbone = params.backbone_metros.contains(a.hub) &&
                            params.backbone_metros.contains(b.hub);
      const double gbps =
          backbone ? params.backbone_capacity_gbps : params.default_capacity_gbps;
      Arc forward;
      forward.from = a.hub;
      forward.to = b.hub;
      forward.distance_km = km;
      forward.latency_ms = km / params.fiber_speed_km_per_ms + params.per_hop_overhead_ms;
      forward.physical_capacity_gb_per_s = gbps / kBitsPerByte;
      forward.transfer_tariff_usd_per_gb = params.transfer_tariff_usd_per_gb;
      Arc backward = forward;
      std::swap(backward.from, backward.to);
      arcs.push_back(std::move(forward));
      arcs.push_back(std::move(backward));
    }
  }
  return arcs;
}

Eigen::MatrixXd GenerateDemand(const std::vector<HubRegistryEntry>& registry,
                               const PipelineParams& params) {
  Eigen::MatrixXd d(static_cast<Eigen::Index>(registry.size()),
                    static_cast<Eigen::Index>(params.base_demand_rates.size()));
  for (std::size_t j = 0; j < registry.size(); ++j) {
    for (std::size_t k = 0; k < params.base_demand_rates.size(); ++k) {
      d(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
          registry[j].population_weight * params.base_demand_rates[k] * params.demand_scale;
    }
  }
  return d;
}

void ValidateRegistry(const std::vector<HubRegistryEntry>& registry,
                      const PipelineParams& params, std::size_t num_classes) {
  if (registry.empty()) throw Error(ErrorCode::kInvalidValue, "registry is empty");
  for (const HubRegistryEntry& e : registry) {
    const std::string where = "hub '" + e.hub + "': ";
    if (!(e.est_power_mw > 0.0)) {
      throw Error(ErrorCode::kInvalidValue, where + "est_power must be > 0");
    }
    if (!(e.population_weight >= 0.0)) {
      throw Error(ErrorCode::kInvalidValue, where + "population_weight must be >= 0");
    }
  }
  if (params.throughput_per_mw.size() != num_classes ||
      params.base_demand_rates.size() != num_classes) {
    throw Error(ErrorCode::kStructural,
                "pipeline throughput and base demand must list every class");
  }
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  for (double v : params.throughput_per_mw) {
    if (!positive(v)) throw Error(ErrorCode::kInvalidValue, "throughput must be > 0");
  }
  for (double v : params.base_demand_rates) {
    if (!positive(v)) throw Error(ErrorCode::kInvalidValue, "base demand rate must be > 0");
  }
  if (!positive(params.max_arc_distance_km) || !positive(params.backbone_capacity_gbps) ||
      !positive(params.default_capacity_gbps) || !positive(params.per_hop_overhead_ms) ||
      !positive(params.fiber_speed_km_per_ms) || !positive(params.transfer_tariff_usd_per_gb) ||
      !positive(params.demand_scale)) {
    throw Error(ErrorCode::kInvalidValue, "pipeline parameters must be > 0");
  }
  for (const std::string& metro : params.backbone_metros) {
    bool found = false;
    for (const HubRegistryEntry& e : registry) found = found || e.hub == metro;
    if (!found) {
      throw Error(ErrorCode::kStructural,
                  "backbone metro '" + metro + "' is not a registry hub");
    }
  }
}

std::vector<Node> BuildNodes(const std::vector<HubRegistryEntry>& registry,
                             const PipelineParams& params) {
  std::vector<Node> nodes;
  nodes.reserve(registry.size());
  for (const HubRegistryEntry& e : registry) {
    Node n;
    n.id = e.hub;
    n.metro = e.metro;
    n.latitude = e.latitude;
    n.longitude = e.longitude;
    n.site_power_mw = e.est_power_mw;
    n.elec_price_usd_per_kwh = e.elec_price_usd_per_kwh;
    n.capacity_tokens_per_s = DeriveCapacity(e, params);
    nodes.push_back(std::move(n));
  }
  return nodes;
}

Scenario BuildScenario(const std::vector<HubRegistryEntry>& registry,
                       const PipelineParams& params,
                       const std::vector<WorkloadClass>& classes) {
  ValidateRegistry(registry, params, classes.size());
  PipelineParams unscaled = params;
  unscaled.demand_scale = 1.0;
  return Scenario::Create(BuildNodes(registry, params), BuildArcs(registry, params), classes,
                          GenerateDemand(registry, unscaled), params.demand_scale);
}

}  // namespace tokenflow
