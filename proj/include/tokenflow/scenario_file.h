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

// JSON scenario documents.
//
//   {
//     "name": "...", "notes": ["..."],
//     "classes":  [{"id", "label", "energy_kwh_per_mtok", "payload_gb_per_mtok",
//                   "latency_bound_ms" (number or null)}],
//     "registry": [{"hub", "metro", "state", "latitude", "longitude",
//                   "facility_count", "est_power_mw", "elec_price_usd_per_kwh",
//                   "population_weight"}],
//     "pipeline": {"throughput_tokens_per_s_per_mw": {class: v}, "max_arc_distance_km",
//                  "backbone_metros": [...], "backbone_capacity_gbps", "default_capacity_gbps",
//                  "per_hop_overhead_ms", "fiber_speed_km_per_ms", "transfer_tariff_usd_per_gb",
//                  "base_demand_tokens_per_s": {class: v}, "demand_scale"},
//     "overrides": {"arcs": [...], "demand_tokens_per_s": {hub: {class: v}},
//                   "capacity_tokens_per_s": {hub: {class: v}},
//                   "energy_kwh_per_mtok": {hub: {class: v}},
//                   "opex_adder_usd_per_mtok": {hub: v}},
//     "experiments": {"sweep_scales": [...], "latency_bounds_ms": {class: v},
//                     "opex_adder_usd_per_mtok", "partial_penalty_usd_per_mtok"}
//   }
//
// "overrides" and "experiments" are optional, as is every key inside them.
// Demand overrides are unscaled; demand_scale still applies. Unknown keys are
// rejected. Diagnostics name the file and the JSON path of the offending key.

#ifndef TOKENFLOW_SCENARIO_FILE_H_
#define TOKENFLOW_SCENARIO_FILE_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tokenflow/network_model.h"
#include "tokenflow/scenario_pipeline.h"

namespace tokenflow {

using ClassValues = std::map<std::string, double>;

struct ScenarioOverrides {
  std::optional<std::vector<Arc>> arcs;
  std::map<std::string, ClassValues> demand_tokens_per_s;
  std::map<std::string, ClassValues> capacity_tokens_per_s;
  std::map<std::string, ClassValues> energy_kwh_per_mtok;
  std::map<std::string, double> opex_adder_usd_per_mtok;
};

struct ExperimentConfig {
  std::vector<double> sweep_scales;
  ClassValues latency_bounds_ms;
  std::optional<double> opex_adder_usd_per_mtok;
  std::optional<double> partial_penalty_usd_per_mtok;
};

struct ScenarioFile {
  std::string name;
  std::vector<std::string> notes;
  std::vector<WorkloadClass> classes;
  std::vector<HubRegistryEntry> registry;
  PipelineParams pipeline;
  ScenarioOverrides overrides;
  ExperimentConfig experiments;
};

// Throws Error with kIo, kParse, kMissingField, kUnknownKey, kTypeMismatch,
// kInvalidValue or kStructural.
ScenarioFile ParseScenarioFile(const std::string& path);
ScenarioFile ParseScenarioText(const std::string& text, const std::string& source);

// Canonical JSON: two-space indent, keys of per-class maps sorted, trailing
// newline. Parsing the output yields an equal ScenarioFile.
std::string SerializeScenarioFile(const ScenarioFile& file);

// Runs the pipeline and applies the overrides. Errors carry the file name.
Scenario BuildScenario(const ScenarioFile& file, const std::string& source = "<scenario>");

// Directory searched for bare scenario names: $TOKENFLOW_DATA_DIR if set,
// otherwise the directory configured at build time.
std::string DataDirectory();

// An existing path is returned unchanged; otherwise "<data dir>/<name>.json".
// Throws Error(kIo) if neither exists.
std::string ResolveScenarioPath(const std::string& name_or_path);

}  // namespace tokenflow

#endif  // TOKENFLOW_SCENARIO_FILE_H_
