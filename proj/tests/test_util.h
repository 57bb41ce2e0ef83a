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

// Scenario builders and file helpers shared by the tests.

#ifndef TOKENFLOW_TESTS_TEST_UTIL_H_
#define TOKENFLOW_TESTS_TEST_UTIL_H_

#include <cstddef>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "tokenflow/clearing.h"
#include "tokenflow/network_model.h"

namespace tokenflow::testing {

struct NodeSpec {
  std::string id;
  double elec_price = 0.1;
  std::vector<double> capacity;  // tokens/s per class
  std::vector<double> demand;    // tokens/s per class
};

struct ArcSpec {
  std::string from;
  std::string to;
  double latency_ms = 5.0;
  double capacity_gb_per_s = kInfinity;
  std::vector<double> route_cost;  // empty means zero
  double tariff_usd_per_gb = 0.0;
};

// Classes with the given energy intensities (kWh/M tokens) and payloads
// (GB/M tokens), ids "k0", "k1", ...
std::vector<WorkloadClass> MakeClasses(const std::vector<double>& energy,
                                       const std::vector<double>& payload);

Scenario MakeScenario(const std::vector<NodeSpec>& nodes, const std::vector<ArcSpec>& arcs,
                      const std::vector<WorkloadClass>& classes, double scale = 1.0);

// Random strongly connected market with 2..max_nodes nodes and
// 1..max_classes classes. Some links are capacitated, some classes latency
// bounded, some arcs carry private routing cost.
Scenario RandomScenario(std::mt19937_64& rng, std::size_t max_nodes, std::size_t max_classes);

// Shipped scenario by name, built at the given scale (0 keeps the file's).
Scenario Shipped(const std::string& name, double scale = 0.0);

using CsvRow = std::map<std::string, std::string>;
// Minimal RFC 4180 reader keyed by header.
std::vector<CsvRow> ReadCsv(const std::string& path);
std::string ReadFile(const std::string& path);

// Fresh empty directory under the system temp dir.
std::string TempDir(const std::string& tag);

}  // namespace tokenflow::testing

#endif  // TOKENFLOW_TESTS_TEST_UTIL_H_
