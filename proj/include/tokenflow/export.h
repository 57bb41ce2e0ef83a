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

// Result export. Every writer emits comma-separated tables (one header row,
// RFC 4180 quoting, units in column names, numbers with 15 significant
// digits) plus a JSON document with the same content. Output depends only on
// the inputs; the wall-clock timestamp lives in metadata.json alone.

#ifndef TOKENFLOW_EXPORT_H_
#define TOKENFLOW_EXPORT_H_

#include <map>
#include <string>
#include <vector>

#include "tokenflow/clearing.h"
#include "tokenflow/experiments.h"
#include "tokenflow/settlement.h"

namespace tokenflow {

// "%.15g"; infinities as "inf" / "-inf", NaN as "nan", negative zero as "0".
std::string FormatNumber(double value);

// Quotes fields containing a comma, quote, CR or LF.
std::string CsvEscape(const std::string& field);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  // Throws Error(kStructural) when the row width differs from the header.
  void AddRow(std::vector<std::string> row);
  std::string ToString() const;
  // Throws Error(kIo).
  void Write(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Creates `dir` if needed. Throws Error(kIo).
void EnsureDirectory(const std::string& dir);

// summary.csv, prices.csv, flows.csv, links.csv, result.json; ledger files
// when feasible, infeasibility.csv otherwise.
void WriteClearingBundle(const ClearingResult& result, const std::string& dir,
                         const std::string& scenario_name);

// ledger.csv, ledger_nodes.csv, ledger_arcs.csv.
void WriteSettlement(const SettlementLedger& ledger, const ClearingResult& result,
                     const std::string& dir);

// sweep.csv, sweep.json.
void WriteSweep(const SweepTable& table, const std::string& dir);

// comparison.csv, comparison.json.
void WriteComparison(const ComparisonTable& table, const std::string& dir);

// latency_summary.csv, latency_prices.csv, latency_clusters.csv.
void WriteLatency(const LatencyExperimentResult& result, const std::string& dir);

// metadata.json: generation timestamp, library version, conventions in use and
// the caller's fields.
void WriteMetadata(const std::string& dir, const std::map<std::string, std::string>& fields);

}  // namespace tokenflow

#endif  // TOKENFLOW_EXPORT_H_
