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

#include "tokenflow/export.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <utility>

#include "json.hpp"
#include "tokenflow/error.h"
#include "tokenflow/pricing.h"

#ifndef TOKENFLOW_VERSION
#define TOKENFLOW_VERSION "0.0.0"
#endif

namespace tokenflow {
namespace {

using Index = Eigen::Index;
using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string Num(double v) { return FormatNumber(v); }

std::string Count(std::size_t v) { return std::to_string(v); }

std::string Bool(bool v) { return v ? "true" : "false"; }

// JSON cannot carry infinities; they are written as strings.
ordered_json JsonNumber(double v) {
  if (std::isfinite(v)) return v == 0.0 ? ordered_json(0.0) : ordered_json(v);
  return FormatNumber(v);
}

ordered_json JsonVector(const std::vector<double>& v) {
  ordered_json a = ordered_json::array();
  for (double x : v) a.push_back(JsonNumber(x));
  return a;
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, path + ": cannot open for writing");
  out << text;
  if (!out) throw Error(ErrorCode::kIo, path + ": write failed");
}

std::string Join(const std::string& dir, const char* name) { return (fs::path(dir) / name).string(); }

std::vector<std::string> MeanPriceColumns(const std::vector<std::string>& ids, const char* prefix) {
  std::vector<std::string> cols;
  for (const std::string& id : ids) cols.push_back(std::string(prefix) + id + "_usd_per_mtok");
  return cols;
}

std::string CongestionUnit(Formulation f) {
  return f == Formulation::kTransferAware ? "usd_per_gb" : "usd_per_mtok";
}

struct PriceRow {
  std::string kind = "none";
  PriceDecomposition d;
};

PriceRow Decompose(const ClearingResult& r, std::size_t j, std::size_t k) {
  PriceRow row;
  try {
    if (r.dispatch(static_cast<Index>(j), static_cast<Index>(k)) > kActivityTolTokensPerS) {
      row.d = DecomposeLocal(r, j, k);
      row.kind = "local";
    } else {
      row.d = DecomposePath(r, j, k);
      row.kind = row.d.unserved ? "unserved" : "path";
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kPrecondition) throw;
  }
  return row;
}

void WriteInfeasibility(const ClearingResult& r, const std::string& dir) {
  const Scenario& s = *r.scenario;
  CsvTable t({"class", "demand_tokens_per_s", "capacity_tokens_per_s", "capacity_margin_tokens_per_s"});
  const Eigen::MatrixXd d = s.demand();
  for (std::size_t k = 0; k < s.num_classes(); ++k) {
    double cap = 0.0;
    for (const Node& n : s.nodes()) cap += n.capacity_tokens_per_s[k];
    const double dem = d.col(static_cast<Index>(k)).sum();
    t.AddRow({s.classes()[k].id, Num(dem), Num(cap), Num(cap - dem)});
  }
  t.Write(Join(dir, "infeasibility.csv"));
}

}  // namespace

std::string FormatNumber(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.15g", value);
  return buf;
}

std::string CsvEscape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::AddRow(std::vector<std::string> row) {
  if (row.size() != header_.size()) {
    throw Error(ErrorCode::kStructural, "csv row width does not match header");
  }
  rows_.push_back(std::move(row));
}

std::string CsvTable::ToString() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i > 0) out += ',';
      out += CsvEscape(fields[i]);
    }
    out += "\r\n";
  };
  line(header_);
  for (const auto& row : rows_) line(row);
  return out;
}

void CsvTable::Write(const std::string& path) const { WriteText(path, ToString()); }

void EnsureDirectory(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorCode::kIo, dir + ": cannot create output directory");
  }
}

void WriteSettlement(const SettlementLedger& ledger, const ClearingResult& result,
                     const std::string& dir) {
  EnsureDirectory(dir);
  const Scenario& s = *result.scenario;
  CsvTable summary({"formulation", "network_convention", "has_unmet_demand",
                    "user_payments_usd_per_hr", "compute_revenue_usd_per_hr",
                    "network_revenue_usd_per_hr", "surplus_usd_per_hr"});
  summary.AddRow({std::string(FormulationName(ledger.formulation)),
                  std::string(NetworkConventionName(ledger.convention)),
                  Bool(ledger.has_unmet_demand), Num(ledger.user_payments),
                  Num(ledger.compute_revenue), Num(ledger.network_revenue), Num(ledger.surplus)});
  summary.Write(Join(dir, "ledger.csv"));

  CsvTable nodes({"node", "payments_usd_per_hr", "compute_revenue_usd_per_hr"});
  for (std::size_t j = 0; j < s.num_nodes(); ++j) {
    nodes.AddRow({s.nodes()[j].id, Num(ledger.node_payments[j]), Num(ledger.node_compute_revenue[j])});
  }
  nodes.Write(Join(dir, "ledger_nodes.csv"));

  CsvTable arcs({"from", "to", "network_revenue_usd_per_hr", "congestion_revenue_usd_per_hr"});
  for (std::size_t a = 0; a < s.num_arcs(); ++a) {
    arcs.AddRow({s.arcs()[a].from, s.arcs()[a].to, Num(ledger.arc_network_revenue[a]),
                 Num(ledger.arc_congestion_revenue[a])});
  }
  arcs.Write(Join(dir, "ledger_arcs.csv"));
}

void WriteClearingBundle(const ClearingResult& r, const std::string& dir,
                         const std::string& scenario_name) {
  EnsureDirectory(dir);
  const Scenario& s = *r.scenario;
  std::vector<std::string> ids;
  for (const WorkloadClass& k : s.classes()) ids.push_back(k.id);
  const Eigen::MatrixXd demand = s.demand();

  std::optional<ScarcityReport> rep;
  if (r.feasible) rep = BuildScarcityReport(r);

  std::vector<std::string> head = {"scenario", "formulation", "demand_scale", "status", "feasible",
                                   "total_cost_usd_per_hr", "aggregate_demand_tokens_per_s",
                                   "unmet_tokens_per_s", "scarce_pairs", "congested_links",
                                   "saturated_links", "kkt_max_violation"};
  for (const std::string& c : MeanPriceColumns(ids, "mean_price_")) head.push_back(c);
  CsvTable summary(head);
  std::vector<std::string> row = {scenario_name, std::string(FormulationName(r.formulation)),
                                  Num(s.demand_scale()), std::string(LpStatusName(r.status)),
                                  Bool(r.feasible)};
  if (r.feasible) {
    row.insert(row.end(), {Num(r.total_cost_usd_per_hr), Num(demand.sum()), Num(r.unmet.sum()),
                           Count(rep->scarce_pairs.size()), Count(rep->congested_arcs.size()),
                           Count(rep->saturated_arcs.size()), Num(r.kkt.MaxViolation())});
    for (double p : rep->mean_price) row.push_back(Num(p));
  } else {
    row.insert(row.end(), {"", Num(demand.sum()), "", "", "", "", ""});
    for (std::size_t k = 0; k < ids.size(); ++k) row.push_back("");
  }
  summary.AddRow(row);
  summary.Write(Join(dir, "summary.csv"));

  ordered_json doc = ordered_json::object();
  doc["scenario"] = scenario_name;
  doc["formulation"] = std::string(FormulationName(r.formulation));
  doc["demand_scale"] = JsonNumber(s.demand_scale());
  doc["status"] = std::string(LpStatusName(r.status));
  doc["feasible"] = r.feasible;
  doc["classes"] = ids;

  if (!r.feasible) {
    WriteInfeasibility(r, dir);
    doc["message"] = r.solution.message;
    WriteText(Join(dir, "result.json"), doc.dump(2) + "\n");
    return;
  }

  CsvTable prices({"node", "class", "demand_tokens_per_s", "dispatch_tokens_per_s",
                   "unmet_tokens_per_s", "capacity_tokens_per_s", "utilization",
                   "price_usd_per_mtok", "scarcity_rent_usd_per_mtok", "decomposition",
                   "serving_node", "energy_usd_per_mtok", "opex_usd_per_mtok",
                   "serving_scarcity_usd_per_mtok", "path_routing_usd_per_mtok",
                   "path_congestion_usd_per_mtok", "penalty_usd_per_mtok", "path"});
  ordered_json price_rows = ordered_json::array();
  for (std::size_t j = 0; j < s.num_nodes(); ++j) {
    for (std::size_t k = 0; k < s.num_classes(); ++k) {
      const auto jj = static_cast<Index>(j);
      const auto kc = static_cast<Index>(k);
      const PriceRow pr = Decompose(r, j, k);
      std::string path;
      for (const PathTerm& t : pr.d.path) {
        if (!path.empty()) path += ';';
        path += s.arcs()[t.arc].from + "->" + s.arcs()[t.arc].to;
      }
      const bool decomposed = pr.kind == "local" || pr.kind == "path";
      prices.AddRow({s.nodes()[j].id, ids[k], Num(demand(jj, kc)), Num(r.dispatch(jj, kc)),
                     Num(r.unmet(jj, kc)), Num(s.nodes()[j].capacity_tokens_per_s[k]),
                     Num(rep->utilization(jj, kc)), Num(r.prices(jj, kc)), Num(r.scarcity(jj, kc)),
                     pr.kind, pr.kind == "none" ? "" : s.nodes()[pr.d.serving_node].id,
                     decomposed ? Num(pr.d.energy) : "", decomposed ? Num(pr.d.opex) : "",
                     decomposed ? Num(pr.d.scarcity) : "",
                     decomposed ? Num(pr.d.RoutingTotal()) : "",
                     decomposed ? Num(pr.d.CongestionTotal()) : "",
                     pr.kind == "unserved" ? Num(pr.d.penalty) : "", path});
      ordered_json pj = ordered_json::object();
      pj["node"] = s.nodes()[j].id;
      pj["class"] = ids[k];
      pj["demand_tokens_per_s"] = JsonNumber(demand(jj, kc));
      pj["dispatch_tokens_per_s"] = JsonNumber(r.dispatch(jj, kc));
      pj["unmet_tokens_per_s"] = JsonNumber(r.unmet(jj, kc));
      pj["price_usd_per_mtok"] = JsonNumber(r.prices(jj, kc));
      pj["scarcity_rent_usd_per_mtok"] = JsonNumber(r.scarcity(jj, kc));
      pj["decomposition"] = pr.kind;
      if (decomposed) {
        pj["serving_node"] = s.nodes()[pr.d.serving_node].id;
        pj["energy_usd_per_mtok"] = JsonNumber(pr.d.energy);
        pj["opex_usd_per_mtok"] = JsonNumber(pr.d.opex);
        pj["serving_scarcity_usd_per_mtok"] = JsonNumber(pr.d.scarcity);
        pj["path_routing_usd_per_mtok"] = JsonNumber(pr.d.RoutingTotal());
        pj["path_congestion_usd_per_mtok"] = JsonNumber(pr.d.CongestionTotal());
        pj["path"] = path;
      }
      price_rows.push_back(std::move(pj));
    }
  }
  prices.Write(Join(dir, "prices.csv"));

  CsvTable flows({"from", "to", "class", "flow_tokens_per_s", "routing_cost_usd_per_mtok",
                  "transfer_intensity_gb_per_mtok"});
  ordered_json flow_rows = ordered_json::array();
  for (std::size_t k = 0; k < s.num_classes(); ++k) {
    for (std::size_t a : r.allowed_arcs[k]) {
      const auto ai = static_cast<Index>(a);
      const auto kc = static_cast<Index>(k);
      flows.AddRow({s.arcs()[a].from, s.arcs()[a].to, ids[k], Num(r.flows(ai, kc)),
                    Num(r.routing_cost(ai, kc)), Num(r.transfer_intensity(ai, kc))});
      if (r.flows(ai, kc) > 0.0) {
        ordered_json fj = ordered_json::object();
        fj["from"] = s.arcs()[a].from;
        fj["to"] = s.arcs()[a].to;
        fj["class"] = ids[k];
        fj["flow_tokens_per_s"] = JsonNumber(r.flows(ai, kc));
        flow_rows.push_back(std::move(fj));
      }
    }
  }
  flows.Write(Join(dir, "flows.csv"));

  const bool transfer = r.formulation == Formulation::kTransferAware;
  const double min_payload = s.MinPayload();
  CsvTable links({"from", "to", "distance_km", "latency_ms", "token_equiv_capacity_tokens_per_s",
                  "token_equiv_usage_tokens_per_s", "physical_capacity_gb_per_s",
                  "physical_usage_gb_per_s", "congestion_rent_usd_per_mtok",
                  "congestion_rent_usd_per_gb", "saturated", "congested"});
  ordered_json link_rows = ordered_json::array();
  for (std::size_t a = 0; a < s.num_arcs(); ++a) {
    const auto ai = static_cast<Index>(a);
    const Arc& arc = s.arcs()[a];
    const bool saturated = std::find(rep->saturated_arcs.begin(), rep->saturated_arcs.end(), a) !=
                           rep->saturated_arcs.end();
    const bool congested = std::find(rep->congested_arcs.begin(), rep->congested_arcs.end(), a) !=
                           rep->congested_arcs.end();
    const std::string eta = Num(r.congestion(ai));
    links.AddRow({arc.from, arc.to, Num(arc.distance_km), Num(arc.latency_ms),
                  Num(arc.physical_capacity_gb_per_s / min_payload * kTokensPerMillion),
                  Num(r.flows.row(ai).sum()), Num(arc.physical_capacity_gb_per_s),
                  Num(r.PhysicalUsage(a)), transfer ? "" : eta, transfer ? eta : "",
                  Bool(saturated), Bool(congested)});
    ordered_json lj = ordered_json::object();
    lj["from"] = arc.from;
    lj["to"] = arc.to;
    lj["usage"] = JsonNumber(r.link_usage(ai));
    lj["capacity"] = JsonNumber(r.link_capacity(ai));
    lj["congestion_rent"] = JsonNumber(r.congestion(ai));
    lj["saturated"] = saturated;
    lj["congested"] = congested;
    link_rows.push_back(std::move(lj));
  }
  links.Write(Join(dir, "links.csv"));

  const SettlementLedger ledger = Settle(r);
  WriteSettlement(ledger, r, dir);

  doc["total_cost_usd_per_hr"] = JsonNumber(r.total_cost_usd_per_hr);
  doc["aggregate_demand_tokens_per_s"] = JsonNumber(demand.sum());
  doc["link_units"] = transfer ? "gb_per_s" : "token_equiv_tokens_per_s";
  doc["congestion_rent_unit"] = CongestionUnit(r.formulation);
  doc["mean_price_usd_per_mtok"] = JsonVector(rep->mean_price);
  doc["max_price_usd_per_mtok"] = JsonVector(rep->max_price);
  doc["scarce_pairs"] = rep->scarce_pairs.size();
  doc["congested_links"] = rep->congested_arcs.size();
  doc["saturated_links"] = rep->saturated_arcs.size();
  ordered_json kkt = ordered_json::object();
  kkt["primal_feasibility"] = JsonNumber(r.kkt.primal_feasibility);
  kkt["dual_feasibility"] = JsonNumber(r.kkt.dual_feasibility);
  kkt["complementary_slackness"] = JsonNumber(r.kkt.complementary_slackness);
  kkt["duality_gap"] = JsonNumber(r.kkt.duality_gap);
  doc["kkt"] = std::move(kkt);
  doc["prices"] = std::move(price_rows);
  doc["flows"] = std::move(flow_rows);
  doc["links"] = std::move(link_rows);
  ordered_json lj = ordered_json::object();
  lj["network_convention"] = std::string(NetworkConventionName(ledger.convention));
  lj["user_payments_usd_per_hr"] = JsonNumber(ledger.user_payments);
  lj["compute_revenue_usd_per_hr"] = JsonNumber(ledger.compute_revenue);
  lj["network_revenue_usd_per_hr"] = JsonNumber(ledger.network_revenue);
  lj["surplus_usd_per_hr"] = JsonNumber(ledger.surplus);
  doc["ledger"] = std::move(lj);
  WriteText(Join(dir, "result.json"), doc.dump(2) + "\n");
}

void WriteSweep(const SweepTable& table, const std::string& dir) {
  EnsureDirectory(dir);
  std::vector<std::string> head = {"scale", "status", "feasible", "aggregate_demand_tokens_per_s",
                                   "total_cost_usd_per_hr", "scarce_pairs", "congested_links",
                                   "saturated_links"};
  for (const std::string& c : MeanPriceColumns(table.class_ids, "mean_price_")) head.push_back(c);
  for (const std::string& c : MeanPriceColumns(table.class_ids, "max_price_")) head.push_back(c);
  CsvTable csv(head);
  ordered_json rows = ordered_json::array();
  for (const SweepRow& r : table.rows) {
    std::vector<std::string> row = {Num(r.scale), std::string(LpStatusName(r.status)),
                                    Bool(r.feasible), Num(r.aggregate_demand_tokens_per_s)};
    ordered_json j = ordered_json::object();
    j["scale"] = JsonNumber(r.scale);
    j["status"] = std::string(LpStatusName(r.status));
    j["feasible"] = r.feasible;
    j["aggregate_demand_tokens_per_s"] = JsonNumber(r.aggregate_demand_tokens_per_s);
    if (r.feasible) {
      row.insert(row.end(), {Num(r.total_cost_usd_per_hr), Count(r.scarce_pairs),
                             Count(r.congested_links), Count(r.saturated_links)});
      for (double p : r.mean_price) row.push_back(Num(p));
      for (double p : r.max_price) row.push_back(Num(p));
      j["total_cost_usd_per_hr"] = JsonNumber(r.total_cost_usd_per_hr);
      j["scarce_pairs"] = r.scarce_pairs;
      j["congested_links"] = r.congested_links;
      j["saturated_links"] = r.saturated_links;
      j["mean_price_usd_per_mtok"] = JsonVector(r.mean_price);
      j["max_price_usd_per_mtok"] = JsonVector(r.max_price);
    } else {
      row.resize(head.size());
    }
    csv.AddRow(row);
    rows.push_back(std::move(j));
  }
  csv.Write(Join(dir, "sweep.csv"));
  ordered_json doc = ordered_json::object();
  doc["formulation"] = std::string(FormulationName(table.formulation));
  doc["classes"] = table.class_ids;
  doc["mean_price_aggregation"] = "unweighted_node_mean";
  doc["rows"] = std::move(rows);
  WriteText(Join(dir, "sweep.json"), doc.dump(2) + "\n");
}

void WriteComparison(const ComparisonTable& table, const std::string& dir) {
  EnsureDirectory(dir);
  std::vector<std::string> head = {"row", "formulation", "opex_adder_usd_per_mtok", "feasible",
                                   "total_cost_usd_per_hr"};
  for (const std::string& c : MeanPriceColumns(table.class_ids, "mean_price_")) head.push_back(c);
  head.insert(head.end(), {"congested_links", "saturated_links", "max_dispatch_diff_tokens_per_s",
                           "max_flow_diff_tokens_per_s"});
  CsvTable csv(head);
  ordered_json rows = ordered_json::array();
  for (const ComparisonRow& r : table.rows) {
    std::vector<std::string> row = {r.name, std::string(FormulationName(r.formulation)),
                                    Num(r.opex_adder_usd_per_mtok), Bool(r.feasible)};
    ordered_json j = ordered_json::object();
    j["row"] = r.name;
    j["formulation"] = std::string(FormulationName(r.formulation));
    j["opex_adder_usd_per_mtok"] = JsonNumber(r.opex_adder_usd_per_mtok);
    j["feasible"] = r.feasible;
    if (r.feasible) {
      row.push_back(Num(r.total_cost_usd_per_hr));
      for (double p : r.mean_price) row.push_back(Num(p));
      row.insert(row.end(), {Count(r.congested_links), Count(r.saturated_links),
                             Num(r.max_dispatch_diff_tokens_per_s), Num(r.max_flow_diff_tokens_per_s)});
      j["total_cost_usd_per_hr"] = JsonNumber(r.total_cost_usd_per_hr);
      j["mean_price_usd_per_mtok"] = JsonVector(r.mean_price);
      j["congested_links"] = r.congested_links;
      j["saturated_links"] = r.saturated_links;
      j["max_dispatch_diff_tokens_per_s"] = JsonNumber(r.max_dispatch_diff_tokens_per_s);
      j["max_flow_diff_tokens_per_s"] = JsonNumber(r.max_flow_diff_tokens_per_s);
    } else {
      row.resize(head.size());
    }
    csv.AddRow(row);
    rows.push_back(std::move(j));
  }
  csv.Write(Join(dir, "comparison.csv"));
  ordered_json doc = ordered_json::object();
  doc["classes"] = table.class_ids;
  doc["rows"] = std::move(rows);
  WriteText(Join(dir, "comparison.json"), doc.dump(2) + "\n");
}

void WriteLatency(const LatencyExperimentResult& result, const std::string& dir) {
  EnsureDirectory(dir);
  const Scenario& s = *result.before.scenario;
  std::string bounds;
  for (const auto& [cls, ms] : result.bounds) {
    if (!bounds.empty()) bounds += ';';
    bounds += s.classes()[cls].id + "=" + Num(ms);
  }
  const bool both = result.before.feasible && result.after.feasible;
  CsvTable summary({"bounds_ms", "feasible_before", "feasible_after", "cost_before_usd_per_hr",
                    "cost_after_usd_per_hr", "cost_delta_pct"});
  summary.AddRow({bounds, Bool(result.before.feasible), Bool(result.after.feasible),
                  result.before.feasible ? Num(result.before.total_cost_usd_per_hr) : "",
                  result.after.feasible ? Num(result.after.total_cost_usd_per_hr) : "",
                  both ? Num(result.cost_delta_pct) : ""});
  summary.Write(Join(dir, "latency_summary.csv"));

  CsvTable prices({"node", "class", "price_before_usd_per_mtok", "price_after_usd_per_mtok",
                   "price_delta_usd_per_mtok"});
  if (both) {
    for (std::size_t j = 0; j < s.num_nodes(); ++j) {
      for (std::size_t k = 0; k < s.num_classes(); ++k) {
        const auto jj = static_cast<Index>(j);
        const auto kc = static_cast<Index>(k);
        prices.AddRow({s.nodes()[j].id, s.classes()[k].id, Num(result.before.prices(jj, kc)),
                       Num(result.after.prices(jj, kc)), Num(result.price_delta(jj, kc))});
      }
    }
  }
  prices.Write(Join(dir, "latency_prices.csv"));

  CsvTable clusters({"class", "bound_ms", "cluster", "node"});
  for (std::size_t i = 0; i < result.bounds.size(); ++i) {
    const auto& [cls, ms] = result.bounds[i];
    for (std::size_t c = 0; c < result.clusters[i].size(); ++c) {
      for (std::size_t node : result.clusters[i][c]) {
        clusters.AddRow({s.classes()[cls].id, Num(ms), Count(c), s.nodes()[node].id});
      }
    }
  }
  clusters.Write(Join(dir, "latency_clusters.csv"));
}

void WriteMetadata(const std::string& dir, const std::map<std::string, std::string>& fields) {
  EnsureDirectory(dir);
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &utc);
  ordered_json doc = ordered_json::object();
  doc["generated_at"] = stamp;
  doc["tokenflow_version"] = TOKENFLOW_VERSION;
  doc["mean_price_aggregation"] = "unweighted_node_mean";
  doc["settlement_network_convention"] =
      "token_units for baseline and partial-service, transfer_units for transfer-aware";
  doc["unmet_demand_settlement"] = "shed demand pays nothing";
  doc["scarcity_tolerance"] = kPriceTol;
  for (const auto& [k, v] : fields) doc[k] = v;
  WriteText(Join(dir, "metadata.json"), doc.dump(2) + "\n");
}

}  // namespace tokenflow
