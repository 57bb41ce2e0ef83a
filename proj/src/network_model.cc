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

#include "tokenflow/network_model.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <tuple>
#include <utility>

#include "tokenflow/error.h"

namespace tokenflow {
namespace {

[[noreturn]] void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

void RequireFinite(double value, const std::string& what) {
  if (!std::isfinite(value)) Fail(ErrorCode::kInvalidValue, what + " must be finite");
}

}  // namespace

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kStructural: return "structural";
    case ErrorCode::kInvalidValue: return "invalid-value";
    case ErrorCode::kMissingField: return "missing-field";
    case ErrorCode::kUnknownKey: return "unknown-key";
    case ErrorCode::kTypeMismatch: return "type-mismatch";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kPrecondition: return "precondition";
    case ErrorCode::kSolver: return "solver";
  }
  return "unknown";
}

Scenario Scenario::Create(std::vector<Node> nodes, std::vector<Arc> arcs,
                          std::vector<WorkloadClass> classes,
                          Eigen::MatrixXd demand_tokens_per_s,
                          double demand_scale) {
  if (demand_tokens_per_s.rows() != static_cast<Eigen::Index>(nodes.size()) ||
      demand_tokens_per_s.cols() != static_cast<Eigen::Index>(classes.size())) {
    Fail(ErrorCode::kStructural, "demand matrix must be nodes x classes");
  }
  std::vector<std::size_t> order(nodes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return nodes[a].id < nodes[b].id;
  });

  Scenario s;
  s.classes_ = std::move(classes);
  s.base_demand_.resize(demand_tokens_per_s.rows(), demand_tokens_per_s.cols());
  s.nodes_.reserve(nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    s.nodes_.push_back(std::move(nodes[order[i]]));
    s.base_demand_.row(static_cast<Eigen::Index>(i)) =
        demand_tokens_per_s.row(static_cast<Eigen::Index>(order[i]));
  }
  std::stable_sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) {
    return std::tie(a.from, a.to) < std::tie(b.from, b.to);
  });
  s.arcs_ = std::move(arcs);
  s.demand_scale_ = demand_scale;
  s.Validate();
  return s;
}

void Scenario::Validate() {
  const std::size_t num_k = classes_.size();
  std::set<std::string> class_ids;
  for (const WorkloadClass& k : classes_) {
    if (k.id.empty()) Fail(ErrorCode::kInvalidValue, "class id must be non-empty");
    if (!class_ids.insert(k.id).second) {
      Fail(ErrorCode::kStructural, "duplicate class id '" + k.id + "'");
    }
    if (!(k.energy_kwh_per_mtok > 0.0) || !std::isfinite(k.energy_kwh_per_mtok)) {
      Fail(ErrorCode::kInvalidValue,
           "class '" + k.id + "': energy intensity must be > 0");
    }
    if (!(k.payload_gb_per_mtok > 0.0) || !std::isfinite(k.payload_gb_per_mtok)) {
      Fail(ErrorCode::kInvalidValue, "class '" + k.id + "': payload must be > 0");
    }
    if (k.latency_bound_ms && !(*k.latency_bound_ms > 0.0)) {
      Fail(ErrorCode::kInvalidValue,
           "class '" + k.id + "': latency bound must be > 0 or unconstrained");
    }
  }

  std::set<std::string> node_ids;
  for (Node& n : nodes_) {
    const std::string where = "node '" + n.id + "': ";
    if (n.id.empty()) Fail(ErrorCode::kInvalidValue, "node id must be non-empty");
    if (!node_ids.insert(n.id).second) {
      Fail(ErrorCode::kStructural, "duplicate node id '" + n.id + "'");
    }
    RequireFinite(n.elec_price_usd_per_kwh, where + "elec_price");
    if (n.elec_price_usd_per_kwh < 0.0) {
      Fail(ErrorCode::kInvalidValue, where + "elec_price must be >= 0");
    }
    if (!(n.latitude >= -90.0 && n.latitude <= 90.0)) {
      Fail(ErrorCode::kInvalidValue, where + "latitude must be in [-90, 90]");
    }
    if (!(n.longitude >= -180.0 && n.longitude <= 180.0)) {
      Fail(ErrorCode::kInvalidValue, where + "longitude must be in [-180, 180]");
    }
    if (n.capacity_tokens_per_s.size() != num_k) {
      Fail(ErrorCode::kStructural, where + "capacity must list every class");
    }
    for (double c : n.capacity_tokens_per_s) {
      if (!(c >= 0.0) || std::isnan(c)) {
        Fail(ErrorCode::kInvalidValue, where + "capacity must be >= 0");
      }
    }
    if (n.energy_override_kwh_per_mtok.empty()) {
      n.energy_override_kwh_per_mtok.resize(num_k);
    } else if (n.energy_override_kwh_per_mtok.size() != num_k) {
      Fail(ErrorCode::kStructural, where + "energy override must list every class");
    }
    for (const auto& e : n.energy_override_kwh_per_mtok) {
      if (e && !(*e > 0.0 && std::isfinite(*e))) {
        Fail(ErrorCode::kInvalidValue, where + "energy override must be > 0");
      }
    }
    RequireFinite(n.opex_adder_usd_per_mtok, where + "opex_adder");
    if (n.opex_adder_usd_per_mtok < 0.0) {
      Fail(ErrorCode::kInvalidValue, where + "opex_adder must be >= 0");
    }
  }

  tails_.clear();
  heads_.clear();
  std::set<std::pair<std::string, std::string>> arc_keys;
  for (Arc& a : arcs_) {
    const std::string where = "arc " + a.from + "->" + a.to + ": ";
    auto tail = FindNode(a.from);
    auto head = FindNode(a.to);
    if (!tail || !head) {
      Fail(ErrorCode::kStructural, where + "endpoint references an unknown node");
    }
    if (*tail == *head) Fail(ErrorCode::kStructural, where + "self-loop arcs are not allowed");
    if (!arc_keys.insert({a.from, a.to}).second) {
      Fail(ErrorCode::kStructural, where + "duplicate arc");
    }
    if (!(a.latency_ms > 0.0) || !std::isfinite(a.latency_ms)) {
      Fail(ErrorCode::kInvalidValue, where + "latency must be > 0");
    }
    if (!(a.physical_capacity_gb_per_s > 0.0)) {
      Fail(ErrorCode::kInvalidValue, where + "physical capacity must be > 0");
    }
    RequireFinite(a.transfer_tariff_usd_per_gb, where + "transfer tariff");
    if (a.transfer_tariff_usd_per_gb < 0.0) {
      Fail(ErrorCode::kInvalidValue, where + "transfer tariff must be >= 0");
    }
    if (!(a.overhead_factor >= 1.0) || !std::isfinite(a.overhead_factor)) {
      Fail(ErrorCode::kInvalidValue, where + "overhead factor must be >= 1");
    }
    if (a.routing_cost_usd_per_mtok.empty()) {
      a.routing_cost_usd_per_mtok.assign(num_k, 0.0);
    } else if (a.routing_cost_usd_per_mtok.size() != num_k) {
      Fail(ErrorCode::kStructural, where + "routing cost must list every class");
    }
    for (double c : a.routing_cost_usd_per_mtok) {
      if (!(c >= 0.0) || !std::isfinite(c)) {
        Fail(ErrorCode::kInvalidValue, where + "routing cost must be >= 0");
      }
    }
    tails_.push_back(*tail);
    heads_.push_back(*head);
  }

  if (!(demand_scale_ >= 0.0) || !std::isfinite(demand_scale_)) {
    Fail(ErrorCode::kInvalidValue, "demand scale must be >= 0");
  }
  for (Eigen::Index i = 0; i < base_demand_.size(); ++i) {
    const double d = base_demand_.data()[i];
    if (!(d >= 0.0) || !std::isfinite(d)) {
      Fail(ErrorCode::kInvalidValue, "demand entries must be finite and >= 0");
    }
  }
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    for (std::size_t k = 0; k < num_k; ++k) {
      if (!std::isfinite(MarginalCost(j, k))) {
        Fail(ErrorCode::kInvalidValue,
             "node '" + nodes_[j].id + "': marginal cost must be finite");
      }
    }
  }
}

std::optional<std::size_t> Scenario::FindNode(const std::string& id) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                             [](const Node& n, const std::string& v) { return n.id < v; });
  if (it == nodes_.end() || it->id != id) return std::nullopt;
  return static_cast<std::size_t>(it - nodes_.begin());
}

std::optional<std::size_t> Scenario::FindClass(const std::string& id) const {
  for (std::size_t k = 0; k < classes_.size(); ++k) {
    if (classes_[k].id == id) return k;
  }
  return std::nullopt;
}

std::optional<std::size_t> Scenario::FindArc(const std::string& from,
                                             const std::string& to) const {
  for (std::size_t a = 0; a < arcs_.size(); ++a) {
    if (arcs_[a].from == from && arcs_[a].to == to) return a;
  }
  return std::nullopt;
}

double Scenario::EnergyCost(std::size_t node, std::size_t cls) const {
  const Node& n = nodes_[node];
  const auto& override_value = n.energy_override_kwh_per_mtok[cls];
  const double e = override_value ? *override_value : classes_[cls].energy_kwh_per_mtok;
  return n.elec_price_usd_per_kwh * e;
}

double Scenario::MarginalCost(std::size_t node, std::size_t cls) const {
  return EnergyCost(node, cls) + nodes_[node].opex_adder_usd_per_mtok;
}

double Scenario::RouteCost(std::size_t arc, std::size_t cls) const {
  return arcs_[arc].routing_cost_usd_per_mtok[cls];
}

double Scenario::TransferIntensity(std::size_t arc, std::size_t cls) const {
  return arcs_[arc].overhead_factor * classes_[cls].payload_gb_per_mtok;
}

double Scenario::MinPayload() const {
  double m = kInfinity;
  for (const WorkloadClass& k : classes_) m = std::min(m, k.payload_gb_per_mtok);
  return m;
}

Scenario Scenario::WithDemandScale(double scale) const {
  Scenario s = *this;
  s.demand_scale_ = scale;
  s.Validate();
  return s;
}

Scenario Scenario::WithLatencyBound(std::size_t cls, std::optional<double> ms) const {
  if (cls >= classes_.size()) Fail(ErrorCode::kInvalidValue, "class index out of range");
  Scenario s = *this;
  s.classes_[cls].latency_bound_ms = ms;
  s.Validate();
  return s;
}

Scenario Scenario::WithOpexAdder(double added_usd_per_mtok) const {
  if (!(added_usd_per_mtok >= 0.0)) {
    throw Error(ErrorCode::kPrecondition, "opex adder must be >= 0");
  }
  Scenario s = *this;
  for (Node& n : s.nodes_) n.opex_adder_usd_per_mtok += added_usd_per_mtok;
  s.Validate();
  return s;
}

Scenario Scenario::WithLinkCapacity(double gb_per_s) const {
  Scenario s = *this;
  for (Arc& a : s.arcs_) a.physical_capacity_gb_per_s = gb_per_s;
  s.Validate();
  return s;
}

Scenario Scenario::WithTransferTariff(double usd_per_gb) const {
  Scenario s = *this;
  for (Arc& a : s.arcs_) a.transfer_tariff_usd_per_gb = usd_per_gb;
  s.Validate();
  return s;
}

Eigen::MatrixXd IncidenceMatrix(const Scenario& scenario) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(scenario.num_nodes()),
      static_cast<Eigen::Index>(scenario.num_arcs()));
  for (std::size_t e = 0; e < scenario.num_arcs(); ++e) {
    const auto col = static_cast<Eigen::Index>(e);
    a(static_cast<Eigen::Index>(scenario.arc_tail(e)), col) = 1.0;
    a(static_cast<Eigen::Index>(scenario.arc_head(e)), col) = -1.0;
  }
  return a;
}

Eigen::MatrixXd MarginalCostMatrix(const Scenario& scenario) {
  Eigen::MatrixXd g(static_cast<Eigen::Index>(scenario.num_nodes()),
                    static_cast<Eigen::Index>(scenario.num_classes()));
  for (std::size_t j = 0; j < scenario.num_nodes(); ++j) {
    for (std::size_t k = 0; k < scenario.num_classes(); ++k) {
      g(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
          scenario.MarginalCost(j, k);
    }
  }
  return g;
}

}  // namespace tokenflow
