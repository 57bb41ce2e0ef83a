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

#include "tokenflow/scenario_file.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "tokenflow/error.h"

#ifndef TOKENFLOW_DEFAULT_DATA_DIR
#define TOKENFLOW_DEFAULT_DATA_DIR "data"
#endif

namespace tokenflow {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// A position inside the document, used to attach JSON paths to diagnostics.
class Cursor {
 public:
  Cursor(const json& value, std::string path, const std::string& source)
      : value_(value), path_(std::move(path)), source_(source) {}

  const json& value() const { return value_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void Fail(ErrorCode code, const std::string& message) const {
    throw Error(code, source_ + ": " + (path_.empty() ? "<root>" : path_) + ": " + message);
  }

  void ExpectObject() const {
    if (!value_.is_object()) Fail(ErrorCode::kTypeMismatch, "expected an object");
  }
  void ExpectArray() const {
    if (!value_.is_array()) Fail(ErrorCode::kTypeMismatch, "expected an array");
  }

  void AllowOnly(std::initializer_list<const char*> keys) const {
    ExpectObject();
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [key, unused] : value_.items()) {
      if (!allowed.contains(key)) Field(key).Fail(ErrorCode::kUnknownKey, "unknown key");
    }
  }

  bool Has(const std::string& key) const { return value_.contains(key); }

  Cursor Field(const std::string& key) const {
    return Cursor(value_.contains(key) ? value_.at(key) : Null(),
                  path_.empty() ? key : path_ + "." + key, source_);
  }

  Cursor Require(const std::string& key) const {
    ExpectObject();
    if (!value_.contains(key)) {
      Field(key).Fail(ErrorCode::kMissingField, "required key is missing");
    }
    return Field(key);
  }

  Cursor At(std::size_t i) const {
    return Cursor(value_.at(i), path_ + "[" + std::to_string(i) + "]", source_);
  }

  double Number() const {
    if (!value_.is_number()) Fail(ErrorCode::kTypeMismatch, "expected a number");
    const double v = value_.get<double>();
    if (!std::isfinite(v)) Fail(ErrorCode::kInvalidValue, "must be finite");
    return v;
  }

  double NonNegative(const char* what) const {
    const double v = Number();
    if (v < 0.0) Fail(ErrorCode::kInvalidValue, std::string(what) + " must be >= 0");
    return v;
  }

  double Positive(const char* what) const {
    const double v = Number();
    if (!(v > 0.0)) Fail(ErrorCode::kInvalidValue, std::string(what) + " must be > 0");
    return v;
  }

  double InRange(const char* what, double lo, double hi) const {
    const double v = Number();
    if (v < lo || v > hi) {
      Fail(ErrorCode::kInvalidValue, std::string(what) + " must lie in [" + Fmt(lo) + ", " +
                                         Fmt(hi) + "]");
    }
    return v;
  }

  std::string String() const {
    if (!value_.is_string()) Fail(ErrorCode::kTypeMismatch, "expected a string");
    return value_.get<std::string>();
  }

  int Integer() const {
    if (!value_.is_number_integer()) Fail(ErrorCode::kTypeMismatch, "expected an integer");
    return value_.get<int>();
  }

 private:
  static const json& Null() {
    static const json null_value;
    return null_value;
  }
  static std::string Fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
  }

  const json& value_;
  std::string path_;
  const std::string& source_;
};

std::vector<std::string> ClassIds(const std::vector<WorkloadClass>& classes) {
  std::vector<std::string> ids;
  for (const WorkloadClass& k : classes) ids.push_back(k.id);
  return ids;
}

// Object keyed by class id. With `complete`, every class must be present.
ClassValues ParseClassValues(const Cursor& c, const std::vector<std::string>& class_ids,
                             bool complete, const char* what, bool positive) {
  c.ExpectObject();
  const std::set<std::string> known(class_ids.begin(), class_ids.end());
  ClassValues out;
  for (const auto& [key, unused] : c.value().items()) {
    const Cursor v = c.Field(key);
    if (!known.contains(key)) v.Fail(ErrorCode::kUnknownKey, "unknown workload class");
    out[key] = positive ? v.Positive(what) : v.NonNegative(what);
  }
  if (complete) {
    for (const std::string& id : class_ids) {
      if (!out.contains(id)) c.Field(id).Fail(ErrorCode::kMissingField, "required key is missing");
    }
  }
  return out;
}

std::vector<double> Ordered(const ClassValues& values, const std::vector<std::string>& ids) {
  std::vector<double> out;
  for (const std::string& id : ids) out.push_back(values.at(id));
  return out;
}

WorkloadClass ParseClass(const Cursor& c) {
  c.AllowOnly({"id", "label", "energy_kwh_per_mtok", "payload_gb_per_mtok", "latency_bound_ms"});
  WorkloadClass k;
  k.id = c.Require("id").String();
  if (k.id.empty()) c.Field("id").Fail(ErrorCode::kInvalidValue, "id must not be empty");
  k.label = c.Has("label") ? c.Field("label").String() : k.id;
  k.energy_kwh_per_mtok = c.Require("energy_kwh_per_mtok").Positive("energy intensity");
  k.payload_gb_per_mtok = c.Require("payload_gb_per_mtok").Positive("payload");
  const Cursor lat = c.Require("latency_bound_ms");
  if (!lat.value().is_null()) k.latency_bound_ms = lat.Positive("latency bound");
  return k;
}

HubRegistryEntry ParseHub(const Cursor& c) {
  c.AllowOnly({"hub", "metro", "state", "latitude", "longitude", "facility_count", "est_power_mw",
               "elec_price_usd_per_kwh", "population_weight"});
  HubRegistryEntry e;
  e.hub = c.Require("hub").String();
  if (e.hub.empty()) c.Field("hub").Fail(ErrorCode::kInvalidValue, "hub must not be empty");
  e.metro = c.Has("metro") ? c.Field("metro").String() : e.hub;
  e.state = c.Has("state") ? c.Field("state").String() : "";
  e.latitude = c.Require("latitude").InRange("latitude", -90.0, 90.0);
  e.longitude = c.Require("longitude").InRange("longitude", -180.0, 180.0);
  if (c.Has("facility_count")) {
    e.facility_count = c.Field("facility_count").Integer();
    if (e.facility_count < 0) {
      c.Field("facility_count").Fail(ErrorCode::kInvalidValue, "facility count must be >= 0");
    }
  }
  e.est_power_mw = c.Require("est_power_mw").Positive("site power");
  e.elec_price_usd_per_kwh = c.Require("elec_price_usd_per_kwh").NonNegative("electricity price");
  e.population_weight = c.Require("population_weight").NonNegative("population weight");
  return e;
}

PipelineParams ParsePipeline(const Cursor& c, const std::vector<std::string>& ids) {
  c.AllowOnly({"throughput_tokens_per_s_per_mw", "max_arc_distance_km", "backbone_metros",
               "backbone_capacity_gbps", "default_capacity_gbps", "per_hop_overhead_ms",
               "fiber_speed_km_per_ms", "transfer_tariff_usd_per_gb", "base_demand_tokens_per_s",
               "demand_scale"});
  PipelineParams p;
  p.throughput_per_mw = Ordered(
      ParseClassValues(c.Require("throughput_tokens_per_s_per_mw"), ids, true, "throughput", true),
      ids);
  p.base_demand_rates = Ordered(
      ParseClassValues(c.Require("base_demand_tokens_per_s"), ids, true, "base demand", true), ids);
  p.max_arc_distance_km = c.Require("max_arc_distance_km").Positive("max arc distance");
  const Cursor backbone = c.Require("backbone_metros");
  backbone.ExpectArray();
  for (std::size_t i = 0; i < backbone.value().size(); ++i) {
    p.backbone_metros.insert(backbone.At(i).String());
  }
  p.backbone_capacity_gbps = c.Require("backbone_capacity_gbps").Positive("backbone capacity");
  p.default_capacity_gbps = c.Require("default_capacity_gbps").Positive("default capacity");
  p.per_hop_overhead_ms = c.Require("per_hop_overhead_ms").Positive("per-hop overhead");
  p.fiber_speed_km_per_ms = c.Require("fiber_speed_km_per_ms").Positive("fiber speed");
  p.transfer_tariff_usd_per_gb = c.Require("transfer_tariff_usd_per_gb").Positive("transfer tariff");
  p.demand_scale = c.Has("demand_scale") ? c.Field("demand_scale").Positive("demand scale") : 1.0;
  return p;
}

Arc ParseArc(const Cursor& c, const std::vector<std::string>& ids) {
  c.AllowOnly({"from", "to", "distance_km", "latency_ms", "physical_capacity_gb_per_s",
               "transfer_tariff_usd_per_gb", "routing_cost_usd_per_mtok", "overhead_factor"});
  Arc a;
  a.from = c.Require("from").String();
  a.to = c.Require("to").String();
  a.distance_km = c.Require("distance_km").NonNegative("distance");
  a.latency_ms = c.Require("latency_ms").Positive("latency");
  const Cursor cap = c.Require("physical_capacity_gb_per_s");
  if (cap.value().is_string()) {
    if (cap.String() != "inf") cap.Fail(ErrorCode::kInvalidValue, "capacity must be a number or \"inf\"");
    a.physical_capacity_gb_per_s = kInfinity;
  } else {
    a.physical_capacity_gb_per_s = cap.Positive("capacity");
  }
  a.transfer_tariff_usd_per_gb = c.Require("transfer_tariff_usd_per_gb").NonNegative("transfer tariff");
  if (c.Has("routing_cost_usd_per_mtok")) {
    const ClassValues rc =
        ParseClassValues(c.Field("routing_cost_usd_per_mtok"), ids, false, "routing cost", false);
    for (const std::string& id : ids) a.routing_cost_usd_per_mtok.push_back(rc.contains(id) ? rc.at(id) : 0.0);
  }
  if (c.Has("overhead_factor")) {
    a.overhead_factor = c.Field("overhead_factor").Number();
    if (a.overhead_factor < 1.0) {
      c.Field("overhead_factor").Fail(ErrorCode::kInvalidValue, "overhead factor must be >= 1");
    }
  }
  return a;
}

std::map<std::string, ClassValues> ParseHubClassTable(const Cursor& c,
                                                      const std::set<std::string>& hubs,
                                                      const std::vector<std::string>& ids,
                                                      const char* what) {
  c.ExpectObject();
  std::map<std::string, ClassValues> out;
  for (const auto& [hub, unused] : c.value().items()) {
    const Cursor h = c.Field(hub);
    if (!hubs.contains(hub)) h.Fail(ErrorCode::kStructural, "unknown hub");
    out[hub] = ParseClassValues(h, ids, false, what, false);
  }
  return out;
}

ScenarioOverrides ParseOverrides(const Cursor& c, const std::set<std::string>& hubs,
                                 const std::vector<std::string>& ids) {
  c.AllowOnly({"arcs", "demand_tokens_per_s", "capacity_tokens_per_s", "energy_kwh_per_mtok",
               "opex_adder_usd_per_mtok"});
  ScenarioOverrides o;
  if (c.Has("arcs")) {
    const Cursor arcs = c.Field("arcs");
    arcs.ExpectArray();
    std::vector<Arc> list;
    for (std::size_t i = 0; i < arcs.value().size(); ++i) {
      const Cursor ac = arcs.At(i);
      Arc a = ParseArc(ac, ids);
      if (!hubs.contains(a.from)) ac.Field("from").Fail(ErrorCode::kStructural, "unknown hub '" + a.from + "'");
      if (!hubs.contains(a.to)) ac.Field("to").Fail(ErrorCode::kStructural, "unknown hub '" + a.to + "'");
      list.push_back(std::move(a));
    }
    o.arcs = std::move(list);
  }
  if (c.Has("demand_tokens_per_s")) {
    o.demand_tokens_per_s = ParseHubClassTable(c.Field("demand_tokens_per_s"), hubs, ids, "demand");
  }
  if (c.Has("capacity_tokens_per_s")) {
    o.capacity_tokens_per_s =
        ParseHubClassTable(c.Field("capacity_tokens_per_s"), hubs, ids, "capacity");
  }
  if (c.Has("energy_kwh_per_mtok")) {
    const Cursor e = c.Field("energy_kwh_per_mtok");
    o.energy_kwh_per_mtok = ParseHubClassTable(e, hubs, ids, "energy intensity");
    for (const auto& [hub, values] : o.energy_kwh_per_mtok) {
      for (const auto& [cls, v] : values) {
        if (!(v > 0.0)) e.Field(hub).Field(cls).Fail(ErrorCode::kInvalidValue, "energy intensity must be > 0");
      }
    }
  }
  if (c.Has("opex_adder_usd_per_mtok")) {
    const Cursor op = c.Field("opex_adder_usd_per_mtok");
    op.ExpectObject();
    for (const auto& [hub, unused] : op.value().items()) {
      const Cursor h = op.Field(hub);
      if (!hubs.contains(hub)) h.Fail(ErrorCode::kStructural, "unknown hub");
      o.opex_adder_usd_per_mtok[hub] = h.NonNegative("opex adder");
    }
  }
  return o;
}

ExperimentConfig ParseExperiments(const Cursor& c, const std::vector<std::string>& ids) {
  c.AllowOnly({"sweep_scales", "latency_bounds_ms", "opex_adder_usd_per_mtok",
               "partial_penalty_usd_per_mtok"});
  ExperimentConfig e;
  if (c.Has("sweep_scales")) {
    const Cursor s = c.Field("sweep_scales");
    s.ExpectArray();
    for (std::size_t i = 0; i < s.value().size(); ++i) e.sweep_scales.push_back(s.At(i).Positive("scale"));
  }
  if (c.Has("latency_bounds_ms")) {
    e.latency_bounds_ms = ParseClassValues(c.Field("latency_bounds_ms"), ids, false, "latency bound", true);
  }
  if (c.Has("opex_adder_usd_per_mtok")) {
    e.opex_adder_usd_per_mtok = c.Field("opex_adder_usd_per_mtok").NonNegative("opex adder");
  }
  if (c.Has("partial_penalty_usd_per_mtok")) {
    e.partial_penalty_usd_per_mtok = c.Field("partial_penalty_usd_per_mtok").NonNegative("penalty");
  }
  return e;
}

ordered_json ClassValuesJson(const ClassValues& values) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : values) j[k] = v;
  return j;
}

ordered_json ClassVectorJson(const std::vector<double>& values,
                             const std::vector<std::string>& ids) {
  ClassValues m;
  for (std::size_t i = 0; i < ids.size() && i < values.size(); ++i) m[ids[i]] = values[i];
  return ClassValuesJson(m);
}

ordered_json HubTableJson(const std::map<std::string, ClassValues>& table) {
  ordered_json j = ordered_json::object();
  for (const auto& [hub, values] : table) j[hub] = ClassValuesJson(values);
  return j;
}

}  // namespace

ScenarioFile ParseScenarioText(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, source + ": " + e.what());
  }
  const Cursor root(doc, "", source);
  root.AllowOnly({"name", "notes", "classes", "registry", "pipeline", "overrides", "experiments"});
  ScenarioFile f;
  if (root.Has("name")) f.name = root.Field("name").String();
  if (root.Has("notes")) {
    const Cursor notes = root.Field("notes");
    notes.ExpectArray();
    for (std::size_t i = 0; i < notes.value().size(); ++i) f.notes.push_back(notes.At(i).String());
  }
  const Cursor classes = root.Require("classes");
  classes.ExpectArray();
  for (std::size_t i = 0; i < classes.value().size(); ++i) f.classes.push_back(ParseClass(classes.At(i)));
  if (f.classes.empty()) classes.Fail(ErrorCode::kInvalidValue, "at least one class is required");
  const std::vector<std::string> ids = ClassIds(f.classes);

  const Cursor registry = root.Require("registry");
  registry.ExpectArray();
  std::set<std::string> hubs;
  for (std::size_t i = 0; i < registry.value().size(); ++i) {
    f.registry.push_back(ParseHub(registry.At(i)));
    if (!hubs.insert(f.registry.back().hub).second) {
      registry.At(i).Field("hub").Fail(ErrorCode::kStructural, "duplicate hub id");
    }
  }
  if (f.registry.empty()) registry.Fail(ErrorCode::kInvalidValue, "registry is empty");

  const Cursor pipeline = root.Require("pipeline");
  f.pipeline = ParsePipeline(pipeline, ids);
  for (const std::string& metro : f.pipeline.backbone_metros) {
    if (!hubs.contains(metro)) {
      pipeline.Field("backbone_metros").Fail(ErrorCode::kStructural, "unknown hub '" + metro + "'");
    }
  }
  if (root.Has("overrides")) f.overrides = ParseOverrides(root.Field("overrides"), hubs, ids);
  if (root.Has("experiments")) f.experiments = ParseExperiments(root.Field("experiments"), ids);
  return f;
}

ScenarioFile ParseScenarioFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseScenarioText(ss.str(), path);
}

std::string SerializeScenarioFile(const ScenarioFile& f) {
  const std::vector<std::string> ids = ClassIds(f.classes);
  ordered_json root = ordered_json::object();
  root["name"] = f.name;
  if (!f.notes.empty()) root["notes"] = f.notes;
  ordered_json classes = ordered_json::array();
  for (const WorkloadClass& k : f.classes) {
    ordered_json c = ordered_json::object();
    c["id"] = k.id;
    c["label"] = k.label;
    c["energy_kwh_per_mtok"] = k.energy_kwh_per_mtok;
    c["payload_gb_per_mtok"] = k.payload_gb_per_mtok;
    c["latency_bound_ms"] = k.latency_bound_ms ? ordered_json(*k.latency_bound_ms) : ordered_json();
    classes.push_back(std::move(c));
  }
  root["classes"] = std::move(classes);
  ordered_json registry = ordered_json::array();
  for (const HubRegistryEntry& e : f.registry) {
    ordered_json h = ordered_json::object();
    h["hub"] = e.hub;
    h["metro"] = e.metro;
    h["state"] = e.state;
    h["latitude"] = e.latitude;
    h["longitude"] = e.longitude;
    h["facility_count"] = e.facility_count;
    h["est_power_mw"] = e.est_power_mw;
    h["elec_price_usd_per_kwh"] = e.elec_price_usd_per_kwh;
    h["population_weight"] = e.population_weight;
    registry.push_back(std::move(h));
  }
  root["registry"] = std::move(registry);
  const PipelineParams& p = f.pipeline;
  ordered_json pipe = ordered_json::object();
  pipe["throughput_tokens_per_s_per_mw"] = ClassVectorJson(p.throughput_per_mw, ids);
  pipe["max_arc_distance_km"] = p.max_arc_distance_km;
  pipe["backbone_metros"] = std::vector<std::string>(p.backbone_metros.begin(), p.backbone_metros.end());
  pipe["backbone_capacity_gbps"] = p.backbone_capacity_gbps;
  pipe["default_capacity_gbps"] = p.default_capacity_gbps;
  pipe["per_hop_overhead_ms"] = p.per_hop_overhead_ms;
  pipe["fiber_speed_km_per_ms"] = p.fiber_speed_km_per_ms;
  pipe["transfer_tariff_usd_per_gb"] = p.transfer_tariff_usd_per_gb;
  pipe["base_demand_tokens_per_s"] = ClassVectorJson(p.base_demand_rates, ids);
  pipe["demand_scale"] = p.demand_scale;
  root["pipeline"] = std::move(pipe);

  const ScenarioOverrides& o = f.overrides;
  ordered_json ov = ordered_json::object();
  if (o.arcs) {
    ordered_json arcs = ordered_json::array();
    for (const Arc& a : *o.arcs) {
      ordered_json j = ordered_json::object();
      j["from"] = a.from;
      j["to"] = a.to;
      j["distance_km"] = a.distance_km;
      j["latency_ms"] = a.latency_ms;
      j["physical_capacity_gb_per_s"] = std::isfinite(a.physical_capacity_gb_per_s)
                                            ? ordered_json(a.physical_capacity_gb_per_s)
                                            : ordered_json("inf");
      j["transfer_tariff_usd_per_gb"] = a.transfer_tariff_usd_per_gb;
      if (!a.routing_cost_usd_per_mtok.empty()) {
        j["routing_cost_usd_per_mtok"] = ClassVectorJson(a.routing_cost_usd_per_mtok, ids);
      }
      j["overhead_factor"] = a.overhead_factor;
      arcs.push_back(std::move(j));
    }
    ov["arcs"] = std::move(arcs);
  }
  if (!o.demand_tokens_per_s.empty()) ov["demand_tokens_per_s"] = HubTableJson(o.demand_tokens_per_s);
  if (!o.capacity_tokens_per_s.empty()) {
    ov["capacity_tokens_per_s"] = HubTableJson(o.capacity_tokens_per_s);
  }
  if (!o.energy_kwh_per_mtok.empty()) ov["energy_kwh_per_mtok"] = HubTableJson(o.energy_kwh_per_mtok);
  if (!o.opex_adder_usd_per_mtok.empty()) {
    ordered_json op = ordered_json::object();
    for (const auto& [hub, v] : o.opex_adder_usd_per_mtok) op[hub] = v;
    ov["opex_adder_usd_per_mtok"] = std::move(op);
  }
  if (!ov.empty()) root["overrides"] = std::move(ov);

  const ExperimentConfig& e = f.experiments;
  ordered_json ex = ordered_json::object();
  if (!e.sweep_scales.empty()) ex["sweep_scales"] = e.sweep_scales;
  if (!e.latency_bounds_ms.empty()) ex["latency_bounds_ms"] = ClassValuesJson(e.latency_bounds_ms);
  if (e.opex_adder_usd_per_mtok) ex["opex_adder_usd_per_mtok"] = *e.opex_adder_usd_per_mtok;
  if (e.partial_penalty_usd_per_mtok) {
    ex["partial_penalty_usd_per_mtok"] = *e.partial_penalty_usd_per_mtok;
  }
  if (!ex.empty()) root["experiments"] = std::move(ex);
  return root.dump(2) + "\n";
}

Scenario BuildScenario(const ScenarioFile& file, const std::string& source) {
  try {
    ValidateRegistry(file.registry, file.pipeline, file.classes.size());
    std::vector<Node> nodes = BuildNodes(file.registry, file.pipeline);
    std::vector<Arc> arcs =
        file.overrides.arcs ? *file.overrides.arcs : BuildArcs(file.registry, file.pipeline);
    PipelineParams unscaled = file.pipeline;
    unscaled.demand_scale = 1.0;
    Eigen::MatrixXd demand = GenerateDemand(file.registry, unscaled);

    std::map<std::string, std::size_t> node_index;
    for (std::size_t j = 0; j < file.registry.size(); ++j) node_index[file.registry[j].hub] = j;
    std::map<std::string, std::size_t> class_index;
    for (std::size_t k = 0; k < file.classes.size(); ++k) class_index[file.classes[k].id] = k;
    const ScenarioOverrides& o = file.overrides;
    for (const auto& [hub, values] : o.demand_tokens_per_s) {
      for (const auto& [cls, v] : values) {
        demand(static_cast<Eigen::Index>(node_index.at(hub)),
               static_cast<Eigen::Index>(class_index.at(cls))) = v;
      }
    }
    for (const auto& [hub, values] : o.capacity_tokens_per_s) {
      for (const auto& [cls, v] : values) nodes[node_index.at(hub)].capacity_tokens_per_s[class_index.at(cls)] = v;
    }
    for (const auto& [hub, values] : o.energy_kwh_per_mtok) {
      Node& n = nodes[node_index.at(hub)];
      n.energy_override_kwh_per_mtok.resize(file.classes.size());
      for (const auto& [cls, v] : values) n.energy_override_kwh_per_mtok[class_index.at(cls)] = v;
    }
    for (const auto& [hub, v] : o.opex_adder_usd_per_mtok) nodes[node_index.at(hub)].opex_adder_usd_per_mtok = v;
    return Scenario::Create(std::move(nodes), std::move(arcs), file.classes, std::move(demand),
                            file.pipeline.demand_scale);
  } catch (const Error& e) {
    throw Error(e.code(), source + ": " + e.what());
  }
}

std::string DataDirectory() {
  if (const char* env = std::getenv("TOKENFLOW_DATA_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return TOKENFLOW_DEFAULT_DATA_DIR;
}

std::string ResolveScenarioPath(const std::string& name_or_path) {
  namespace fs = std::filesystem;
  if (fs::is_regular_file(name_or_path)) return name_or_path;
  const fs::path candidate = fs::path(DataDirectory()) / (name_or_path + ".json");
  if (fs::is_regular_file(candidate)) return candidate.string();
  throw Error(ErrorCode::kIo, "scenario '" + name_or_path + "' not found (looked in " +
                                  DataDirectory() + ")");
}

}  // namespace tokenflow
