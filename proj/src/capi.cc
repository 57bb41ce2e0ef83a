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

#include "tokenflow/tokenflow.h"

#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tokenflow/clearing.h"
#include "tokenflow/error.h"
#include "tokenflow/experiments.h"
#include "tokenflow/export.h"
#include "tokenflow/network_model.h"
#include "tokenflow/pricing.h"
#include "tokenflow/scenario_file.h"
#include "tokenflow/settlement.h"

#ifndef TOKENFLOW_VERSION
#define TOKENFLOW_VERSION "0.0.0"
#endif

struct tf_scenario {
  tokenflow::ScenarioFile file;
  std::string source;
  std::optional<tokenflow::Scenario> built;
  tokenflow::ClearingOptions options;
};

struct tf_result {
  tokenflow::ClearingResult result;
  std::string scenario_name;
};

namespace {

using tokenflow::Error;
using tokenflow::ErrorCode;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

thread_local std::string last_error;

tf_status Fail(tf_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

tf_status FromSolve(const tokenflow::ClearingResult& r) {
  switch (r.status) {
    case tokenflow::LpStatus::kOptimal:
      return TF_OK;
    case tokenflow::LpStatus::kInfeasible:
      return Fail(TF_INFEASIBLE, "clearing is infeasible: demand cannot be served");
    case tokenflow::LpStatus::kUnbounded:
      return Fail(TF_SOLVER_ERROR, "clearing program is unbounded");
    case tokenflow::LpStatus::kSolverError:
      break;
  }
  return Fail(TF_SOLVER_ERROR, "solver failure: " + r.solution.message);
}

// Runs `body`, translating exceptions to status codes.
template <typename F>
tf_status Guard(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const Error& e) {
    const tf_status s = e.code() == ErrorCode::kSolver ? TF_SOLVER_ERROR : TF_INPUT_ERROR;
    return Fail(s, e.what());
  } catch (const std::bad_alloc&) {
    return Fail(TF_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return Fail(TF_INTERNAL_ERROR, e.what());
  } catch (...) {
    return Fail(TF_INTERNAL_ERROR, "unknown error");
  }
}

tokenflow::Formulation ToFormulation(tf_formulation f) {
  switch (f) {
    case TF_BASELINE:
      return tokenflow::Formulation::kBaseline;
    case TF_TRANSFER_AWARE:
      return tokenflow::Formulation::kTransferAware;
    case TF_PARTIAL_SERVICE:
      return tokenflow::Formulation::kPartialService;
  }
  throw Error(ErrorCode::kInvalidValue, "unknown formulation");
}

void Require(const void* p, const char* what) {
  if (p == nullptr) throw Error(ErrorCode::kInvalidValue, std::string(what) + " is null");
}

double Cell(const tf_result* r, const Eigen::MatrixXd& m, size_t i, size_t j) {
  if (r == nullptr || !r->result.feasible) return kNaN;
  if (i >= static_cast<size_t>(m.rows()) || j >= static_cast<size_t>(m.cols())) return kNaN;
  return m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

std::unique_ptr<tf_scenario> Load(const char* name_or_path) {
  Require(name_or_path, "scenario name");
  auto h = std::make_unique<tf_scenario>();
  h->source = tokenflow::ResolveScenarioPath(name_or_path);
  h->file = tokenflow::ParseScenarioFile(h->source);
  h->built = tokenflow::BuildScenario(h->file, h->source);
  if (h->file.experiments.partial_penalty_usd_per_mtok) {
    h->options.penalty_usd_per_mtok = *h->file.experiments.partial_penalty_usd_per_mtok;
  }
  return h;
}

}  // namespace

extern "C" {

const char* tf_version(void) { return TOKENFLOW_VERSION; }

const char* tf_status_name(tf_status status) {
  switch (status) {
    case TF_OK:
      return "ok";
    case TF_INFEASIBLE:
      return "infeasible";
    case TF_INPUT_ERROR:
      return "input_error";
    case TF_SOLVER_ERROR:
      return "solver_error";
    case TF_INTERNAL_ERROR:
      return "internal_error";
  }
  return "unknown";
}

const char* tf_last_error(void) { return last_error.c_str(); }

tf_status tf_parse_formulation(const char* name, tf_formulation* out) {
  return Guard([&] {
    Require(name, "formulation name");
    Require(out, "output");
    switch (tokenflow::ParseFormulation(name)) {
      case tokenflow::Formulation::kBaseline:
        *out = TF_BASELINE;
        break;
      case tokenflow::Formulation::kTransferAware:
        *out = TF_TRANSFER_AWARE;
        break;
      case tokenflow::Formulation::kPartialService:
        *out = TF_PARTIAL_SERVICE;
        break;
    }
    return TF_OK;
  });
}

tf_status tf_scenario_load(const char* name_or_path, tf_scenario** out) {
  if (out != nullptr) *out = nullptr;
  return Guard([&] {
    Require(out, "output");
    *out = Load(name_or_path).release();
    return TF_OK;
  });
}

tf_status tf_scenario_validate(const char* name_or_path) {
  return Guard([&] {
    Load(name_or_path);
    return TF_OK;
  });
}

void tf_scenario_free(tf_scenario* scenario) { delete scenario; }

const char* tf_scenario_name(const tf_scenario* s) { return s ? s->file.name.c_str() : nullptr; }

const char* tf_scenario_source(const tf_scenario* s) { return s ? s->source.c_str() : nullptr; }

size_t tf_scenario_num_nodes(const tf_scenario* s) { return s ? s->built->num_nodes() : 0; }

size_t tf_scenario_num_arcs(const tf_scenario* s) { return s ? s->built->num_arcs() : 0; }

size_t tf_scenario_num_classes(const tf_scenario* s) { return s ? s->built->num_classes() : 0; }

const char* tf_scenario_node_id(const tf_scenario* s, size_t node) {
  if (s == nullptr || node >= s->built->num_nodes()) return nullptr;
  return s->built->nodes()[node].id.c_str();
}

const char* tf_scenario_class_id(const tf_scenario* s, size_t cls) {
  if (s == nullptr || cls >= s->built->num_classes()) return nullptr;
  return s->built->classes()[cls].id.c_str();
}

tf_status tf_scenario_find_class(const tf_scenario* s, const char* id, size_t* out) {
  return Guard([&] {
    Require(s, "scenario");
    Require(id, "class id");
    Require(out, "output");
    const std::optional<size_t> k = s->built->FindClass(id);
    if (!k) throw Error(ErrorCode::kInvalidValue, std::string("unknown class '") + id + "'");
    *out = *k;
    return TF_OK;
  });
}

double tf_scenario_demand_scale(const tf_scenario* s) {
  return s ? s->built->demand_scale() : kNaN;
}

tf_status tf_scenario_set_demand_scale(tf_scenario* s, double scale) {
  return Guard([&] {
    Require(s, "scenario");
    s->built = s->built->WithDemandScale(scale);
    return TF_OK;
  });
}

tf_status tf_scenario_set_latency_bound(tf_scenario* s, size_t cls, double ms) {
  return Guard([&] {
    Require(s, "scenario");
    std::optional<double> bound;
    if (std::isnan(ms)) throw Error(ErrorCode::kInvalidValue, "latency bound is NaN");
    if (ms >= 0.0 && std::isfinite(ms)) bound = ms;
    s->built = s->built->WithLatencyBound(cls, bound);
    return TF_OK;
  });
}

tf_status tf_scenario_add_opex(tf_scenario* s, double usd_per_mtok) {
  return Guard([&] {
    Require(s, "scenario");
    s->built = tokenflow::ApplyOpexAdder(*s->built, usd_per_mtok);
    return TF_OK;
  });
}

tf_status tf_scenario_set_penalty(tf_scenario* s, double usd_per_mtok) {
  return Guard([&] {
    Require(s, "scenario");
    if (!(usd_per_mtok >= 0.0) || !std::isfinite(usd_per_mtok)) {
      throw Error(ErrorCode::kInvalidValue, "penalty must be finite and >= 0");
    }
    s->options.penalty_usd_per_mtok = usd_per_mtok;
    return TF_OK;
  });
}

tf_status tf_clear(const tf_scenario* s, tf_formulation formulation, tf_result** out) {
  if (out != nullptr) *out = nullptr;
  return Guard([&] {
    Require(s, "scenario");
    Require(out, "output");
    auto r = std::make_unique<tf_result>();
    r->result = tokenflow::Clear(*s->built, ToFormulation(formulation), s->options);
    r->scenario_name = s->file.name;
    const tf_status status = FromSolve(r->result);
    if (status == TF_OK || status == TF_INFEASIBLE) *out = r.release();
    return status;
  });
}

void tf_result_free(tf_result* result) { delete result; }

int tf_result_feasible(const tf_result* r) { return r != nullptr && r->result.feasible ? 1 : 0; }

double tf_result_total_cost(const tf_result* r) {
  return r != nullptr && r->result.feasible ? r->result.total_cost_usd_per_hr : kNaN;
}

double tf_result_kkt_max_violation(const tf_result* r) {
  return r != nullptr && r->result.feasible ? r->result.kkt.MaxViolation() : kNaN;
}

double tf_result_price(const tf_result* r, size_t node, size_t cls) {
  return r ? Cell(r, r->result.prices, node, cls) : kNaN;
}

double tf_result_scarcity(const tf_result* r, size_t node, size_t cls) {
  return r ? Cell(r, r->result.scarcity, node, cls) : kNaN;
}

double tf_result_dispatch(const tf_result* r, size_t node, size_t cls) {
  return r ? Cell(r, r->result.dispatch, node, cls) : kNaN;
}

double tf_result_unmet(const tf_result* r, size_t node, size_t cls) {
  return r ? Cell(r, r->result.unmet, node, cls) : kNaN;
}

double tf_result_flow(const tf_result* r, size_t arc, size_t cls) {
  return r ? Cell(r, r->result.flows, arc, cls) : kNaN;
}

double tf_result_congestion(const tf_result* r, size_t arc) {
  if (r == nullptr || !r->result.feasible) return kNaN;
  if (arc >= static_cast<size_t>(r->result.congestion.size())) return kNaN;
  return r->result.congestion(static_cast<Eigen::Index>(arc));
}

tf_status tf_result_counts(const tf_result* r, size_t* scarce_pairs, size_t* congested_links,
                           size_t* saturated_links) {
  return Guard([&] {
    Require(r, "result");
    if (!r->result.feasible) return Fail(TF_INFEASIBLE, "result is infeasible");
    const tokenflow::ScarcityReport rep = tokenflow::BuildScarcityReport(r->result);
    if (scarce_pairs) *scarce_pairs = rep.scarce_pairs.size();
    if (congested_links) *congested_links = rep.congested_arcs.size();
    if (saturated_links) *saturated_links = rep.saturated_arcs.size();
    return TF_OK;
  });
}

tf_status tf_result_settle(const tf_result* r, tf_ledger* out) {
  return Guard([&] {
    Require(r, "result");
    Require(out, "output");
    if (!r->result.feasible) return Fail(TF_INFEASIBLE, "cannot settle an infeasible clearing");
    const tokenflow::SettlementLedger l = tokenflow::Settle(r->result);
    out->has_unmet_demand = l.has_unmet_demand ? 1 : 0;
    out->network_convention = l.convention == tokenflow::NetworkConvention::kTransferUnits ? 1 : 0;
    out->user_payments_usd_per_hr = l.user_payments;
    out->compute_revenue_usd_per_hr = l.compute_revenue;
    out->network_revenue_usd_per_hr = l.network_revenue;
    out->surplus_usd_per_hr = l.surplus;
    return TF_OK;
  });
}

tf_status tf_result_write(const tf_result* r, const char* dir) {
  return Guard([&] {
    Require(r, "result");
    Require(dir, "output directory");
    tokenflow::WriteClearingBundle(r->result, dir, r->scenario_name);
    return TF_OK;
  });
}

tf_status tf_result_write_settlement(const tf_result* r, const char* dir) {
  return Guard([&] {
    Require(r, "result");
    Require(dir, "output directory");
    if (!r->result.feasible) return Fail(TF_INFEASIBLE, "cannot settle an infeasible clearing");
    tokenflow::WriteSettlement(tokenflow::Settle(r->result), r->result, dir);
    return TF_OK;
  });
}

tf_status tf_run_sweep(const tf_scenario* s, tf_formulation formulation, const double* scales,
                       size_t n_scales, const char* dir) {
  return Guard([&] {
    Require(s, "scenario");
    Require(dir, "output directory");
    std::vector<double> list;
    if (n_scales > 0) {
      Require(scales, "scales");
      list.assign(scales, scales + n_scales);
    } else if (!s->file.experiments.sweep_scales.empty()) {
      list = s->file.experiments.sweep_scales;
    } else {
      list = tokenflow::DefaultSweepScales();
    }
    tokenflow::WriteSweep(
        tokenflow::DemandSweep(*s->built, list, ToFormulation(formulation), s->options), dir);
    return TF_OK;
  });
}

tf_status tf_run_compare(const tf_scenario* s, double opex_adder_usd_per_mtok, const char* dir) {
  return Guard([&] {
    Require(s, "scenario");
    Require(dir, "output directory");
    double adder = opex_adder_usd_per_mtok;
    if (std::isnan(adder)) {
      adder = s->file.experiments.opex_adder_usd_per_mtok.value_or(
          tokenflow::kDefaultOpexAdderUsdPerMtok);
    }
    tokenflow::WriteComparison(tokenflow::CompareFormulations(*s->built, adder, s->options), dir);
    return TF_OK;
  });
}

tf_status tf_run_latency(const tf_scenario* s, tf_formulation formulation, const size_t* classes,
                         const double* bounds_ms, size_t n, const char* dir) {
  return Guard([&] {
    Require(s, "scenario");
    Require(dir, "output directory");
    std::vector<std::pair<size_t, double>> bounds;
    if (n > 0) {
      Require(classes, "classes");
      Require(bounds_ms, "bounds");
      for (size_t i = 0; i < n; ++i) bounds.emplace_back(classes[i], bounds_ms[i]);
    } else {
      for (const auto& [id, ms] : s->file.experiments.latency_bounds_ms) {
        const std::optional<size_t> k = s->built->FindClass(id);
        if (!k) throw Error(ErrorCode::kStructural, "latency bound names unknown class '" + id + "'");
        bounds.emplace_back(*k, ms);
      }
      if (bounds.empty()) {
        throw Error(ErrorCode::kMissingField, "no latency bounds given or configured");
      }
    }
    const tokenflow::LatencyExperimentResult res =
        tokenflow::LatencyExperiment(*s->built, bounds, ToFormulation(formulation), s->options);
    tokenflow::WriteLatency(res, dir);
    if (!res.before.feasible) return FromSolve(res.before);
    if (!res.after.feasible) return FromSolve(res.after);
    return TF_OK;
  });
}

tf_status tf_write_metadata(const char* dir, const char* const* keys, const char* const* values,
                            size_t n) {
  return Guard([&] {
    Require(dir, "output directory");
    std::map<std::string, std::string> fields;
    for (size_t i = 0; i < n; ++i) {
      Require(keys[i], "metadata key");
      fields[keys[i]] = values[i] ? values[i] : "";
    }
    tokenflow::WriteMetadata(dir, fields);
    return TF_OK;
  });
}

}  // extern "C"
