/* Copyright 2026 The TokenFlow Authors
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the tokenflow library.
 *
 * Handles are opaque and owned by the caller; free them with the matching
 * *_free function. Every fallible call returns a tf_status; on anything other
 * than TF_OK a message is available from tf_last_error() until the next call
 * on the same thread. Units follow the C++ API: tokens/s for quantities,
 * $/M tokens for prices, $/hr for costs.
 */

#ifndef TOKENFLOW_TOKENFLOW_H_
#define TOKENFLOW_TOKENFLOW_H_

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  TF_OK = 0,
  TF_INFEASIBLE = 1,
  TF_INPUT_ERROR = 2,
  TF_SOLVER_ERROR = 3,
  TF_INTERNAL_ERROR = 4
} tf_status;

typedef enum {
  TF_BASELINE = 0,
  TF_TRANSFER_AWARE = 1,
  TF_PARTIAL_SERVICE = 2
} tf_formulation;

typedef struct tf_scenario tf_scenario;
typedef struct tf_result tf_result;

typedef struct {
  int has_unmet_demand;
  /* 0: token units, 1: transfer units. */
  int network_convention;
  double user_payments_usd_per_hr;
  double compute_revenue_usd_per_hr;
  double network_revenue_usd_per_hr;
  double surplus_usd_per_hr;
} tf_ledger;

const char* tf_version(void);
const char* tf_status_name(tf_status status);
const char* tf_last_error(void);
tf_status tf_parse_formulation(const char* name, tf_formulation* out);

/* Scenarios. `name_or_path` is a file path or a bare name looked up in the
 * data directory. */
tf_status tf_scenario_load(const char* name_or_path, tf_scenario** out);
/* Parses and builds without keeping the result. */
tf_status tf_scenario_validate(const char* name_or_path);
void tf_scenario_free(tf_scenario* scenario);

const char* tf_scenario_name(const tf_scenario* scenario);
const char* tf_scenario_source(const tf_scenario* scenario);
size_t tf_scenario_num_nodes(const tf_scenario* scenario);
size_t tf_scenario_num_arcs(const tf_scenario* scenario);
size_t tf_scenario_num_classes(const tf_scenario* scenario);
/* NULL when out of range. */
const char* tf_scenario_node_id(const tf_scenario* scenario, size_t node);
const char* tf_scenario_class_id(const tf_scenario* scenario, size_t cls);
tf_status tf_scenario_find_class(const tf_scenario* scenario, const char* id, size_t* out);
double tf_scenario_demand_scale(const tf_scenario* scenario);

tf_status tf_scenario_set_demand_scale(tf_scenario* scenario, double scale);
/* A negative or infinite `ms` removes the bound. */
tf_status tf_scenario_set_latency_bound(tf_scenario* scenario, size_t cls, double ms);
tf_status tf_scenario_add_opex(tf_scenario* scenario, double usd_per_mtok);
tf_status tf_scenario_set_penalty(tf_scenario* scenario, double usd_per_mtok);

/* Clearing. On TF_INFEASIBLE the result handle is still produced and can be
 * written out; on errors *out is NULL. */
tf_status tf_clear(const tf_scenario* scenario, tf_formulation formulation, tf_result** out);
void tf_result_free(tf_result* result);

int tf_result_feasible(const tf_result* result);
double tf_result_total_cost(const tf_result* result);
double tf_result_kkt_max_violation(const tf_result* result);
/* NaN when out of range or infeasible. */
double tf_result_price(const tf_result* result, size_t node, size_t cls);
double tf_result_scarcity(const tf_result* result, size_t node, size_t cls);
double tf_result_dispatch(const tf_result* result, size_t node, size_t cls);
double tf_result_unmet(const tf_result* result, size_t node, size_t cls);
double tf_result_flow(const tf_result* result, size_t arc, size_t cls);
double tf_result_congestion(const tf_result* result, size_t arc);
tf_status tf_result_counts(const tf_result* result, size_t* scarce_pairs, size_t* congested_links,
                           size_t* saturated_links);

tf_status tf_result_settle(const tf_result* result, tf_ledger* out);
tf_status tf_result_write(const tf_result* result, const char* dir);
tf_status tf_result_write_settlement(const tf_result* result, const char* dir);

/* Experiments. Each writes its tables to `dir`.
 * Sweep: n_scales == 0 uses the scenario's configured scales, or the default
 * set. Infeasible scales become rows, not errors. */
tf_status tf_run_sweep(const tf_scenario* scenario, tf_formulation formulation,
                       const double* scales, size_t n_scales, const char* dir);
/* NaN uses the scenario's configured adder, or the default. */
tf_status tf_run_compare(const tf_scenario* scenario, double opex_adder_usd_per_mtok,
                         const char* dir);
/* n == 0 uses the scenario's configured bounds. Returns TF_INFEASIBLE, after
 * writing, when either clearing is infeasible. */
tf_status tf_run_latency(const tf_scenario* scenario, tf_formulation formulation,
                         const size_t* classes, const double* bounds_ms, size_t n,
                         const char* dir);

tf_status tf_write_metadata(const char* dir, const char* const* keys, const char* const* values,
                            size_t n);

#ifdef __cplusplus
}
#endif

#endif /* TOKENFLOW_TOKENFLOW_H_ */
