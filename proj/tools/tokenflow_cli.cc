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

// tokenflow: clears token-flow markets from scenario files and writes result
// bundles.
//
// Exit codes: 0 success, 1 infeasible must-serve clearing, 2 input error,
// 3 solver failure, 4 internal error.

#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tokenflow/tokenflow.h"

namespace {

constexpr int kExitUsage = 2;

struct ScenarioDeleter {
  void operator()(tf_scenario* s) const { tf_scenario_free(s); }
};
struct ResultDeleter {
  void operator()(tf_result* r) const { tf_result_free(r); }
};
using ScenarioPtr = std::unique_ptr<tf_scenario, ScenarioDeleter>;
using ResultPtr = std::unique_ptr<tf_result, ResultDeleter>;

struct Options {
  std::string scenario = "five_node";
  std::string formulation = "baseline";
  std::optional<double> scale;
  std::string out = "out";
  std::vector<double> scales;
  std::optional<double> chat_ms;
  std::optional<double> code_ms;
  std::optional<double> opex_adder;
  std::optional<double> penalty;
};

int Report(tf_status status) {
  if (status != TF_OK) {
    std::fprintf(stderr, "tokenflow: %s: %s\n", tf_status_name(status), tf_last_error());
  }
  return static_cast<int>(status);
}

int Metadata(const Options& o, const std::string& command, const tf_scenario* s) {
  const std::string scale = o.scale ? CLI::detail::to_string(*o.scale) : "";
  const char* keys[] = {"command", "scenario", "scenario_source", "formulation", "demand_scale"};
  const char* values[] = {command.c_str(), tf_scenario_name(s), tf_scenario_source(s),
                          o.formulation.c_str(), scale.c_str()};
  return Report(tf_write_metadata(o.out.c_str(), keys, values, 5));
}

// Loads the scenario and applies --scale and --penalty.
tf_status Load(const Options& o, ScenarioPtr* out) {
  tf_scenario* raw = nullptr;
  tf_status st = tf_scenario_load(o.scenario.c_str(), &raw);
  if (st != TF_OK) return st;
  out->reset(raw);
  if (o.scale && (st = tf_scenario_set_demand_scale(raw, *o.scale)) != TF_OK) return st;
  if (o.penalty && (st = tf_scenario_set_penalty(raw, *o.penalty)) != TF_OK) return st;
  return TF_OK;
}

tf_status Formulation(const Options& o, tf_formulation* f) {
  return tf_parse_formulation(o.formulation.c_str(), f);
}

void PrintSummary(const tf_scenario* s, const tf_result* r) {
  if (!tf_result_feasible(r)) {
    std::printf("%s at %gx: infeasible\n", tf_scenario_name(s), tf_scenario_demand_scale(s));
    return;
  }
  size_t scarce = 0, congested = 0, saturated = 0;
  tf_result_counts(r, &scarce, &congested, &saturated);
  std::printf("%s at %gx: cost %.2f usd/hr, %zu scarce pairs, %zu congested links, "
              "%zu saturated links\n",
              tf_scenario_name(s), tf_scenario_demand_scale(s), tf_result_total_cost(r), scarce,
              congested, saturated);
}

int RunClear(const Options& o, bool settle_only) {
  ScenarioPtr s;
  tf_formulation f;
  tf_status st = Formulation(o, &f);
  if (st == TF_OK) st = Load(o, &s);
  if (st != TF_OK) return Report(st);
  tf_result* raw = nullptr;
  st = tf_clear(s.get(), f, &raw);
  ResultPtr r(raw);
  if (st != TF_OK && st != TF_INFEASIBLE) return Report(st);
  const tf_status solve = st;
  if (settle_only) {
    if (solve == TF_OK) {
      if ((st = tf_result_write_settlement(r.get(), o.out.c_str())) != TF_OK) return Report(st);
      tf_ledger l;
      if ((st = tf_result_settle(r.get(), &l)) != TF_OK) return Report(st);
      std::printf("payments %.2f, compute %.2f, network %.2f, surplus %.6f usd/hr (%s)\n",
                  l.user_payments_usd_per_hr, l.compute_revenue_usd_per_hr,
                  l.network_revenue_usd_per_hr, l.surplus_usd_per_hr,
                  l.network_convention ? "transfer_units" : "token_units");
    }
  } else {
    if ((st = tf_result_write(r.get(), o.out.c_str())) != TF_OK) return Report(st);
  }
  if (int rc = Metadata(o, settle_only ? "settle" : "clear", s.get()); rc != 0) return rc;
  PrintSummary(s.get(), r.get());
  if (solve == TF_INFEASIBLE) {
    std::fprintf(stderr, "tokenflow: infeasible: demand exceeds what the network can serve\n");
  }
  return static_cast<int>(solve);
}

int RunSweep(const Options& o) {
  ScenarioPtr s;
  tf_formulation f;
  tf_status st = Formulation(o, &f);
  if (st == TF_OK) st = Load(o, &s);
  if (st == TF_OK) {
    st = tf_run_sweep(s.get(), f, o.scales.data(), o.scales.size(), o.out.c_str());
  }
  if (st != TF_OK) return Report(st);
  return Metadata(o, "sweep", s.get());
}

int RunCompare(const Options& o) {
  ScenarioPtr s;
  tf_status st = Load(o, &s);
  if (st == TF_OK) {
    const double adder = o.opex_adder.value_or(std::numeric_limits<double>::quiet_NaN());
    st = tf_run_compare(s.get(), adder, o.out.c_str());
  }
  if (st != TF_OK) return Report(st);
  return Metadata(o, "compare", s.get());
}

int RunLatency(const Options& o) {
  ScenarioPtr s;
  tf_formulation f;
  tf_status st = Formulation(o, &f);
  if (st == TF_OK) st = Load(o, &s);
  if (st != TF_OK) return Report(st);
  std::vector<size_t> classes;
  std::vector<double> bounds;
  for (const auto& [id, ms] : {std::pair{"chat", o.chat_ms}, std::pair{"code", o.code_ms}}) {
    if (!ms) continue;
    size_t k = 0;
    if ((st = tf_scenario_find_class(s.get(), id, &k)) != TF_OK) return Report(st);
    classes.push_back(k);
    bounds.push_back(*ms);
  }
  st = tf_run_latency(s.get(), f, classes.data(), bounds.data(), classes.size(), o.out.c_str());
  if (st != TF_OK && st != TF_INFEASIBLE) return Report(st);
  if (int rc = Metadata(o, "latency", s.get()); rc != 0) return rc;
  return Report(st);
}

int RunValidate(const Options& o) {
  const tf_status st = tf_scenario_validate(o.scenario.c_str());
  if (st == TF_OK) std::printf("%s: ok\n", o.scenario.c_str());
  return Report(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clears token-flow markets and writes result bundles.", "tokenflow"};
  app.set_version_flag("--version", std::string(tf_version()));
  app.require_subcommand(1);
  Options o;

  auto add_scenario = [&o](CLI::App* cmd) {
    cmd->add_option("--scenario", o.scenario, "Scenario file or shipped scenario name")
        ->capture_default_str();
  };
  auto add_formulation = [&o](CLI::App* cmd) {
    cmd->add_option("--formulation", o.formulation, "baseline | transfer | partial")
        ->capture_default_str();
  };
  auto add_scale = [&o](CLI::App* cmd) {
    cmd->add_option("--scale", o.scale, "Demand multiplier (defaults to the file's)");
  };
  auto add_out = [&o](CLI::App* cmd) {
    cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
  };
  auto add_penalty = [&o](CLI::App* cmd) {
    cmd->add_option("--penalty", o.penalty, "Value of lost service for partial, usd/M tokens");
  };

  CLI::App* clear = app.add_subcommand("clear", "Clear one scenario and write the result bundle");
  CLI::App* settle = app.add_subcommand("settle", "Clear one scenario and write its ledger");
  for (CLI::App* cmd : {clear, settle}) {
    add_scenario(cmd);
    add_formulation(cmd);
    add_scale(cmd);
    add_out(cmd);
    add_penalty(cmd);
  }

  CLI::App* sweep = app.add_subcommand("sweep", "Clear across demand multipliers");
  add_scenario(sweep);
  add_formulation(sweep);
  add_out(sweep);
  add_penalty(sweep);
  sweep->add_option("--scales", o.scales, "Comma-separated multipliers")->delimiter(',');

  CLI::App* compare = app.add_subcommand("compare", "Compare baseline, transfer-aware and opex adder");
  add_scenario(compare);
  add_scale(compare);
  add_out(compare);
  compare->add_option("--opex-adder", o.opex_adder, "Uniform opex adder, usd/M tokens");

  CLI::App* latency = app.add_subcommand("latency", "Tighten latency bounds and compare prices");
  add_scenario(latency);
  add_formulation(latency);
  add_scale(latency);
  add_out(latency);
  add_penalty(latency);
  latency->add_option("--chat-ms", o.chat_ms, "Chat latency bound, ms");
  latency->add_option("--code-ms", o.code_ms, "Code latency bound, ms");

  CLI::App* validate = app.add_subcommand("validate", "Parse and build a scenario file");
  add_scenario(validate);
  validate->add_option("path", o.scenario, "Scenario file (alternative to --scenario)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "tokenflow: %s\n\n%s", e.what(), app.help().c_str());
    return kExitUsage;
  }

  if (*clear) return RunClear(o, false);
  if (*settle) return RunClear(o, true);
  if (*sweep) return RunSweep(o);
  if (*compare) return RunCompare(o);
  if (*latency) return RunLatency(o);
  return RunValidate(o);
}
