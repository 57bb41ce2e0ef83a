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

#include "tokenflow/clearing.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "tokenflow/error.h"

namespace tokenflow {

std::string_view FormulationName(Formulation formulation) {
  switch (formulation) {
    case Formulation::kBaseline:
      return "baseline";
    case Formulation::kTransferAware:
      return "transfer-aware";
    case Formulation::kPartialService:
      return "partial-service";
  }
  return "unknown";
}

Formulation ParseFormulation(std::string_view name) {
  if (name == "baseline") return Formulation::kBaseline;
  if (name == "transfer" || name == "transfer-aware") return Formulation::kTransferAware;
  if (name == "partial" || name == "partial-service") return Formulation::kPartialService;
  throw Error(ErrorCode::kInvalidValue, "unknown formulation '" + std::string(name) + "'");
}

bool ClearingResult::ArcAllowed(std::size_t arc, std::size_t cls) const {
  const auto& arcs = allowed_arcs[cls];
  return std::binary_search(arcs.begin(), arcs.end(), arc);
}

double ClearingResult::PhysicalUsage(std::size_t arc) const {
  if (flows.size() == 0) return 0.0;
  const auto a = static_cast<Eigen::Index>(arc);
  return flows.row(a).dot(transfer_intensity.row(a)) / kTokensPerMillion;
}

std::vector<std::size_t> LatencyFilter(const Scenario& scenario, std::size_t cls) {
  const std::optional<double> bound = scenario.classes()[cls].latency_bound_ms;
  std::vector<std::size_t> arcs;
  for (std::size_t a = 0; a < scenario.num_arcs(); ++a) {
    if (!bound || scenario.arcs()[a].latency_ms <= *bound) arcs.push_back(a);
  }
  return arcs;
}

Scenario ApplyOpexAdder(const Scenario& scenario, double adder_usd_per_mtok) {
  return scenario.WithOpexAdder(adder_usd_per_mtok);
}

namespace {

using Index = Eigen::Index;

std::string ArcLabel(const Arc& arc) { return arc.from + "->" + arc.to; }

// Variables and rows are laid out class-major so that a scenario always maps
// to the same program.
ClearingResult Build(const Scenario& scenario, Formulation formulation,
                     const Eigen::MatrixXd* penalties, const ClearingOptions& options) {
  const std::size_t n = scenario.num_nodes();
  const std::size_t m = scenario.num_arcs();
  const std::size_t kk = scenario.num_classes();
  const bool transfer = formulation == Formulation::kTransferAware;
  const bool partial = formulation == Formulation::kPartialService;

  ClearingResult r;
  r.scenario = std::make_shared<const Scenario>(scenario);
  r.formulation = formulation;
  r.routing_cost.resize(static_cast<Index>(m), static_cast<Index>(kk));
  r.transfer_intensity.resize(static_cast<Index>(m), static_cast<Index>(kk));
  for (std::size_t a = 0; a < m; ++a) {
    const Arc& arc = scenario.arcs()[a];
    for (std::size_t k = 0; k < kk; ++k) {
      const double gamma = scenario.TransferIntensity(a, k);
      r.transfer_intensity(static_cast<Index>(a), static_cast<Index>(k)) = gamma;
      double c = scenario.RouteCost(a, k);
      if (!transfer) c += arc.transfer_tariff_usd_per_gb * scenario.classes()[k].payload_gb_per_mtok;
      r.routing_cost(static_cast<Index>(a), static_cast<Index>(k)) = c;
    }
  }
  for (std::size_t k = 0; k < kk; ++k) r.allowed_arcs.push_back(LatencyFilter(scenario, k));
  if (partial) r.penalties = *penalties;

  const Eigen::MatrixXd demand = scenario.demand() / kTokensPerMillion;
  const Eigen::MatrixXd g = MarginalCostMatrix(scenario);
  const double min_payload = scenario.MinPayload();

  LpBuilder b;
  std::vector<std::vector<std::size_t>> flow_var(kk);
  std::vector<std::size_t> dispatch_var(n * kk);
  std::vector<std::size_t> unmet_var(partial ? n * kk : 0);
  for (std::size_t k = 0; k < kk; ++k) {
    const std::string& cid = scenario.classes()[k].id;
    for (std::size_t a : r.allowed_arcs[k]) {
      double cost = r.routing_cost(static_cast<Index>(a), static_cast<Index>(k));
      if (transfer) {
        cost += scenario.arcs()[a].transfer_tariff_usd_per_gb *
                r.transfer_intensity(static_cast<Index>(a), static_cast<Index>(k));
      }
      flow_var[k].push_back(b.AddVariable(cost, "f[" + cid + "][" + ArcLabel(scenario.arcs()[a]) + "]"));
    }
  }
  for (std::size_t k = 0; k < kk; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      dispatch_var[k * n + j] =
          b.AddVariable(g(static_cast<Index>(j), static_cast<Index>(k)),
                        "x[" + scenario.nodes()[j].id + "][" + scenario.classes()[k].id + "]");
    }
  }
  if (partial) {
    for (std::size_t k = 0; k < kk; ++k) {
      for (std::size_t j = 0; j < n; ++j) {
        unmet_var[k * n + j] =
            b.AddVariable((*penalties)(static_cast<Index>(j), static_cast<Index>(k)),
                          "y[" + scenario.nodes()[j].id + "][" + scenario.classes()[k].id + "]");
      }
    }
  }

  // Balance rows: A f_k + x_k (+ y_k) = d_k.
  for (std::size_t k = 0; k < kk; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t row =
          b.AddEqRow(demand(static_cast<Index>(j), static_cast<Index>(k)),
                     "balance[" + scenario.nodes()[j].id + "][" + scenario.classes()[k].id + "]");
      b.SetEq(row, dispatch_var[k * n + j], 1.0);
      if (partial) b.SetEq(row, unmet_var[k * n + j], 1.0);
    }
    for (std::size_t i = 0; i < r.allowed_arcs[k].size(); ++i) {
      const std::size_t a = r.allowed_arcs[k][i];
      b.SetEq(k * n + scenario.arc_tail(a), flow_var[k][i], 1.0);
      b.SetEq(k * n + scenario.arc_head(a), flow_var[k][i], -1.0);
    }
  }
  // Compute capacity rows.
  for (std::size_t k = 0; k < kk; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t row = b.AddUbRow(
          scenario.nodes()[j].capacity_tokens_per_s[k] / kTokensPerMillion,
          "capacity[" + scenario.nodes()[j].id + "][" + scenario.classes()[k].id + "]");
      b.SetUb(row, dispatch_var[k * n + j], 1.0);
    }
  }
  // Shared link rows, omitted for unlimited links and for arcs no class may
  // use.
  r.link_capacity.resize(static_cast<Index>(m));
  std::vector<long> link_row(m, -1);
  for (std::size_t a = 0; a < m; ++a) {
    const double w = scenario.arcs()[a].physical_capacity_gb_per_s;
    // Token-equivalent capacity is kept in M tokens/s inside the program.
    r.link_capacity(static_cast<Index>(a)) =
        transfer ? w : w / min_payload * kTokensPerMillion;
    if (!std::isfinite(w)) continue;
    bool used = false;
    for (std::size_t k = 0; k < kk; ++k) used = used || r.ArcAllowed(a, k);
    if (!used) continue;
    const std::size_t row =
        b.AddUbRow(transfer ? w : w / min_payload, "link[" + ArcLabel(scenario.arcs()[a]) + "]");
    link_row[a] = static_cast<long>(row);
    for (std::size_t k = 0; k < kk; ++k) {
      for (std::size_t i = 0; i < r.allowed_arcs[k].size(); ++i) {
        if (r.allowed_arcs[k][i] != a) continue;
        const double coef =
            transfer ? r.transfer_intensity(static_cast<Index>(a), static_cast<Index>(k)) : 1.0;
        b.SetUb(row, flow_var[k][i], coef);
      }
    }
  }

  r.lp = b.Build();
  r.solution = Solve(r.lp, options.lp);
  r.status = r.solution.status;
  r.feasible = r.solution.optimal();
  if (!r.feasible) return r;
  r.kkt = VerifyKkt(r.lp, r.solution);

  const auto& x = r.solution.primal;
  r.flows = Eigen::MatrixXd::Zero(static_cast<Index>(m), static_cast<Index>(kk));
  r.dispatch.resize(static_cast<Index>(n), static_cast<Index>(kk));
  r.unmet = Eigen::MatrixXd::Zero(static_cast<Index>(n), static_cast<Index>(kk));
  r.prices.resize(static_cast<Index>(n), static_cast<Index>(kk));
  r.scarcity.resize(static_cast<Index>(n), static_cast<Index>(kk));
  r.congestion = Eigen::VectorXd::Zero(static_cast<Index>(m));
  r.link_usage = Eigen::VectorXd::Zero(static_cast<Index>(m));
  for (std::size_t k = 0; k < kk; ++k) {
    for (std::size_t i = 0; i < r.allowed_arcs[k].size(); ++i) {
      r.flows(static_cast<Index>(r.allowed_arcs[k][i]), static_cast<Index>(k)) =
          x[flow_var[k][i]] * kTokensPerMillion;
    }
    for (std::size_t j = 0; j < n; ++j) {
      const auto jj = static_cast<Index>(j);
      const auto kc = static_cast<Index>(k);
      r.dispatch(jj, kc) = x[dispatch_var[k * n + j]] * kTokensPerMillion;
      if (partial) r.unmet(jj, kc) = x[unmet_var[k * n + j]] * kTokensPerMillion;
      r.prices(jj, kc) = r.solution.eq_duals[k * n + j];
      r.scarcity(jj, kc) = r.solution.ub_duals[k * n + j];
    }
  }
  for (std::size_t a = 0; a < m; ++a) {
    const auto ai = static_cast<Index>(a);
    if (link_row[a] >= 0) r.congestion(ai) = r.solution.ub_duals[static_cast<std::size_t>(link_row[a])];
    r.link_usage(ai) = transfer ? r.PhysicalUsage(a) : r.flows.row(ai).sum();
  }
  r.total_cost_usd_per_hr = r.solution.objective * kSecondsPerHour;
  return r;
}

}  // namespace

ClearingResult ClearBaseline(const Scenario& scenario, const ClearingOptions& options) {
  return Build(scenario, Formulation::kBaseline, nullptr, options);
}

ClearingResult ClearTransferAware(const Scenario& scenario, const ClearingOptions& options) {
  return Build(scenario, Formulation::kTransferAware, nullptr, options);
}

ClearingResult ClearPartialService(const Scenario& scenario, const Eigen::MatrixXd& penalties,
                                   const ClearingOptions& options) {
  if (penalties.rows() != static_cast<Index>(scenario.num_nodes()) ||
      penalties.cols() != static_cast<Index>(scenario.num_classes())) {
    throw Error(ErrorCode::kStructural, "penalty matrix must be node x class");
  }
  if (!penalties.allFinite() || (penalties.size() > 0 && penalties.minCoeff() < 0.0)) {
    throw Error(ErrorCode::kInvalidValue, "penalties must be finite and >= 0");
  }
  return Build(scenario, Formulation::kPartialService, &penalties, options);
}

ClearingResult Clear(const Scenario& scenario, Formulation formulation,
                     const ClearingOptions& options) {
  switch (formulation) {
    case Formulation::kBaseline:
      return ClearBaseline(scenario, options);
    case Formulation::kTransferAware:
      return ClearTransferAware(scenario, options);
    case Formulation::kPartialService:
      return ClearPartialService(
          scenario,
          Eigen::MatrixXd::Constant(static_cast<Index>(scenario.num_nodes()),
                                    static_cast<Index>(scenario.num_classes()),
                                    options.penalty_usd_per_mtok),
          options);
  }
  throw Error(ErrorCode::kPrecondition, "unknown formulation");
}

}  // namespace tokenflow
