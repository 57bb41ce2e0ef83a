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

#include "tokenflow/pricing.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "tokenflow/error.h"

namespace tokenflow {
namespace {

using Index = Eigen::Index;

void RequireFeasible(const ClearingResult& result) {
  if (!result.feasible) {
    throw Error(ErrorCode::kPrecondition, "clearing has no optimal solution");
  }
}

std::string PairLabel(const ClearingResult& result, std::size_t node, std::size_t cls) {
  return result.scenario->nodes()[node].id + "/" + result.scenario->classes()[cls].id;
}

PriceDecomposition Local(const ClearingResult& result, std::size_t node, std::size_t cls) {
  PriceDecomposition d;
  d.node = node;
  d.cls = cls;
  d.lmp = result.prices(static_cast<Index>(node), static_cast<Index>(cls));
  d.serving_node = node;
  return d;
}

void FillServing(const ClearingResult& result, PriceDecomposition& d, std::size_t s) {
  const Scenario& sc = *result.scenario;
  d.serving_node = s;
  d.energy = sc.EnergyCost(s, d.cls);
  d.opex = sc.nodes()[s].opex_adder_usd_per_mtok;
  d.scarcity = result.scarcity(static_cast<Index>(s), static_cast<Index>(d.cls));
}

}  // namespace

double PriceDecomposition::RoutingTotal() const {
  double total = 0.0;
  for (const PathTerm& t : path) total += t.routing;
  return total;
}

double PriceDecomposition::CongestionTotal() const {
  double total = 0.0;
  for (const PathTerm& t : path) total += t.congestion;
  return total;
}

double PriceDecomposition::Residual() const {
  if (unserved) return lmp - penalty;
  return lmp - (energy + opex + scarcity + RoutingTotal() + CongestionTotal());
}

PriceDecomposition DecomposeLocal(const ClearingResult& result, std::size_t node,
                                  std::size_t cls) {
  RequireFeasible(result);
  if (result.dispatch(static_cast<Index>(node), static_cast<Index>(cls)) <=
      kActivityTolTokensPerS) {
    throw Error(ErrorCode::kPrecondition,
                PairLabel(result, node, cls) +
                    " is not processed locally; use the path decomposition");
  }
  PriceDecomposition d = Local(result, node, cls);
  FillServing(result, d, node);
  return d;
}

std::pair<double, double> ArcPriceTerms(const ClearingResult& result, std::size_t arc,
                                        std::size_t cls) {
  const auto a = static_cast<Index>(arc);
  const double c = result.routing_cost(a, static_cast<Index>(cls));
  const double eta = result.congestion(a);
  if (result.formulation == Formulation::kTransferAware) {
    const double gamma = result.transfer_intensity(a, static_cast<Index>(cls));
    const double w = result.scenario->arcs()[arc].transfer_tariff_usd_per_gb;
    return {c + gamma * w, gamma * eta};
  }
  return {c, eta};
}

PriceDecomposition DecomposePath(const ClearingResult& result, std::size_t origin,
                                 std::size_t cls) {
  RequireFeasible(result);
  const Scenario& s = *result.scenario;
  const auto k = static_cast<Index>(cls);
  PriceDecomposition d = Local(result, origin, cls);
  std::vector<bool> visited(s.num_nodes(), false);
  std::size_t at = origin;
  while (true) {
    visited[at] = true;
    if (result.dispatch(static_cast<Index>(at), k) > kActivityTolTokensPerS) {
      FillServing(result, d, at);
      return d;
    }
    if (at == origin && result.unmet.size() > 0 &&
        result.unmet(static_cast<Index>(at), k) > kActivityTolTokensPerS) {
      d.unserved = true;
      d.penalty = result.penalties(static_cast<Index>(at), k);
      d.serving_node = at;
      return d;
    }
    std::size_t next_arc = s.num_arcs();
    double best = kActivityTolTokensPerS;
    for (std::size_t a = 0; a < s.num_arcs(); ++a) {
      if (s.arc_tail(a) != at || visited[s.arc_head(a)]) continue;
      const double f = result.flows(static_cast<Index>(a), k);
      if (f > best) {
        best = f;
        next_arc = a;
      }
    }
    if (next_arc == s.num_arcs()) {
      throw Error(ErrorCode::kPrecondition,
                  PairLabel(result, origin, cls) + " has no active service path");
    }
    const auto [routing, congestion] = ArcPriceTerms(result, next_arc, cls);
    d.path.push_back({next_arc, routing, congestion});
    at = s.arc_head(next_arc);
  }
}

std::string_view ArcActivityName(ArcActivity activity) {
  switch (activity) {
    case ArcActivity::kActive:
      return "active";
    case ArcActivity::kInactive:
      return "inactive";
    case ArcActivity::kFiltered:
      return "filtered";
  }
  return "unknown";
}

ArcIdentity ArcPriceIdentity(const ClearingResult& result, std::size_t arc, std::size_t cls) {
  RequireFeasible(result);
  ArcIdentity id;
  if (!result.ArcAllowed(arc, cls)) {
    id.activity = ArcActivity::kFiltered;
    return id;
  }
  const Scenario& s = *result.scenario;
  const auto k = static_cast<Index>(cls);
  const auto [routing, congestion] = ArcPriceTerms(result, arc, cls);
  id.residual = result.prices(static_cast<Index>(s.arc_tail(arc)), k) -
                result.prices(static_cast<Index>(s.arc_head(arc)), k) - routing - congestion;
  id.activity = result.flows(static_cast<Index>(arc), k) > kActivityTolTokensPerS
                    ? ArcActivity::kActive
                    : ArcActivity::kInactive;
  return id;
}

ScarcityReport BuildScarcityReport(const ClearingResult& result, double tol) {
  RequireFeasible(result);
  const Scenario& s = *result.scenario;
  ScarcityReport r;
  r.tol = tol;
  const auto n = static_cast<Index>(s.num_nodes());
  const auto kk = static_cast<Index>(s.num_classes());
  r.utilization = Eigen::MatrixXd::Zero(n, kk);
  for (Index k = 0; k < kk; ++k) {
    for (Index j = 0; j < n; ++j) {
      if (result.scarcity(j, k) > tol) {
        r.scarce_pairs.emplace_back(static_cast<std::size_t>(j), static_cast<std::size_t>(k));
      }
      const double cap = s.nodes()[static_cast<std::size_t>(j)]
                             .capacity_tokens_per_s[static_cast<std::size_t>(k)];
      if (cap > 0.0) r.utilization(j, k) = result.dispatch(j, k) / cap;
    }
    r.mean_price.push_back(n > 0 ? result.prices.col(k).mean() : 0.0);
    r.max_price.push_back(n > 0 ? result.prices.col(k).maxCoeff() : 0.0);
  }
  for (std::size_t a = 0; a < s.num_arcs(); ++a) {
    const auto ai = static_cast<Index>(a);
    if (result.congestion(ai) > tol) r.congested_arcs.push_back(a);
    const double cap = result.link_capacity(ai);
    if (std::isfinite(cap) && result.link_usage(ai) >= cap - 1e-6 * std::max(1.0, cap)) {
      r.saturated_arcs.push_back(a);
    }
  }
  return r;
}

}  // namespace tokenflow
