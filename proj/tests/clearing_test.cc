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

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "oracles.h"
#include "test_util.h"
#include "tokenflow/clearing.h"
#include "tokenflow/error.h"

namespace tokenflow {
namespace {

using testing::ArcSpec;
using testing::MakeClasses;
using testing::MakeScenario;
using testing::NodeSpec;

// A serves cheaply; B is dear and imports over one arc.
Scenario TwoNode(double link_gb_per_s) {
  return MakeScenario({{"a", 1.0, {10e6}, {0.0}}, {"b", 2.0, {10e6}, {1e6}}},
                      {{"b", "a", 5.0, link_gb_per_s, {0.5}}}, MakeClasses({1.0}, {1.0}));
}

TEST_CASE("two-node import sets the remote price") {
  const ClearingResult r = ClearBaseline(TwoNode(kInfinity));
  REQUIRE(r.feasible);
  CHECK(r.flows(0, 0) == doctest::Approx(1e6));
  CHECK(r.dispatch(0, 0) == doctest::Approx(1e6));
  CHECK(r.dispatch(1, 0) == doctest::Approx(0.0));
  CHECK(r.prices(0, 0) == doctest::Approx(1.0));
  CHECK(r.prices(1, 0) == doctest::Approx(1.5));
  CHECK(r.total_cost_usd_per_hr == doctest::Approx(1.5 * 3600.0));
  CHECK(r.kkt.MaxViolation() < 1e-9);
}

TEST_CASE("binding link prices congestion") {
  // 0.4 GB/s at 1 GB/M tokens carries 0.4 M tokens/s.
  const ClearingResult r = ClearBaseline(TwoNode(0.4));
  REQUIRE(r.feasible);
  CHECK(r.flows(0, 0) == doctest::Approx(0.4e6));
  CHECK(r.dispatch(1, 0) == doctest::Approx(0.6e6));
  CHECK(r.prices(1, 0) == doctest::Approx(2.0));
  CHECK(r.congestion(0) == doctest::Approx(0.5));
  CHECK(r.link_usage(0) == doctest::Approx(0.4e6));
  CHECK(r.link_capacity(0) == doctest::Approx(0.4e6));
}

TEST_CASE("tight local capacity creates a scarcity rent") {
  const Scenario s = MakeScenario({{"a", 1.0, {0.5e6}, {1e6}}, {"b", 3.0, {10e6}, {0.0}}},
                                  {{"a", "b", 5.0, kInfinity, {0.25}}}, MakeClasses({1.0}, {1.0}));
  const ClearingResult r = ClearBaseline(s);
  REQUIRE(r.feasible);
  CHECK(r.dispatch(0, 0) == doctest::Approx(0.5e6));
  CHECK(r.prices(0, 0) == doctest::Approx(3.25));
  CHECK(r.scarcity(0, 0) == doctest::Approx(2.25));
}

TEST_CASE("latency bound removes slow arcs") {
  Scenario s = TwoNode(kInfinity).WithLatencyBound(0, 4.0);
  CHECK(LatencyFilter(s, 0).empty());
  const ClearingResult r = ClearBaseline(s);
  REQUIRE(r.feasible);
  CHECK(r.dispatch(1, 0) == doctest::Approx(1e6));
  CHECK(r.prices(1, 0) == doctest::Approx(2.0));
  CHECK_FALSE(r.ArcAllowed(0, 0));
  CHECK(r.flows(0, 0) == 0.0);
}

TEST_CASE("short capacity is infeasible under must-serve") {
  const Scenario s = MakeScenario({{"a", 1.0, {0.5e6}, {1e6}}}, {}, MakeClasses({1.0}, {1.0}));
  const ClearingResult r = ClearBaseline(s);
  CHECK_FALSE(r.feasible);
  CHECK(r.status == LpStatus::kInfeasible);
}

TEST_CASE("partial service sheds above the penalty") {
  const Scenario s = MakeScenario({{"a", 1.0, {0.5e6}, {1e6}}}, {}, MakeClasses({1.0}, {1.0}));
  const ClearingResult r = ClearPartialService(s, Eigen::MatrixXd::Constant(1, 1, 7.0));
  REQUIRE(r.feasible);
  CHECK(r.unmet(0, 0) == doctest::Approx(0.5e6));
  CHECK(r.prices(0, 0) == doctest::Approx(7.0));
  CHECK(r.scarcity(0, 0) == doctest::Approx(6.0));
  // A penalty below marginal cost sheds everything.
  const ClearingResult cheap = ClearPartialService(s, Eigen::MatrixXd::Constant(1, 1, 0.5));
  CHECK(cheap.unmet(0, 0) == doctest::Approx(1e6));
  CHECK(cheap.prices(0, 0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(ClearPartialService(s, Eigen::MatrixXd::Constant(1, 1, -1.0)), Error);
  CHECK_THROWS_AS(ClearPartialService(s, Eigen::MatrixXd::Constant(2, 1, 1.0)), Error);
}

TEST_CASE("transfer-aware links meter gigabytes") {
  // Class 1 is ten times heavier on the wire than class 0.
  const Scenario s =
      MakeScenario({{"a", 1.0, {10e6, 10e6}, {0.0, 0.0}}, {"b", 2.0, {10e6, 10e6}, {1e6, 1e6}}},
                   {{"b", "a", 5.0, 2.0, {}, 0.01}}, MakeClasses({1.0, 1.0}, {0.1, 1.0}));
  const ClearingResult base = ClearBaseline(s);
  const ClearingResult xfer = ClearTransferAware(s);
  REQUIRE(base.feasible);
  REQUIRE(xfer.feasible);
  // Token-equivalent: 2 GB/s / 0.1 GB/M = 20 M tokens/s; everything moves.
  CHECK(base.flows.sum() == doctest::Approx(2e6));
  // Physical: 0.1 f0 + 1.0 f1 <= 2 GB/s, both fit.
  CHECK(xfer.PhysicalUsage(0) == doctest::Approx(1.1));
  const Scenario tight = s.WithLinkCapacity(0.6);
  const ClearingResult t = ClearTransferAware(tight);
  REQUIRE(t.feasible);
  CHECK(t.link_usage(0) == doctest::Approx(0.6));
  CHECK(t.flows(0, 0) == doctest::Approx(1e6));
  CHECK(t.flows(0, 1) == doctest::Approx(0.5e6));
  // Price gap per GB: class 1 saves 1.0 $/M, pays 0.01 $/GB x 1 GB/M.
  CHECK(t.congestion(0) == doctest::Approx(0.99));
  CHECK(t.prices(1, 1) == doctest::Approx(2.0));
}

TEST_CASE("opex adder shifts cost but not dispatch") {
  const Scenario s = testing::Shipped("five_node", 35.0);
  const ClearingResult base = ClearBaseline(s);
  const ClearingResult opex = ClearBaseline(ApplyOpexAdder(s, 0.5));
  REQUIRE(base.feasible);
  REQUIRE(opex.feasible);
  CHECK((base.dispatch - opex.dispatch).cwiseAbs().maxCoeff() < 1e-6);
  CHECK((base.flows - opex.flows).cwiseAbs().maxCoeff() < 1e-6);
  const double added = 0.5 * s.demand().sum() / 1e6 * 3600.0;
  CHECK(opex.total_cost_usd_per_hr - base.total_cost_usd_per_hr == doctest::Approx(added));
}

TEST_CASE("uncapacitated clearing matches merit-order dispatch") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Scenario s = testing::RandomScenario(rng, 5, 3).WithLinkCapacity(kInfinity);
    for (std::size_t k = 0; k < s.num_classes(); ++k) s = s.WithLatencyBound(k, std::nullopt);
    // Free routing makes every node a perfect substitute.
    std::vector<Arc> arcs = s.arcs();
    for (Arc& a : arcs) {
      a.routing_cost_usd_per_mtok.assign(s.num_classes(), 0.0);
      a.transfer_tariff_usd_per_gb = 0.0;
    }
    s = Scenario::Create(s.nodes(), arcs, s.classes(), s.base_demand(), 1.0);
    const ClearingResult r = ClearBaseline(s);
    REQUIRE(r.feasible);
    double oracle_cost = 0.0;
    for (std::size_t k = 0; k < s.num_classes(); ++k) {
      std::vector<double> cost, cap;
      for (std::size_t j = 0; j < s.num_nodes(); ++j) {
        cost.push_back(s.MarginalCost(j, k));
        cap.push_back(s.nodes()[j].capacity_tokens_per_s[k]);
      }
      const auto x = testing::MeritOrderDispatch(cost, cap, s.demand().col(static_cast<Eigen::Index>(k)).sum());
      REQUIRE(x.has_value());
      for (std::size_t j = 0; j < s.num_nodes(); ++j) {
        oracle_cost += cost[j] * (*x)[j] / 1e6 * 3600.0;
        CHECK(std::abs(r.dispatch(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) - (*x)[j]) < 1e-6);
      }
    }
    CHECK(std::abs(r.total_cost_usd_per_hr - oracle_cost) <= 1e-8 * (1.0 + oracle_cost));
  }
}

TEST_CASE("clearing matches grid search on tiny markets") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> small(0, 9), cap(20, 170), share(0, 100);
  for (int trial = 0; trial < 20; ++trial) {
    // One class on three arcs over three nodes. Integer data in M tokens/s
    // with total demand 199 put every integral flow on the 200-point grid;
    // single-commodity optima are integral, so the grid holds an optimum.
    const int d0 = share(rng);
    const int d1 = std::uniform_int_distribution<int>(0, 199 - d0)(rng);
    const int demand[3] = {d0, d1, 199 - d0 - d1};
    std::vector<NodeSpec> nodes;
    for (int j = 0; j < 3; ++j) {
      nodes.push_back({"n" + std::to_string(j), 0.1 * (1 + small(rng)), {1e6 * cap(rng)},
                       {1e6 * demand[j]}});
    }
    std::vector<ArcSpec> arcs = {{"n0", "n1", 5.0, 5.0 * (1 + small(rng)), {0.1 * small(rng)}},
                                 {"n1", "n2", 5.0, kInfinity, {0.1 * small(rng)}},
                                 {"n2", "n0", 5.0, 5.0 * (1 + small(rng)), {0.1 * small(rng)}}};
    const Scenario s = MakeScenario(nodes, arcs, MakeClasses({1.0}, {1.0}));
    const ClearingResult r = ClearBaseline(s);
    const testing::GridSearch g = testing::GridSearchMinimum(s, 200);
    CHECK(r.feasible == g.found);
    if (!r.feasible) continue;
    CHECK(r.total_cost_usd_per_hr <= g.best_usd_per_hr + 1e-7);
    CHECK(g.best_usd_per_hr - r.total_cost_usd_per_hr <= 1e-7 * (1.0 + g.best_usd_per_hr));
  }
}

}  // namespace
}  // namespace tokenflow
