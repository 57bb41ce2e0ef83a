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

// Acceptance report: one PASS/FAIL line per criterion with the measured
// values. Criteria whose targets are calibration bands on reference figures
// (6, 7 and the ledger band of 10) are reported but do not set the exit
// status unless --strict is given; every other criterion gates.

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <sys/wait.h>

#include "json.hpp"
#include "oracles.h"
#include "test_util.h"
#include "tokenflow/clearing.h"
#include "tokenflow/experiments.h"
#include "tokenflow/pricing.h"
#include "tokenflow/scenario_file.h"
#include "tokenflow/settlement.h"

#ifndef TOKENFLOW_CLI_PATH
#define TOKENFLOW_CLI_PATH "tokenflow"
#endif

namespace tokenflow {
namespace {

using Index = Eigen::Index;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string Fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string Fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

bool Within(double value, double target, double rel) {
  return std::abs(value - target) <= rel * std::abs(target);
}

double Pct(double value, double target) { return 100.0 * (value - target) / target; }

std::size_t Node(const Scenario& s, const char* id) { return *s.FindNode(id); }
std::size_t Class(const Scenario& s, const char* id) { return *s.FindClass(id); }
double At(const Eigen::MatrixXd& m, std::size_t i, std::size_t j) {
  return m(static_cast<Index>(i), static_cast<Index>(j));
}

// The randomized suite plus the testbed at three scales, both formulations.
const std::vector<ClearingResult>& Suite() {
  static std::vector<ClearingResult> suite = [] {
    std::vector<ClearingResult> out;
    std::mt19937_64 rng(20260);
    int accepted = 0;
    while (accepted < 200) {
      const Scenario s = testing::RandomScenario(rng, 4, 2);
      ClearingResult base = ClearBaseline(s);
      if (!base.feasible) continue;
      ++accepted;
      out.push_back(std::move(base));
      ClearingResult xfer = ClearTransferAware(s);
      if (xfer.feasible) out.push_back(std::move(xfer));
    }
    for (double scale : {1.0, 10.0, 35.0}) {
      const Scenario s = testing::Shipped("five_node", scale);
      out.push_back(ClearBaseline(s));
      out.push_back(ClearTransferAware(s));
    }
    return out;
  }();
  return suite;
}

Outcome EnergyComponents() {
  // Recomputed from the raw file: price ($/kWh) times intensity (kWh/M).
  const auto doc = nlohmann::json::parse(testing::ReadFile(ResolveScenarioPath("five_node")));
  auto raw = [&](const char* hub, const char* cls) {
    double price = 0.0, energy = 0.0;
    for (const auto& h : doc["registry"]) {
      if (h["hub"] == hub) price = h["elec_price_usd_per_kwh"].get<double>();
    }
    for (const auto& c : doc["classes"]) {
      if (c["id"] == cls) energy = c["energy_kwh_per_mtok"].get<double>();
    }
    return price * energy;
  };
  const Scenario s = testing::Shipped("five_node");
  const Eigen::MatrixXd g = MarginalCostMatrix(s);
  struct Case {
    const char* hub;
    const char* cls;
    double target;
  };
  const Case cases[] = {{"ashburn", "chat", 0.078},
                        {"dallas", "image", 36.00},
                        {"seattle", "image", 26.00},
                        {"seattle", "batch", 0.520}};
  Outcome o;
  double worst = 0.0;
  for (const Case& c : cases) {
    const double v = At(g, Node(s, c.hub), Class(s, c.cls));
    worst = std::max({worst, std::abs(v - c.target), std::abs(v - raw(c.hub, c.cls))});
  }
  o.pass = worst <= 1e-12;
  o.detail = Fmt("4 cells, max |g - reference| = %.3g", worst);
  return o;
}

Outcome Kkt() {
  double worst_violation = 0.0, worst_gap = 0.0, worst_recomputed = 0.0;
  const auto& suite = Suite();
  for (const ClearingResult& r : suite) {
    worst_violation = std::max(worst_violation, r.kkt.MaxViolation());
    worst_gap = std::max(worst_gap, r.kkt.duality_gap);
    // Dual objective recomputed from the program: b_eq'pi - b_ub'u.
    const LinearProgram& lp = r.lp;
    double dual = 0.0;
    for (std::size_t i = 0; i < lp.eq_rhs.size(); ++i) dual += lp.eq_rhs[i] * r.solution.eq_duals[i];
    for (std::size_t i = 0; i < lp.ub_rhs.size(); ++i) {
      if (std::isfinite(lp.ub_rhs[i])) dual -= lp.ub_rhs[i] * r.solution.ub_duals[i];
    }
    double primal = 0.0;
    for (std::size_t j = 0; j < lp.objective.size(); ++j) primal += lp.objective[j] * r.solution.primal[j];
    worst_recomputed = std::max(worst_recomputed, std::abs(primal - dual) / (1.0 + std::abs(primal)));
  }
  Outcome o;
  o.pass = worst_violation <= 1e-6 && worst_gap <= 1e-6 && worst_recomputed <= 1e-6;
  o.detail = Fmt("%zu clearings, max violation %.2g, max rel gap %.2g (recomputed %.2g)",
                 suite.size(), worst_violation, worst_gap, worst_recomputed);
  return o;
}

Outcome Identities() {
  double node = 0.0, arc = 0.0, path = 0.0;
  std::size_t nodes = 0, arcs = 0, paths = 0;
  const auto& suite = Suite();
  for (const ClearingResult& r : suite) {
    const Scenario& s = *r.scenario;
    for (std::size_t k = 0; k < s.num_classes(); ++k) {
      for (std::size_t j = 0; j < s.num_nodes(); ++j) {
        if (At(r.dispatch, j, k) > kActivityTolTokensPerS) {
          node = std::max(node, std::abs(DecomposeLocal(r, j, k).Residual()));
          ++nodes;
        }
        if (At(s.demand(), j, k) > kActivityTolTokensPerS) {
          path = std::max(path, std::abs(DecomposePath(r, j, k).Residual()));
          ++paths;
        }
      }
      for (std::size_t a = 0; a < s.num_arcs(); ++a) {
        const ArcIdentity id = ArcPriceIdentity(r, a, k);
        if (id.activity != ArcActivity::kActive) continue;
        arc = std::max(arc, std::abs(id.residual));
        ++arcs;
      }
    }
  }
  Outcome o;
  o.pass = node <= 1e-5 && arc <= 1e-5 && path <= 1e-5;
  o.detail = Fmt("node %zu checks max %.2g, arc %zu max %.2g, path %zu max %.2g", nodes, node,
                 arcs, arc, paths, path);
  return o;
}

Outcome MeritOrder() {
  std::mt19937_64 rng(404);
  double worst_obj = 0.0, worst_x = 0.0;
  int n = 0;
  for (; n < 100; ++n) {
    Scenario s = testing::RandomScenario(rng, 6, 3).WithLinkCapacity(kInfinity);
    for (std::size_t k = 0; k < s.num_classes(); ++k) s = s.WithLatencyBound(k, std::nullopt);
    std::vector<Arc> arcs = s.arcs();
    for (Arc& a : arcs) {
      a.routing_cost_usd_per_mtok.assign(s.num_classes(), 0.0);
      a.transfer_tariff_usd_per_gb = 0.0;
    }
    s = Scenario::Create(s.nodes(), arcs, s.classes(), s.base_demand(), 1.0);
    const ClearingResult r = ClearBaseline(s);
    if (!r.feasible) return {false, "infeasible instance"};
    double oracle = 0.0;
    for (std::size_t k = 0; k < s.num_classes(); ++k) {
      std::vector<double> cost, cap;
      for (std::size_t j = 0; j < s.num_nodes(); ++j) {
        cost.push_back(s.MarginalCost(j, k));
        cap.push_back(s.nodes()[j].capacity_tokens_per_s[k]);
      }
      const auto x = testing::MeritOrderDispatch(cost, cap, s.demand().col(static_cast<Index>(k)).sum());
      if (!x) return {false, "oracle found no dispatch"};
      for (std::size_t j = 0; j < s.num_nodes(); ++j) {
        oracle += cost[j] * (*x)[j] / 1e6 * 3600.0;
        worst_x = std::max(worst_x, std::abs(At(r.dispatch, j, k) - (*x)[j]));
      }
    }
    worst_obj = std::max(worst_obj, std::abs(r.total_cost_usd_per_hr - oracle) / (1.0 + oracle));
  }
  Outcome o;
  o.pass = worst_obj <= 1e-8 && worst_x <= 1e-6;
  o.detail = Fmt("%d instances, max rel objective diff %.2g, max dispatch diff %.2g tokens/s", n,
                 worst_obj, worst_x);
  return o;
}

Outcome BruteForce() {
  std::mt19937_64 rng(505);
  std::uniform_int_distribution<int> digit(0, 9), cap(60, 260);
  int instances = 0, feasible = 0;
  double worst = 0.0;
  bool below = false;
  while (instances < 50) {
    const bool two_classes = instances % 2 == 1;
    const std::size_t n = two_classes ? 2 : 2 + static_cast<std::size_t>(digit(rng) % 2);
    const std::size_t kk = two_classes ? 2 : 1;
    std::vector<testing::NodeSpec> nodes(n);
    for (std::size_t j = 0; j < n; ++j) {
      nodes[j].id = "n" + std::to_string(j);
      nodes[j].elec_price = 0.1 * (1 + digit(rng));
    }
    // Integer data; each class totals 199 M tokens/s so the 200-point grid
    // has unit spacing and contains every integral routing split.
    for (std::size_t k = 0; k < kk; ++k) {
      int left = 199;
      for (std::size_t j = 0; j < n; ++j) {
        const int d = j + 1 == n ? left : std::uniform_int_distribution<int>(0, left)(rng);
        left -= d;
        nodes[j].demand.push_back(1e6 * d);
        nodes[j].capacity.push_back(1e6 * cap(rng));
      }
    }
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
      }
    }
    std::shuffle(pairs.begin(), pairs.end(), rng);
    pairs.resize(two_classes ? 1 : std::min<std::size_t>(3, pairs.size()));
    std::vector<testing::ArcSpec> arcs;
    for (const auto& [i, j] : pairs) {
      testing::ArcSpec a;
      a.from = "n" + std::to_string(i);
      a.to = "n" + std::to_string(j);
      if (digit(rng) < 6) a.capacity_gb_per_s = 10.0 * (1 + digit(rng));
      for (std::size_t k = 0; k < kk; ++k) a.route_cost.push_back(0.05 * digit(rng));
      arcs.push_back(a);
    }
    const Scenario s = testing::MakeScenario(nodes, arcs, testing::MakeClasses(std::vector<double>(kk, 1.0), std::vector<double>(kk, 1.0)));
    const ClearingResult r = ClearBaseline(s);
    const testing::GridSearch g = testing::GridSearchMinimum(s, 200);
    ++instances;
    if (r.feasible != g.found) return {false, "feasibility disagrees with the grid"};
    if (!r.feasible) continue;
    ++feasible;
    below |= g.best_usd_per_hr < r.total_cost_usd_per_hr - 1e-7 * (1.0 + r.total_cost_usd_per_hr);
    worst = std::max(worst, (g.best_usd_per_hr - r.total_cost_usd_per_hr) / (1.0 + r.total_cost_usd_per_hr));
  }
  Outcome o;
  // The grid contains an LP optimum, so the provable gap is zero.
  o.pass = !below && worst <= 1e-7;
  o.detail = Fmt("%d instances (%d feasible), max rel (grid - LP) %.2g, provable gap 0", instances,
                 feasible, worst);
  return o;
}

Outcome Baseline() {
  const Scenario s = testing::Shipped("five_node", 35.0);
  const ClearingResult r = ClearBaseline(s);
  if (!r.feasible) return {false, "infeasible"};
  const ScarcityReport rep = BuildScarcityReport(r);
  const double demand = s.demand().sum();
  const double sv_chat = At(r.dispatch, Node(s, "siliconvalley"), Class(s, "chat"));
  struct Lmp {
    const char* hub;
    const char* cls;
    double target;
  };
  const Lmp lmps[] = {{"ashburn", "chat", 0.078},  {"dallas", "chat", 0.078},
                      {"dallas", "image", 41.50},  {"seattle", "image", 41.47},
                      {"seattle", "batch", 0.694}};
  bool lmp_ok = true;
  std::string lmp_text;
  for (const Lmp& l : lmps) {
    const double v = At(r.prices, Node(s, l.hub), Class(s, l.cls));
    lmp_ok &= Within(v, l.target, 0.05);
    lmp_text += Fmt(" %s/%s %.4g (%+.1f%%)", l.hub, l.cls, v, Pct(v, l.target));
  }
  Outcome o;
  o.pass = Within(demand, 16.29e6, 0.01) && Within(r.total_cost_usd_per_hr, 123635.0, 0.05) &&
           std::abs(sv_chat) <= kActivityTolTokensPerS && rep.congested_arcs.size() == 1 && lmp_ok;
  o.detail = Fmt("demand %.5g M/s, cost $%.0f/hr (%+.1f%%), SV chat %.3g, congested links %zu;",
                 demand / 1e6, r.total_cost_usd_per_hr, Pct(r.total_cost_usd_per_hr, 123635.0),
                 sv_chat, rep.congested_arcs.size()) +
             lmp_text;
  return o;
}

Outcome Comparison() {
  const Scenario s = testing::Shipped("five_node", 35.0);
  const ClearingResult base = ClearBaseline(s);
  const ClearingResult xfer = ClearTransferAware(s);
  const ClearingResult opex = ClearBaseline(ApplyOpexAdder(s, kDefaultOpexAdderUsdPerMtok));
  if (!base.feasible || !xfer.feasible || !opex.feasible) return {false, "infeasible"};
  const std::size_t saturated = BuildScarcityReport(xfer).saturated_arcs.size();
  const double dx = (base.dispatch - opex.dispatch).cwiseAbs().maxCoeff();
  const double df = (base.flows - opex.flows).cwiseAbs().maxCoeff();
  Outcome o;
  o.pass = Within(xfer.total_cost_usd_per_hr, 127007.0, 0.05) && saturated == 4 && dx <= 1e-6 &&
           df <= 1e-6 && Within(opex.total_cost_usd_per_hr, 163140.0, 0.05);
  o.detail = Fmt("transfer-aware $%.0f/hr (%+.1f%%), %zu saturated links; opex adder $%.0f/hr "
                 "(%+.1f%%), max dispatch diff %.2g, max flow diff %.2g",
                 xfer.total_cost_usd_per_hr, Pct(xfer.total_cost_usd_per_hr, 127007.0), saturated,
                 opex.total_cost_usd_per_hr, Pct(opex.total_cost_usd_per_hr, 163140.0), dx, df);
  return o;
}

Outcome ScarcityCliff() {
  const SweepTable t = DemandSweep(testing::Shipped("five_node"), {35.0, 40.0}, Formulation::kBaseline);
  if (!t.rows[0].feasible || !t.rows[1].feasible) return {false, "infeasible"};
  const std::size_t image = 1;
  const double ratio = t.rows[1].mean_price[image] / t.rows[0].mean_price[image];
  Outcome o;
  o.pass = ratio >= 1.5 && t.rows[0].scarce_pairs == 4 && t.rows[1].scarce_pairs == 5;
  o.detail = Fmt("mean image price %.4g -> %.4g (ratio %.3g), scarce pairs %zu -> %zu",
                 t.rows[0].mean_price[image], t.rows[1].mean_price[image], ratio,
                 t.rows[0].scarce_pairs, t.rows[1].scarce_pairs);
  return o;
}

Outcome Latency() {
  const Scenario s = testing::Shipped("five_node", 35.0);
  const LatencyExperimentResult r =
      LatencyExperiment(s, {{Class(s, "chat"), 15.0}, {Class(s, "code"), 20.0}});
  if (!r.before.feasible || !r.after.feasible) return {false, "infeasible"};
  const std::size_t sv = Node(s, "siliconvalley"), chat = Class(s, "chat");
  const double lmp = At(r.after.prices, sv, chat);
  const double energy = s.EnergyCost(sv, chat);
  Outcome o;
  o.pass = std::abs(lmp - energy) <= 1e-9 && std::abs(energy - 0.180) <= 1e-12 &&
           r.cost_delta_pct <= 1.0 && r.cost_delta_pct >= 0.0;
  o.detail = Fmt("SV chat LMP %.6g (own energy cost %.6g), cost +%.3f%%", lmp, energy,
                 r.cost_delta_pct);
  return o;
}

Outcome Settlement(bool* core_ok) {
  double worst_identity = 0.0, min_surplus = 0.0;
  const auto& suite = Suite();
  for (const ClearingResult& r : suite) {
    const SettlementLedger l = Settle(r);
    worst_identity = std::max(worst_identity, std::abs(l.user_payments - l.compute_revenue -
                                                       l.network_revenue - l.surplus) /
                                                  (1.0 + l.user_payments));
    min_surplus = std::min(min_surplus, l.surplus);
  }
  const SettlementLedger l = Settle(ClearBaseline(testing::Shipped("five_node", 35.0)));
  const bool band = Within(l.user_payments, 139446.0, 0.05) &&
                    Within(l.compute_revenue, 137613.0, 0.05) &&
                    Within(l.network_revenue, 1784.0, 0.05) && Within(l.surplus, 49.71, 0.05);
  *core_ok = worst_identity <= 1e-12 && min_surplus >= -1e-6;
  Outcome o;
  o.pass = *core_ok && band;
  o.detail = Fmt("identity max rel %.2g over %zu clearings, min surplus %.3g; testbed ledger "
                 "payments $%.0f (%+.1f%%), compute $%.0f (%+.1f%%), network $%.0f (%+.1f%%), "
                 "surplus $%.3g (target 49.71)",
                 worst_identity, suite.size(), min_surplus, l.user_payments,
                 Pct(l.user_payments, 139446.0), l.compute_revenue, Pct(l.compute_revenue, 137613.0),
                 l.network_revenue, Pct(l.network_revenue, 1784.0), l.surplus);
  return o;
}

Outcome TwentyNode() {
  const ScaleUpResult at35 = ScaleUpRun(testing::Shipped("us_twenty", 35.0));
  const ClearingResult at40 = ClearBaseline(testing::Shipped("us_twenty", 40.0));
  if (!at35.result.feasible) return {false, "infeasible at 35x"};
  const std::size_t scarce = at35.report->scarce_pairs.size();
  Outcome o;
  o.pass = !at40.feasible && at40.status == LpStatus::kInfeasible && scarce >= 20 &&
           at35.low_price_share >= 0.5;
  o.detail = Fmt("35x feasible at $%.0f/hr with %zu scarce pairs; 40x %s; lowest-quartile hubs "
                 "(%zu) serve %.1f%% of chat",
                 at35.result.total_cost_usd_per_hr, scarce,
                 at40.feasible ? "feasible" : "infeasible", at35.low_price_nodes.size(),
                 100.0 * at35.low_price_share);
  return o;
}

int Run(const std::string& args) {
  const std::string cmd = std::string("\"") + TOKENFLOW_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

Outcome Determinism() {
  const std::string root = testing::TempDir("determinism");
  const char* commands[] = {"clear --scenario five_node --scale 35",
                            "clear --scenario five_node --scale 35 --formulation transfer",
                            "clear --scenario us_twenty --scale 40",
                            "sweep --scenario five_node",
                            "compare --scenario five_node --scale 35",
                            "latency --scenario five_node --scale 35 --chat-ms 15 --code-ms 20",
                            "settle --scenario five_node --scale 35"};
  std::size_t compared = 0;
  for (int run = 0; run < 2; ++run) {
    for (std::size_t c = 0; c < std::size(commands); ++c) {
      const std::string out = root + "/run" + std::to_string(run) + "/cmd" + std::to_string(c);
      const int rc = Run(std::string(commands[c]) + " --out \"" + out + "\"");
      if (rc != 0 && rc != 1) return {false, Fmt("'%s' exited %d", commands[c], rc)};
    }
  }
  for (const auto& entry : fs::recursive_directory_iterator(root + "/run0")) {
    if (!entry.is_regular_file() || entry.path().filename() == "metadata.json") continue;
    const fs::path other = fs::path(root) / "run1" / fs::relative(entry.path(), root + "/run0");
    if (!fs::exists(other)) return {false, "missing " + other.string()};
    if (testing::ReadFile(entry.path().string()) != testing::ReadFile(other.string())) {
      return {false, "differs: " + fs::relative(entry.path(), root).string()};
    }
    ++compared;
  }
  Outcome o;
  o.pass = compared > 0;
  o.detail = Fmt("%zu output files byte-identical across two runs of %zu commands", compared,
                 std::size(commands));
  return o;
}

}  // namespace
}  // namespace tokenflow

int main(int argc, char** argv) {
  using namespace tokenflow;
  const bool strict = argc > 1 && std::strcmp(argv[1], "--strict") == 0;
  bool ledger_core = true;
  struct Criterion {
    int id;
    const char* name;
    bool gates;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "analytic energy components", true, EnergyComponents},
      {2, "KKT and duality", true, Kkt},
      {3, "decomposition identities", true, Identities},
      {4, "merit-order oracle", true, MeritOrder},
      {5, "brute-force oracle", true, BruteForce},
      {6, "testbed baseline reproduction", false, Baseline},
      {7, "formulation comparison", false, Comparison},
      {8, "scarcity cliff", true, ScarcityCliff},
      {9, "latency tightening", true, Latency},
      {10, "settlement", false, [&] { return Settlement(&ledger_core); }},
      {11, "twenty-hub qualitative", true, TwentyNode},
      {12, "determinism", true, Determinism},
  };
  int gating_failures = 0, failures = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) {
      ++failures;
      // The settlement identity and sign checks gate even when the band fails.
      const bool core_failed = c.id == 10 && !ledger_core;
      if (c.gates || strict || core_failed) ++gating_failures;
    }
  }
  std::printf("%d of %zu criteria pass; %d gating failure(s)\n",
              static_cast<int>(criteria.size()) - failures, criteria.size(), gating_failures);
  return gating_failures == 0 ? 0 : 1;
}
