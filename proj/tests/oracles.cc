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

#include "oracles.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

namespace tokenflow::testing {

std::optional<double> VertexEnumerationMinimum(const LinearProgram& lp) {
  const int n = static_cast<int>(lp.num_variables());
  const int m_eq = static_cast<int>(lp.num_eq());
  const int m_ub = static_cast<int>(lp.num_ub());
  const int m = m_eq + m_ub;
  const int cols = n + m_ub;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, cols);
  Eigen::VectorXd b(m);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(cols);
  if (m_eq > 0) a.block(0, 0, m_eq, n) = Eigen::MatrixXd(lp.eq_matrix);
  if (m_ub > 0) a.block(m_eq, 0, m_ub, n) = Eigen::MatrixXd(lp.ub_matrix);
  for (int i = 0; i < m_ub; ++i) a(m_eq + i, n + i) = 1.0;
  for (int i = 0; i < m_eq; ++i) b(i) = lp.eq_rhs[i];
  for (int i = 0; i < m_ub; ++i) b(m_eq + i) = lp.ub_rhs[i];
  for (int j = 0; j < n; ++j) c(j) = lp.objective[j];

  std::optional<double> best;
  std::vector<bool> pick(cols, false);
  std::fill(pick.begin(), pick.begin() + m, true);
  do {
    Eigen::MatrixXd basis(m, m);
    std::vector<int> idx;
    for (int j = 0; j < cols; ++j) {
      if (pick[j]) {
        basis.col(static_cast<Eigen::Index>(idx.size())) = a.col(j);
        idx.push_back(j);
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
    if (lu.rank() < m) continue;
    const Eigen::VectorXd z = lu.solve(b);
    if (z.minCoeff() < -1e-10) continue;
    double value = 0.0;
    for (int i = 0; i < m; ++i) value += c(idx[i]) * z(i);
    if (!best || value < *best) best = value;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

double VincentyKm(double lat1, double lon1, double lat2, double lon2) {
  constexpr double a = 6378137.0;
  constexpr double f = 1.0 / 298.257223563;
  constexpr double b = (1.0 - f) * a;
  const double deg = std::numbers::pi / 180.0;
  const double l = (lon2 - lon1) * deg;
  const double u1 = std::atan((1.0 - f) * std::tan(lat1 * deg));
  const double u2 = std::atan((1.0 - f) * std::tan(lat2 * deg));
  const double sin_u1 = std::sin(u1), cos_u1 = std::cos(u1);
  const double sin_u2 = std::sin(u2), cos_u2 = std::cos(u2);
  double lambda = l;
  double sin_sigma = 0, cos_sigma = 0, sigma = 0, cos_sq_alpha = 0, cos_2sm = 0;
  for (int iter = 0; iter < 200; ++iter) {
    const double sin_l = std::sin(lambda), cos_l = std::cos(lambda);
    sin_sigma = std::sqrt(std::pow(cos_u2 * sin_l, 2) +
                          std::pow(cos_u1 * sin_u2 - sin_u1 * cos_u2 * cos_l, 2));
    if (sin_sigma == 0.0) return 0.0;
    cos_sigma = sin_u1 * sin_u2 + cos_u1 * cos_u2 * cos_l;
    sigma = std::atan2(sin_sigma, cos_sigma);
    const double sin_alpha = cos_u1 * cos_u2 * sin_l / sin_sigma;
    cos_sq_alpha = 1.0 - sin_alpha * sin_alpha;
    cos_2sm = cos_sq_alpha != 0.0 ? cos_sigma - 2.0 * sin_u1 * sin_u2 / cos_sq_alpha : 0.0;
    const double cc = f / 16.0 * cos_sq_alpha * (4.0 + f * (4.0 - 3.0 * cos_sq_alpha));
    const double prev = lambda;
    lambda = l + (1.0 - cc) * f * sin_alpha *
                     (sigma + cc * sin_sigma *
                                  (cos_2sm + cc * cos_sigma * (-1.0 + 2.0 * cos_2sm * cos_2sm)));
    if (std::abs(lambda - prev) < 1e-12) break;
  }
  const double u_sq = cos_sq_alpha * (a * a - b * b) / (b * b);
  const double big_a =
      1.0 + u_sq / 16384.0 * (4096.0 + u_sq * (-768.0 + u_sq * (320.0 - 175.0 * u_sq)));
  const double big_b = u_sq / 1024.0 * (256.0 + u_sq * (-128.0 + u_sq * (74.0 - 47.0 * u_sq)));
  const double delta_sigma =
      big_b * sin_sigma *
      (cos_2sm + big_b / 4.0 *
                     (cos_sigma * (-1.0 + 2.0 * cos_2sm * cos_2sm) -
                      big_b / 6.0 * cos_2sm * (-3.0 + 4.0 * sin_sigma * sin_sigma) *
                          (-3.0 + 4.0 * cos_2sm * cos_2sm)));
  return b * big_a * (sigma - delta_sigma) / 1000.0;
}

std::optional<std::vector<double>> MeritOrderDispatch(const std::vector<double>& cost,
                                                      const std::vector<double>& capacity,
                                                      double total_demand) {
  std::vector<std::size_t> order(cost.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return cost[a] < cost[b]; });
  std::vector<double> dispatch(cost.size(), 0.0);
  double remaining = total_demand;
  for (std::size_t j : order) {
    const double take = std::min(remaining, capacity[j]);
    dispatch[j] = take;
    remaining -= take;
  }
  if (remaining > 1e-9 * (1.0 + total_demand)) return std::nullopt;
  return dispatch;
}

GridSearch GridSearchMinimum(const Scenario& scenario, int points) {
  const std::size_t n = scenario.num_nodes();
  const std::size_t kk = scenario.num_classes();
  double min_payload = std::numeric_limits<double>::infinity();
  for (const WorkloadClass& k : scenario.classes()) {
    min_payload = std::min(min_payload, k.payload_gb_per_mtok);
  }
  struct Dim {
    std::size_t arc, cls;
    double cost;
  };
  std::vector<Dim> dims;
  for (std::size_t k = 0; k < kk; ++k) {
    const auto& bound = scenario.classes()[k].latency_bound_ms;
    for (std::size_t a = 0; a < scenario.num_arcs(); ++a) {
      const Arc& arc = scenario.arcs()[a];
      if (bound && arc.latency_ms > *bound) continue;
      const double route = arc.routing_cost_usd_per_mtok.empty() ? 0.0 : arc.routing_cost_usd_per_mtok[k];
      dims.push_back({a, k, route + arc.transfer_tariff_usd_per_gb * scenario.classes()[k].payload_gb_per_mtok});
    }
  }
  if (dims.size() > 3) throw std::invalid_argument("grid search supports at most 3 flow dimensions");

  // Demand and capacity in M tokens/s; costs in $/M tokens.
  std::vector<std::vector<double>> demand(n, std::vector<double>(kk)), cap = demand, g = demand;
  std::vector<double> total(kk, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const Node& node = scenario.nodes()[j];
    for (std::size_t k = 0; k < kk; ++k) {
      demand[j][k] = scenario.base_demand()(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) *
                     scenario.demand_scale() / 1e6;
      cap[j][k] = node.capacity_tokens_per_s[k] / 1e6;
      const auto& ov = node.energy_override_kwh_per_mtok[k];
      g[j][k] = node.elec_price_usd_per_kwh * (ov ? *ov : scenario.classes()[k].energy_kwh_per_mtok) +
                node.opex_adder_usd_per_mtok;
      total[k] += demand[j][k];
    }
  }
  GridSearch out;
  for (const Dim& d : dims) out.step.push_back(total[d.cls] / (points - 1));

  std::vector<int> idx(dims.size(), 0);
  std::vector<std::vector<double>> x(n, std::vector<double>(kk));
  std::vector<double> link(scenario.num_arcs());
  while (true) {
    ++out.points_evaluated;
    for (std::size_t j = 0; j < n; ++j) x[j] = demand[j];
    std::fill(link.begin(), link.end(), 0.0);
    double cost = 0.0;
    for (std::size_t i = 0; i < dims.size(); ++i) {
      const double f = idx[i] * out.step[i];
      const Dim& d = dims[i];
      x[scenario.arc_tail(d.arc)][d.cls] -= f;
      x[scenario.arc_head(d.arc)][d.cls] += f;
      link[d.arc] += f;
      cost += d.cost * f;
    }
    bool feasible = true;
    constexpr double kTol = 1e-9;
    for (std::size_t j = 0; j < n && feasible; ++j) {
      for (std::size_t k = 0; k < kk; ++k) {
        if (x[j][k] < -kTol || x[j][k] > cap[j][k] + kTol) {
          feasible = false;
          break;
        }
        cost += g[j][k] * x[j][k];
      }
    }
    for (std::size_t a = 0; a < link.size() && feasible; ++a) {
      if (link[a] > scenario.arcs()[a].physical_capacity_gb_per_s / min_payload + kTol) feasible = false;
    }
    if (feasible && (!out.found || cost * 3600.0 < out.best_usd_per_hr)) {
      out.best_usd_per_hr = cost * 3600.0;
      out.found = true;
    }
    std::size_t i = 0;
    while (i < idx.size() && ++idx[i] == points) idx[i++] = 0;
    if (i == idx.size()) break;
  }
  return out;
}

}  // namespace tokenflow::testing
