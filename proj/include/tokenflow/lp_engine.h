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

// Linear programs of the form
//
//   min  c'x   s.t.  A_eq x = b_eq,  A_ub x <= b_ub,  x >= 0
//
// solved by a dense revised primal simplex that also returns the dual
// multipliers, plus an independent KKT checker.
//
// Sign convention for duals: eq_duals[i] = d(objective)/d(b_eq[i]), i.e. the
// marginal cost of one more unit of right-hand side. ub_duals[i] >= 0 is the
// shadow price of tightening row i by one unit, so d(objective)/d(b_ub[i]) is
// -ub_duals[i]. Stationarity reads c - A_eq' eq_duals + A_ub' ub_duals >= 0.

#ifndef TOKENFLOW_LP_ENGINE_H_
#define TOKENFLOW_LP_ENGINE_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/SparseCore>

namespace tokenflow {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;
using Triplet = Eigen::Triplet<double>;

struct LinearProgram {
  std::vector<double> objective;
  SparseMatrix eq_matrix;
  std::vector<double> eq_rhs;
  SparseMatrix ub_matrix;
  std::vector<double> ub_rhs;
  // Optional traceability labels; empty or one per variable/row.
  std::vector<std::string> variable_names;
  std::vector<std::string> eq_names;
  std::vector<std::string> ub_names;

  std::size_t num_variables() const { return objective.size(); }
  std::size_t num_eq() const { return eq_rhs.size(); }
  std::size_t num_ub() const { return ub_rhs.size(); }

  // Throws tokenflow::Error(kStructural / kInvalidValue) on inconsistent
  // dimensions or non-finite data.
  void Validate() const;
};

// Convenience builder collecting triplets row by row.
class LpBuilder {
 public:
  std::size_t AddVariable(double cost, std::string name = {});
  std::size_t AddEqRow(double rhs, std::string name = {});
  std::size_t AddUbRow(double rhs, std::string name = {});
  void SetEq(std::size_t row, std::size_t var, double coefficient);
  void SetUb(std::size_t row, std::size_t var, double coefficient);
  LinearProgram Build() const;

 private:
  std::vector<double> costs_;
  std::vector<std::string> names_;
  std::vector<double> eq_rhs_;
  std::vector<std::string> eq_names_;
  std::vector<double> ub_rhs_;
  std::vector<std::string> ub_names_;
  std::vector<Triplet> eq_;
  std::vector<Triplet> ub_;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kSolverError };

std::string_view LpStatusName(LpStatus status);

struct LpTolerances {
  double feasibility = 1e-7;
  double dual = 1e-7;
  double gap = 1e-7;
  int max_iterations = 200000;
};

struct LpSolution {
  LpStatus status = LpStatus::kSolverError;
  std::vector<double> primal;
  std::vector<double> eq_duals;
  std::vector<double> ub_duals;
  // c - A_eq' eq_duals + A_ub' ub_duals.
  std::vector<double> reduced_costs;
  double objective = 0.0;
  int iterations = 0;
  std::string message;

  bool optimal() const { return status == LpStatus::kOptimal; }
};

// Deterministic: the same program always produces bit-identical output.
// Reentrant; a single call is single-threaded.
LpSolution Solve(const LinearProgram& lp, const LpTolerances& tolerances = {});

struct KktReport {
  double primal_feasibility = 0.0;    // max residual of rows and bounds
  double dual_feasibility = 0.0;      // max negative part of reduced costs / ub duals
  double complementary_slackness = 0.0;  // max |slack * multiplier|
  // |primal - dual objective| / (1 + |primal objective|).
  double duality_gap = 0.0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;

  double MaxViolation() const;
  bool Satisfied(double tol) const;
};

// Recomputes every optimality condition from the raw data; never throws on
// violations, they are reported.
KktReport VerifyKkt(const LinearProgram& lp, const LpSolution& solution);

}  // namespace tokenflow

#endif  // TOKENFLOW_LP_ENGINE_H_
