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

#include "tokenflow/lp_engine.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include "tokenflow/error.h"

namespace tokenflow {

void LinearProgram::Validate() const {
  const auto n = static_cast<Eigen::Index>(num_variables());
  if (eq_matrix.rows() != static_cast<Eigen::Index>(num_eq()) ||
      (eq_matrix.rows() > 0 && eq_matrix.cols() != n)) {
    throw Error(ErrorCode::kStructural, "equality block has inconsistent shape");
  }
  if (ub_matrix.rows() != static_cast<Eigen::Index>(num_ub()) ||
      (ub_matrix.rows() > 0 && ub_matrix.cols() != n)) {
    throw Error(ErrorCode::kStructural, "inequality block has inconsistent shape");
  }
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  if (!finite(objective) || !finite(eq_rhs) || !finite(ub_rhs)) {
    throw Error(ErrorCode::kInvalidValue, "linear program has non-finite data");
  }
  for (const SparseMatrix* m : {&eq_matrix, &ub_matrix}) {
    for (Eigen::Index c = 0; c < m->outerSize(); ++c) {
      for (SparseMatrix::InnerIterator it(*m, c); it; ++it) {
        if (!std::isfinite(it.value())) {
          throw Error(ErrorCode::kInvalidValue, "constraint matrix has non-finite entry");
        }
      }
    }
  }
  auto labels_ok = [](const std::vector<std::string>& names, std::size_t size) {
    return names.empty() || names.size() == size;
  };
  if (!labels_ok(variable_names, num_variables()) || !labels_ok(eq_names, num_eq()) ||
      !labels_ok(ub_names, num_ub())) {
    throw Error(ErrorCode::kStructural, "name vectors must be empty or full length");
  }
}

std::size_t LpBuilder::AddVariable(double cost, std::string name) {
  costs_.push_back(cost);
  names_.push_back(std::move(name));
  return costs_.size() - 1;
}

std::size_t LpBuilder::AddEqRow(double rhs, std::string name) {
  eq_rhs_.push_back(rhs);
  eq_names_.push_back(std::move(name));
  return eq_rhs_.size() - 1;
}

std::size_t LpBuilder::AddUbRow(double rhs, std::string name) {
  ub_rhs_.push_back(rhs);
  ub_names_.push_back(std::move(name));
  return ub_rhs_.size() - 1;
}

void LpBuilder::SetEq(std::size_t row, std::size_t var, double coefficient) {
  eq_.emplace_back(static_cast<int>(row), static_cast<int>(var), coefficient);
}

void LpBuilder::SetUb(std::size_t row, std::size_t var, double coefficient) {
  ub_.emplace_back(static_cast<int>(row), static_cast<int>(var), coefficient);
}

LinearProgram LpBuilder::Build() const {
  LinearProgram lp;
  const auto n = static_cast<Eigen::Index>(costs_.size());
  lp.objective = costs_;
  lp.eq_matrix.resize(static_cast<Eigen::Index>(eq_rhs_.size()), n);
  lp.eq_matrix.setFromTriplets(eq_.begin(), eq_.end());
  lp.ub_matrix.resize(static_cast<Eigen::Index>(ub_rhs_.size()), n);
  lp.ub_matrix.setFromTriplets(ub_.begin(), ub_.end());
  lp.eq_rhs = eq_rhs_;
  lp.ub_rhs = ub_rhs_;
  lp.variable_names = names_;
  lp.eq_names = eq_names_;
  lp.ub_names = ub_names_;
  return lp;
}

std::string_view LpStatusName(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
    case LpStatus::kSolverError:
      return "solver_error";
  }
  return "unknown";
}

namespace {

constexpr double kPivotTolerance = 1e-9;
constexpr int kRefactorInterval = 64;
constexpr int kDegenerateLimit = 50;
constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Entry {
  int row;
  double value;
};

// Standard form  min c'z  s.t.  M z = rhs >= 0,  z >= 0  with columns
// [structural | slacks | artificials]. Rows with negative right-hand side are
// negated; `row_sign` records that so duals can be mapped back.
class Simplex {
 public:
  Simplex(const LinearProgram& lp, const LpTolerances& tol) : lp_(lp), tol_(tol) {
    n_ = static_cast<int>(lp.num_variables());
    m_eq_ = static_cast<int>(lp.num_eq());
    m_ub_ = static_cast<int>(lp.num_ub());
    m_ = m_eq_ + m_ub_;
    rhs_.resize(m_);
    row_sign_.assign(m_, 1.0);
    for (int i = 0; i < m_eq_; ++i) rhs_(i) = lp.eq_rhs[i];
    for (int i = 0; i < m_ub_; ++i) rhs_(m_eq_ + i) = lp.ub_rhs[i];
    for (int i = 0; i < m_; ++i) {
      if (rhs_(i) < 0.0) {
        row_sign_[i] = -1.0;
        rhs_(i) = -rhs_(i);
      }
    }
    columns_.resize(n_);
    AppendBlock(lp.eq_matrix, 0);
    AppendBlock(lp.ub_matrix, m_eq_);
    cost_.assign(lp.objective.begin(), lp.objective.end());
    // Slacks.
    slack_begin_ = n_;
    for (int i = 0; i < m_ub_; ++i) {
      const int row = m_eq_ + i;
      columns_.push_back({{row, row_sign_[row]}});
      cost_.push_back(0.0);
    }
    // Initial basis: a slack with +1 where available, otherwise an artificial.
    art_begin_ = static_cast<int>(columns_.size());
    basis_.assign(m_, -1);
    for (int i = 0; i < m_ub_; ++i) {
      const int row = m_eq_ + i;
      if (row_sign_[row] > 0.0) basis_[row] = slack_begin_ + i;
    }
    for (int row = 0; row < m_; ++row) {
      if (basis_[row] >= 0) continue;
      basis_[row] = static_cast<int>(columns_.size());
      columns_.push_back({{row, 1.0}});
      cost_.push_back(0.0);
    }
    total_ = static_cast<int>(columns_.size());
    is_basic_.assign(total_, -1);
    for (int row = 0; row < m_; ++row) is_basic_[basis_[row]] = row;
  }

  LpSolution Run() {
    LpSolution out;
    if (!Refactor()) return Fail("initial basis is singular");
    if (total_ > art_begin_) {
      std::vector<double> phase1(total_, 0.0);
      for (int j = art_begin_; j < total_; ++j) phase1[j] = 1.0;
      const LpStatus s = Iterate(phase1, /*allow_artificial=*/true);
      if (s == LpStatus::kSolverError) return Fail(message_);
      double infeasibility = 0.0;
      for (int row = 0; row < m_; ++row) {
        if (basis_[row] >= art_begin_) infeasibility += std::max(0.0, x_(row));
      }
      const double scale = 1.0 + rhs_.cwiseAbs().maxCoeff();
      if (infeasibility > tol_.feasibility * scale) {
        out.status = LpStatus::kInfeasible;
        out.iterations = iterations_;
        out.message = "phase 1 ended with positive artificial sum";
        return out;
      }
      DriveOutArtificials();
    }
    const LpStatus s = Iterate(cost_, /*allow_artificial=*/false);
    if (s != LpStatus::kOptimal) {
      out.status = s;
      out.iterations = iterations_;
      out.message = s == LpStatus::kUnbounded ? "objective unbounded below" : message_;
      return out;
    }
    if (!Refactor()) return Fail("final basis is singular");
    return Extract();
  }

 private:
  void AppendBlock(const SparseMatrix& block, int row_offset) {
    for (Eigen::Index c = 0; c < block.outerSize(); ++c) {
      for (SparseMatrix::InnerIterator it(block, c); it; ++it) {
        const int row = row_offset + static_cast<int>(it.row());
        if (it.value() != 0.0) {
          columns_[static_cast<std::size_t>(c)].push_back({row, it.value() * row_sign_[row]});
        }
      }
    }
  }

  LpSolution Fail(std::string why) const {
    LpSolution out;
    out.status = LpStatus::kSolverError;
    out.iterations = iterations_;
    out.message = std::move(why);
    return out;
  }

  bool Refactor() {
    if (m_ == 0) {
      x_.resize(0);
      return true;
    }
    std::vector<Triplet> entries;
    for (int row = 0; row < m_; ++row) {
      for (const Entry& e : columns_[basis_[row]]) entries.emplace_back(e.row, row, e.value);
    }
    SparseMatrix b(m_, m_);
    b.setFromTriplets(entries.begin(), entries.end());
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(b);
    if (lu.info() != Eigen::Success) return false;
    binv_ = lu.solve(Eigen::MatrixXd::Identity(m_, m_));
    if (lu.info() != Eigen::Success || !binv_.allFinite()) return false;
    x_ = binv_ * rhs_;
    for (int row = 0; row < m_; ++row) {
      if (x_(row) < 0.0 && x_(row) > -tol_.feasibility) x_(row) = 0.0;
    }
    since_refactor_ = 0;
    return true;
  }

  Eigen::VectorXd Ftran(int col) const {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(m_);
    for (const Entry& e : columns_[col]) d += e.value * binv_.col(e.row);
    return d;
  }

  double Reduced(const std::vector<double>& c, const Eigen::VectorXd& y, int col) const {
    double r = c[col];
    for (const Entry& e : columns_[col]) r -= y(e.row) * e.value;
    return r;
  }

  Eigen::VectorXd Duals(const std::vector<double>& c) const {
    Eigen::VectorXd cb(m_);
    for (int row = 0; row < m_; ++row) cb(row) = c[basis_[row]];
    return binv_.transpose() * cb;
  }

  void Pivot(int row, int entering, const Eigen::VectorXd& d, double theta) {
    x_ -= theta * d;
    x_(row) = theta;
    const Eigen::RowVectorXd pivot_row = binv_.row(row) / d(row);
    binv_.noalias() -= d * pivot_row;
    binv_.row(row) = pivot_row;
    is_basic_[basis_[row]] = -1;
    basis_[row] = entering;
    is_basic_[entering] = row;
    ++iterations_;
    ++since_refactor_;
  }

  LpStatus Iterate(const std::vector<double>& c, bool allow_artificial) {
    const int limit = allow_artificial ? total_ : art_begin_;
    int degenerate_run = 0;
    while (true) {
      if (iterations_ >= tol_.max_iterations) {
        message_ = "iteration limit reached";
        return LpStatus::kSolverError;
      }
      if (since_refactor_ >= kRefactorInterval && !Refactor()) {
        message_ = "basis became singular";
        return LpStatus::kSolverError;
      }
      const Eigen::VectorXd y = Duals(c);
      const bool bland = degenerate_run >= kDegenerateLimit;
      int entering = -1;
      double best = -tol_.dual;
      for (int j = 0; j < limit; ++j) {
        if (is_basic_[j] >= 0) continue;
        const double r = Reduced(c, y, j);
        if (bland) {
          if (r < -tol_.dual) {
            entering = j;
            break;
          }
        } else if (r < best) {
          best = r;
          entering = j;
        }
      }
      if (entering < 0) return LpStatus::kOptimal;

      const Eigen::VectorXd d = Ftran(entering);
      int leave = -1;
      if (bland) {
        double min_ratio = kInfinity;
        for (int row = 0; row < m_; ++row) {
          if (d(row) <= kPivotTolerance) continue;
          min_ratio = std::min(min_ratio, std::max(0.0, x_(row)) / d(row));
        }
        for (int row = 0; row < m_; ++row) {
          if (d(row) <= kPivotTolerance) continue;
          if (std::max(0.0, x_(row)) / d(row) > min_ratio + 1e-12) continue;
          if (leave < 0 || basis_[row] < basis_[leave]) leave = row;
        }
      } else {
        // Harris two-pass ratio test.
        double bound = kInfinity;
        for (int row = 0; row < m_; ++row) {
          if (d(row) <= kPivotTolerance) continue;
          bound = std::min(bound, (std::max(0.0, x_(row)) + tol_.feasibility) / d(row));
        }
        double largest = 0.0;
        for (int row = 0; row < m_; ++row) {
          if (d(row) <= kPivotTolerance) continue;
          if (std::max(0.0, x_(row)) / d(row) <= bound && d(row) > largest) {
            largest = d(row);
            leave = row;
          }
        }
      }
      if (leave < 0) {
        if (allow_artificial) {
          message_ = "phase 1 unbounded";
          return LpStatus::kSolverError;
        }
        return LpStatus::kUnbounded;
      }
      const double theta = std::max(0.0, x_(leave)) / d(leave);
      degenerate_run = theta <= 1e-12 ? degenerate_run + 1 : 0;
      Pivot(leave, entering, d, theta);
      for (int row = 0; row < m_; ++row) {
        if (x_(row) < 0.0 && x_(row) > -tol_.feasibility) x_(row) = 0.0;
      }
    }
  }

  // Replaces zero-level basic artificials by structural or slack columns.
  // Rows where no replacement exists are redundant and keep their artificial
  // at zero for the rest of the solve.
  void DriveOutArtificials() {
    for (int row = 0; row < m_; ++row) {
      if (basis_[row] < art_begin_) continue;
      const Eigen::RowVectorXd r = binv_.row(row);
      int best = -1;
      double best_abs = 1e-7;
      for (int j = 0; j < art_begin_; ++j) {
        if (is_basic_[j] >= 0) continue;
        double v = 0.0;
        for (const Entry& e : columns_[j]) v += r(e.row) * e.value;
        if (std::abs(v) > best_abs) {
          best_abs = std::abs(v);
          best = j;
        }
      }
      if (best < 0) continue;
      const Eigen::VectorXd d = Ftran(best);
      const double theta = x_(row) / d(row);
      Pivot(row, best, d, theta);
    }
    Refactor();
  }

  LpSolution Extract() const {
    LpSolution out;
    out.status = LpStatus::kOptimal;
    out.iterations = iterations_;
    out.primal.assign(n_, 0.0);
    for (int row = 0; row < m_; ++row) {
      const int j = basis_[row];
      if (j < n_) out.primal[j] = std::max(0.0, x_(row));
    }
    const Eigen::VectorXd y = m_ > 0 ? Duals(cost_) : Eigen::VectorXd();
    out.eq_duals.resize(m_eq_);
    out.ub_duals.resize(m_ub_);
    for (int i = 0; i < m_eq_; ++i) out.eq_duals[i] = y(i) * row_sign_[i];
    for (int i = 0; i < m_ub_; ++i) {
      const double u = -y(m_eq_ + i) * row_sign_[m_eq_ + i];
      // Rounding noise around zero is reported as exact zero.
      out.ub_duals[i] = std::abs(u) < 1e-13 ? 0.0 : u;
    }
    out.reduced_costs.resize(n_);
    double objective = 0.0;
    for (int j = 0; j < n_; ++j) {
      double r = lp_.objective[j];
      for (const Entry& e : columns_[j]) r -= y(e.row) * e.value;
      out.reduced_costs[j] = r;
      objective += lp_.objective[j] * out.primal[j];
    }
    out.objective = objective;
    return out;
  }

  const LinearProgram& lp_;
  const LpTolerances tol_;
  int n_ = 0;
  int m_eq_ = 0;
  int m_ub_ = 0;
  int m_ = 0;
  int slack_begin_ = 0;
  int art_begin_ = 0;
  int total_ = 0;
  Eigen::VectorXd rhs_;
  std::vector<double> row_sign_;
  std::vector<std::vector<Entry>> columns_;
  std::vector<double> cost_;
  std::vector<int> basis_;
  std::vector<int> is_basic_;
  Eigen::MatrixXd binv_;
  Eigen::VectorXd x_;
  int iterations_ = 0;
  int since_refactor_ = 0;
  std::string message_;
};

}  // namespace

LpSolution Solve(const LinearProgram& lp, const LpTolerances& tolerances) {
  lp.Validate();
  if (lp.num_eq() + lp.num_ub() == 0) {
    LpSolution out;
    out.primal.assign(lp.num_variables(), 0.0);
    out.reduced_costs = lp.objective;
    const bool bounded = std::all_of(lp.objective.begin(), lp.objective.end(),
                                     [](double c) { return c >= 0.0; });
    out.status = bounded ? LpStatus::kOptimal : LpStatus::kUnbounded;
    return out;
  }
  Simplex simplex(lp, tolerances);
  return simplex.Run();
}

double KktReport::MaxViolation() const {
  return std::max({primal_feasibility, dual_feasibility, complementary_slackness,
                   duality_gap});
}

bool KktReport::Satisfied(double tol) const { return MaxViolation() <= tol; }

KktReport VerifyKkt(const LinearProgram& lp, const LpSolution& solution) {
  constexpr double kInfinity = std::numeric_limits<double>::infinity();
  KktReport report;
  const std::size_t n = lp.num_variables();
  if (solution.primal.size() != n || solution.eq_duals.size() != lp.num_eq() ||
      solution.ub_duals.size() != lp.num_ub()) {
    report.primal_feasibility = kInfinity;
    report.dual_feasibility = kInfinity;
    report.complementary_slackness = kInfinity;
    report.duality_gap = kInfinity;
    return report;
  }
  const Eigen::Map<const Eigen::VectorXd> x(solution.primal.data(),
                                            static_cast<Eigen::Index>(n));
  const Eigen::Map<const Eigen::VectorXd> c(lp.objective.data(),
                                            static_cast<Eigen::Index>(n));
  const Eigen::Map<const Eigen::VectorXd> pi(solution.eq_duals.data(),
                                             static_cast<Eigen::Index>(lp.num_eq()));
  const Eigen::Map<const Eigen::VectorXd> u(solution.ub_duals.data(),
                                            static_cast<Eigen::Index>(lp.num_ub()));
  const Eigen::Map<const Eigen::VectorXd> b_eq(lp.eq_rhs.data(),
                                               static_cast<Eigen::Index>(lp.num_eq()));
  const Eigen::Map<const Eigen::VectorXd> b_ub(lp.ub_rhs.data(),
                                               static_cast<Eigen::Index>(lp.num_ub()));

  double primal = 0.0;
  if (n > 0) primal = std::max(primal, (-x).maxCoeff());
  Eigen::VectorXd reduced = c;
  Eigen::VectorXd slack;
  if (lp.num_eq() > 0) {
    primal = std::max(primal, (lp.eq_matrix * x - b_eq).cwiseAbs().maxCoeff());
    reduced -= lp.eq_matrix.transpose() * pi;
  }
  if (lp.num_ub() > 0) {
    slack = b_ub - lp.ub_matrix * x;
    primal = std::max(primal, (-slack).maxCoeff());
    reduced += lp.ub_matrix.transpose() * u;
  }
  report.primal_feasibility = std::max(0.0, primal);

  double dual = 0.0;
  if (n > 0) dual = std::max(dual, (-reduced).maxCoeff());
  if (lp.num_ub() > 0) dual = std::max(dual, (-u).maxCoeff());
  report.dual_feasibility = std::max(0.0, dual);

  double cs = 0.0;
  if (n > 0) cs = std::max(cs, x.cwiseProduct(reduced).cwiseAbs().maxCoeff());
  if (lp.num_ub() > 0) cs = std::max(cs, slack.cwiseProduct(u).cwiseAbs().maxCoeff());
  report.complementary_slackness = cs;

  report.primal_objective = n > 0 ? c.dot(x) : 0.0;
  report.dual_objective = (lp.num_eq() > 0 ? b_eq.dot(pi) : 0.0) -
                          (lp.num_ub() > 0 ? b_ub.dot(u) : 0.0);
  report.duality_gap = std::abs(report.primal_objective - report.dual_objective) /
                       (1.0 + std::abs(report.primal_objective));
  return report;
}

}  // namespace tokenflow
