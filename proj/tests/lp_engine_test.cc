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

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "oracles.h"
#include "tokenflow/error.h"
#include "tokenflow/lp_engine.h"

namespace tokenflow {
namespace {

TEST_CASE("single equality") {
  LpBuilder b;
  const auto x = b.AddVariable(1.0, "x");
  const auto r = b.AddEqRow(5.0);
  b.SetEq(r, x, 1.0);
  const LinearProgram lp = b.Build();
  const LpSolution s = Solve(lp);
  REQUIRE(s.optimal());
  CHECK(s.primal[0] == doctest::Approx(5.0));
  CHECK(s.eq_duals[0] == doctest::Approx(1.0));
  CHECK(s.objective == doctest::Approx(5.0));
  const KktReport k = VerifyKkt(lp, s);
  CHECK(k.MaxViolation() == doctest::Approx(0.0));
}

TEST_CASE("slack upper bound has zero dual") {
  LpBuilder b;
  const auto x = b.AddVariable(2.0);
  b.SetEq(b.AddEqRow(3.0), x, 1.0);
  b.SetUb(b.AddUbRow(10.0), x, 1.0);
  const LpSolution s = Solve(b.Build());
  REQUIRE(s.optimal());
  CHECK(s.eq_duals[0] == doctest::Approx(2.0));
  CHECK(s.ub_duals[0] == doctest::Approx(0.0));
}

TEST_CASE("binding upper bound carries a positive multiplier") {
  // min x1 + 3 x2  s.t. x1 + x2 = 4, x1 <= 1.
  LpBuilder b;
  const auto x1 = b.AddVariable(1.0);
  const auto x2 = b.AddVariable(3.0);
  const auto e = b.AddEqRow(4.0);
  b.SetEq(e, x1, 1.0);
  b.SetEq(e, x2, 1.0);
  b.SetUb(b.AddUbRow(1.0), x1, 1.0);
  const LinearProgram lp = b.Build();
  const LpSolution s = Solve(lp);
  REQUIRE(s.optimal());
  CHECK(s.primal[0] == doctest::Approx(1.0));
  CHECK(s.primal[1] == doctest::Approx(3.0));
  CHECK(s.eq_duals[0] == doctest::Approx(3.0));
  CHECK(s.ub_duals[0] == doctest::Approx(2.0));
  CHECK(VerifyKkt(lp, s).Satisfied(1e-9));
}

TEST_CASE("perturbed dual is flagged") {
  LpBuilder b;
  const auto x = b.AddVariable(1.0);
  b.SetEq(b.AddEqRow(5.0), x, 1.0);
  const LinearProgram lp = b.Build();
  LpSolution s = Solve(lp);
  s.eq_duals[0] += 0.1;
  const KktReport k = VerifyKkt(lp, s);
  CHECK(std::max(k.dual_feasibility, k.duality_gap * 6.0) >= 0.09);
  CHECK_FALSE(k.Satisfied(1e-6));
}

TEST_CASE("infeasible and unbounded are classified") {
  SUBCASE("infeasible") {
    LpBuilder b;
    const auto x = b.AddVariable(1.0);
    b.SetEq(b.AddEqRow(5.0), x, 1.0);
    b.SetUb(b.AddUbRow(2.0), x, 1.0);
    CHECK(Solve(b.Build()).status == LpStatus::kInfeasible);
  }
  SUBCASE("unbounded") {
    LpBuilder b;
    const auto x = b.AddVariable(-1.0);
    const auto y = b.AddVariable(0.0);
    const auto r = b.AddEqRow(1.0);
    b.SetEq(r, x, 1.0);
    b.SetEq(r, y, -1.0);
    CHECK(Solve(b.Build()).status == LpStatus::kUnbounded);
  }
}

TEST_CASE("negative right-hand sides") {
  // min x  s.t. -x <= -2  (x >= 2), -x = -3 handled via sign flip.
  LpBuilder b;
  const auto x = b.AddVariable(1.0);
  b.SetUb(b.AddUbRow(-2.0), x, -1.0);
  const LinearProgram lp = b.Build();
  const LpSolution s = Solve(lp);
  REQUIRE(s.optimal());
  CHECK(s.primal[0] == doctest::Approx(2.0));
  CHECK(s.ub_duals[0] == doctest::Approx(1.0));
  CHECK(VerifyKkt(lp, s).Satisfied(1e-9));
}

TEST_CASE("redundant equality rows") {
  // Conservation on a triangle: the three balance rows sum to zero.
  LpBuilder b;
  const auto f01 = b.AddVariable(1.0);
  const auto f12 = b.AddVariable(1.0);
  const auto f02 = b.AddVariable(5.0);
  const auto r0 = b.AddEqRow(1.0);
  const auto r1 = b.AddEqRow(0.0);
  const auto r2 = b.AddEqRow(-1.0);
  b.SetEq(r0, f01, 1.0);
  b.SetEq(r1, f01, -1.0);
  b.SetEq(r1, f12, 1.0);
  b.SetEq(r2, f12, -1.0);
  b.SetEq(r0, f02, 1.0);
  b.SetEq(r2, f02, -1.0);
  const LinearProgram lp = b.Build();
  const LpSolution s = Solve(lp);
  REQUIRE(s.optimal());
  CHECK(s.objective == doctest::Approx(2.0));
  CHECK(VerifyKkt(lp, s).Satisfied(1e-9));
}

TEST_CASE("empty program") {
  LpBuilder b;
  b.AddVariable(1.0);
  const LpSolution s = Solve(b.Build());
  REQUIRE(s.optimal());
  CHECK(s.primal[0] == 0.0);
}

TEST_CASE("malformed program is rejected") {
  LinearProgram lp;
  lp.objective = {1.0, std::nan("")};
  CHECK_THROWS_AS(Solve(lp), Error);
}

LinearProgram RandomProgram(std::mt19937_64& rng, bool with_equality) {
  std::uniform_real_distribution<double> coef(0.1, 3.0);
  std::uniform_real_distribution<double> mixed(-2.0, 3.0);
  std::uniform_real_distribution<double> cost(-3.0, 3.0);
  std::uniform_real_distribution<double> rhs(1.0, 10.0);
  LpBuilder b;
  for (int j = 0; j < 4; ++j) b.AddVariable(cost(rng));
  int ub_rows = 3;
  if (with_equality) {
    const auto r = b.AddEqRow(rhs(rng));
    for (int j = 0; j < 4; ++j) b.SetEq(r, j, coef(rng));
    ub_rows = 2;
  }
  for (int i = 0; i < ub_rows; ++i) {
    const auto r = b.AddUbRow(with_equality ? mixed(rng) * 2.0 : rhs(rng));
    for (int j = 0; j < 4; ++j) b.SetUb(r, j, with_equality ? mixed(rng) : coef(rng));
  }
  return b.Build();
}

TEST_CASE("random programs match vertex enumeration") {
  std::mt19937_64 rng(20260417);
  int infeasible = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const bool with_equality = trial % 2 == 1;
    const LinearProgram lp = RandomProgram(rng, with_equality);
    const std::optional<double> oracle = testing::VertexEnumerationMinimum(lp);
    const LpSolution s = Solve(lp);
    CAPTURE(trial);
    if (!oracle) {
      CHECK(s.status == LpStatus::kInfeasible);
      ++infeasible;
      continue;
    }
    REQUIRE(s.optimal());
    CHECK(std::abs(s.objective - *oracle) <= 1e-8 * (1.0 + std::abs(*oracle)));
    const KktReport k = VerifyKkt(lp, s);
    CHECK(k.MaxViolation() <= 1e-7);
  }
  CHECK(infeasible < 200);
}

TEST_CASE("solve is deterministic") {
  std::mt19937_64 rng(7);
  const LinearProgram lp = RandomProgram(rng, true);
  const LpSolution a = Solve(lp);
  const LpSolution b = Solve(lp);
  CHECK(a.status == b.status);
  CHECK(a.objective == b.objective);
  CHECK(a.primal == b.primal);
  CHECK(a.eq_duals == b.eq_duals);
  CHECK(a.ub_duals == b.ub_duals);
}

}  // namespace
}  // namespace tokenflow
