// Copyright 2026 The FTT Authors
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
#include <vector>

#include "doctest.h"
#include "ftt/error.hpp"
#include "ftt/rotation.hpp"

using namespace ftt;

namespace {

// Pigou system cost (1 - x) + x^(beta + 1) minimized by ternary search.
double SoCostSearch(double beta) {
  double lo = 0.0, hi = 1.0;
  const auto cost = [beta](double x) { return (1.0 - x) + std::pow(x, beta + 1.0); };
  for (int k = 0; k < 300; ++k) {
    const double a = lo + (hi - lo) / 3.0, b = hi - (hi - lo) / 3.0;
    (cost(a) < cost(b) ? hi : lo) = cost(a) < cost(b) ? b : a;
  }
  return cost(0.5 * (lo + hi));
}

}  // namespace

TEST_CASE("Pigou UE and SO") {
  CHECK(PigouUe({1.0}).mean_cost == 1.0);
  CHECK(PigouUe({4.0}).mean_cost == 1.0);
  const PigouSolution so = PigouSo({1.0});
  CHECK(so.route_b_flow == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(so.mean_cost == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(PigouUe({1.0}).mean_cost / so.mean_cost == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(PigouSo({2.0}).route_b_flow == doctest::Approx(0.5774).epsilon(1e-4));
  CHECK(PigouSo({2.0}).mean_cost == doctest::Approx(0.6151).epsilon(1e-4));
  double previous = 1.0;
  for (int beta = 1; beta <= 16; ++beta) {
    const double cost = PigouSo({static_cast<double>(beta)}).mean_cost;
    CHECK(cost == doctest::Approx(SoCostSearch(beta)).epsilon(1e-9));
    CHECK(cost < previous);
    previous = cost;
  }
}

TEST_CASE("day flows") {
  const Eigen::MatrixXd so = (Eigen::MatrixXd(2, 2) << 0.25, 0.0, 0.25, 0.0).finished();
  const Eigen::MatrixXd ue = (Eigen::MatrixXd(2, 2) << 0.0, 0.25, 0.0, 0.25).finished();
  const RotationSchedule none(2, 2, {0, 0, 0, 0}, {0.25, 0.25});
  const RotationSchedule all(2, 2, {1, 1, 1, 1}, {0.25, 0.25});
  for (Eigen::Index d = 0; d < 2; ++d) {
    CHECK(DayFlows(none, so, ue).row(d).isApprox(ue.colwise().sum()));
    CHECK(DayFlows(all, so, ue).row(d).isApprox(so.colwise().sum()));
  }
  CHECK_THROWS_AS(DayFlows(none, Eigen::MatrixXd::Zero(3, 2), ue), Error);
}

TEST_CASE("alternating schedule day-one flows") {
  const double p = 0.4;
  const RotationOutcome outcome = SimulateRotation(p, 1.0);
  // Day 1: group P1 on route a, P2 and non-participants on route b.
  CHECK(outcome.cube[0][0].route == Route::kA);
  CHECK(outcome.cube[0][0].flow == doctest::Approx(p / 2));
  CHECK(outcome.cube[0][1].flow == doctest::Approx(1 - p / 2));
  CHECK(outcome.cube[0][2].flow == doctest::Approx(1 - p / 2));
}

TEST_CASE("rotation outcomes") {
  const RotationOutcome none = EvaluateRotation(0.0, 2.0);
  CHECK(none.delta == 0.0);
  CHECK(none.mean_time_nonparticipants == 1.0);
  CHECK(none.system_cost == 1.0);

  CHECK(EvaluateRotation(1.0, 1.0).system_cost == doctest::Approx(0.75).epsilon(1e-15));

  const RotationOutcome small = EvaluateRotation(0.1, 1.0);
  CHECK(std::abs(small.system_cost - 0.9525) <= 1e-12);
  CHECK(std::abs(small.delta - 0.0475) <= 1e-12);
  CHECK(small.delta_approx == doctest::Approx(0.05));
  CHECK(std::abs(SimulateRotation(0.1, 1.0).system_cost - 0.9525) <= 1e-12);

  for (double p : {0.05, 0.3, 0.75, 1.0}) {
    for (double beta : {1.0, 2.5, 4.0}) {
      const RotationOutcome o = EvaluateRotation(p, beta);
      CHECK(std::abs(o.system_cost - (p * o.mean_time_participants +
                                      (1 - p) * o.mean_time_nonparticipants)) <= 1e-12);
    }
  }

  CHECK_THROWS_AS(EvaluateRotation(-0.1, 1.0), Error);
  CHECK_THROWS_AS(EvaluateRotation(0.5, 0.5), Error);
}

TEST_CASE("price of anarchy") {
  CHECK(PriceOfAnarchy(0.0, 1.0) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(PriceOfAnarchy(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(PriceOfAnarchy(0.0, 2.0) == doctest::Approx(1.0 / SoCostSearch(2.0)).epsilon(1e-9));
  CHECK(PriceOfAnarchy(0.0, 2.0) == doctest::Approx(1.6258).epsilon(1e-4));
}

TEST_CASE("Pareto check") {
  const ParetoCheck half = CheckPareto(0.5, 1.0);
  CHECK(half.improves);
  CHECK(EvaluateRotation(0.5, 1.0).mean_time_participants == doctest::Approx(0.875));
  CHECK(EvaluateRotation(0.5, 1.0).mean_time_nonparticipants == doctest::Approx(0.75));
  CHECK_FALSE(CheckPareto(0.0, 1.0).improves);
  for (int k = 1; k <= 20; ++k) {
    for (int beta = 1; beta <= 4; ++beta) CHECK(CheckPareto(0.05 * k, beta).improves);
  }
}

TEST_CASE("schedule evaluation") {
  SUBCASE("two alternating groups reproduce the closed forms") {
    for (double p : {0.1, 0.5, 1.0}) {
      for (double beta : {1.0, 3.0}) {
        const RotationSchedule schedule(2, 2, {1, 0, 0, 1}, {p / 2, p / 2});
        const ScheduleOutcome outcome = EvaluateSchedule(schedule, beta);
        const RotationOutcome closed = EvaluateRotation(p, beta);
        CHECK(std::abs(outcome.system_cost - closed.system_cost) <= 1e-12);
        CHECK(std::abs(outcome.mean_time_participants - closed.mean_time_participants) <= 1e-12);
        CHECK(std::abs(outcome.mean_time_nonparticipants - closed.mean_time_nonparticipants) <=
              1e-12);
        REQUIRE(outcome.daily_cost.size() == 2);
      }
    }
  }
  SUBCASE("everyone on route a every day") {
    const RotationSchedule schedule(1, 3, {1, 1, 1}, {1.0});
    const ScheduleOutcome outcome = EvaluateSchedule(schedule, 2.0);
    CHECK(outcome.system_cost == doctest::Approx(1.0));
    CHECK(outcome.mean_time_participants == doctest::Approx(1.0));
  }
  SUBCASE("invalid schedules") {
    CHECK_THROWS_AS(RotationSchedule(2, 2, {1, 0, 1}, {0.5, 0.5}), Error);
    CHECK_THROWS_AS(RotationSchedule(1, 1, {2}, {0.5}), Error);
    CHECK_THROWS_AS(RotationSchedule(2, 1, {1, 0}, {0.7, 0.7}), Error);
  }
}
