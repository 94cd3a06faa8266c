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

// Multi-day rotation on the Pigou network: route a has constant time 1,
// route b has time x^beta, total demand 1. A share p of travelers rotates
// in two equal subgroups between the routes on alternating days; everybody
// else stays on route b.

#ifndef FTT_ROTATION_HPP_
#define FTT_ROTATION_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ftt {

struct PigouInstance {
  double beta = 1.0;
};

struct PigouSolution {
  double route_a_flow = 0.0;
  double route_b_flow = 0.0;
  double mean_cost = 0.0;
};

PigouSolution PigouUe(const PigouInstance& instance);
// x_b = (beta + 1)^(-1/beta).
PigouSolution PigouSo(const PigouInstance& instance);

// Groups x days, entries 0 (UE behaviour) or 1 (SO behaviour).
class RotationSchedule {
 public:
  RotationSchedule(std::size_t groups, std::size_t days,
                   std::vector<std::uint8_t> entries,
                   std::vector<double> shares);

  // Two groups alternating from day 1: R_1 = (1,0,1,0,...), R_2 = (0,1,0,1,...).
  static RotationSchedule Alternating(std::size_t days, double participation);

  std::size_t groups() const { return groups_; }
  std::size_t days() const { return days_; }
  bool so(std::size_t group, std::size_t day) const {
    return entries_[group * days_ + day] != 0;
  }
  const std::vector<double>& shares() const { return shares_; }
  double participation() const;

 private:
  std::size_t groups_;
  std::size_t days_;
  std::vector<std::uint8_t> entries_;
  std::vector<double> shares_;
};

// x^(d) = sum_i R_{i,d} x^SO_i + (1 - R_{i,d}) x^UE_i. The flow matrices
// are groups x routes; the result is days x routes.
Eigen::MatrixXd DayFlows(const RotationSchedule& schedule,
                         const Eigen::MatrixXd& so_flows,
                         const Eigen::MatrixXd& ue_flows);

enum class Route : std::uint8_t { kA, kB };

struct GroupDay {
  Route route = Route::kB;
  double flow = 0.0;  // total flow on the chosen route that day
  double time = 0.0;
};

struct RotationOutcome {
  double participation = 0.0;
  double beta = 1.0;
  // cube[day][group], groups ordered P1, P2, NP.
  std::array<std::array<GroupDay, 3>, 2> cube{};
  double mean_time_participants = 0.0;
  double mean_time_nonparticipants = 0.0;
  double system_cost = 0.0;
  double delta = 0.0;         // 1 - system_cost
  double delta_approx = 0.0;  // beta p / 2
  double poa = 0.0;           // system_cost / SO mean cost
};

// Two-day simulation of the rotation through DayFlows.
RotationOutcome SimulateRotation(double participation, double beta);

// Closed forms:
//   t_P = (1 + (1 - p/2)^beta) / 2,  t_NP = (1 - p/2)^beta,
//   system cost = p/2 + (1 - p/2)^(beta + 1).
// The scalar fields use the closed forms, the cube comes from
// SimulateRotation. Throws kOutOfRange unless 0 <= p <= 1 and beta >= 1.
RotationOutcome EvaluateRotation(double participation, double beta);

double PriceOfAnarchy(double participation, double beta);

// Any schedule on the Pigou network: group i sends shares()[i] to route a
// on its SO days and to route b otherwise; the remaining 1 - p stays on
// route b. Participant times are share-weighted (plain averages when every
// share is zero).
struct ScheduleOutcome {
  double mean_time_participants = 0.0;
  double mean_time_nonparticipants = 0.0;
  double system_cost = 0.0;           // mean over days
  std::vector<double> daily_cost;     // per day
};

ScheduleOutcome EvaluateSchedule(const RotationSchedule& schedule, double beta);

struct ParetoCheck {
  bool improves = false;
  double margin = 0.0;  // 1 - max(t_P, t_NP)
};

ParetoCheck CheckPareto(double participation, double beta);

}  // namespace ftt

#endif  // FTT_ROTATION_HPP_
