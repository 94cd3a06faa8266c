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

#include "ftt/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ftt/error.hpp"

namespace ftt {
namespace {

void RequireBeta(double beta) {
  Require(std::isfinite(beta) && beta >= 1.0, ErrorCode::kOutOfRange,
          "beta must be >= 1, got " + std::to_string(beta));
}

void RequireParticipation(double p) {
  Require(std::isfinite(p) && p >= 0.0 && p <= 1.0, ErrorCode::kOutOfRange,
          "participation must lie in [0, 1], got " + std::to_string(p));
}

}  // namespace

PigouSolution PigouUe(const PigouInstance& instance) {
  RequireBeta(instance.beta);
  return {0.0, 1.0, 1.0};
}

PigouSolution PigouSo(const PigouInstance& instance) {
  RequireBeta(instance.beta);
  // Stationary point of (1 - x) + x^(beta+1).
  const double x = std::pow(instance.beta + 1.0, -1.0 / instance.beta);
  return {1.0 - x, x, (1.0 - x) + std::pow(x, instance.beta + 1.0)};
}

RotationSchedule::RotationSchedule(std::size_t groups, std::size_t days,
                                   std::vector<std::uint8_t> entries,
                                   std::vector<double> shares)
    : groups_(groups), days_(days), entries_(std::move(entries)), shares_(std::move(shares)) {
  Require(entries_.size() == groups_ * days_, ErrorCode::kDimensionMismatch,
          "schedule has " + std::to_string(entries_.size()) + " entries, expected " +
              std::to_string(groups_ * days_));
  Require(shares_.size() == groups_, ErrorCode::kDimensionMismatch,
          "schedule has " + std::to_string(shares_.size()) + " shares for " +
              std::to_string(groups_) + " groups");
  for (std::uint8_t e : entries_) {
    Require(e == 0 || e == 1, ErrorCode::kInvalidArgument,
            "schedule entries must be 0 or 1");
  }
  for (double s : shares_) {
    Require(std::isfinite(s) && s >= 0.0, ErrorCode::kInvalidArgument,
            "group shares must be >= 0");
  }
  const double p = participation();
  Require(p <= 1.0 + 1e-12, ErrorCode::kInvalidArgument,
          "group shares sum to " + std::to_string(p) + " > 1");
}

RotationSchedule RotationSchedule::Alternating(std::size_t days, double participation) {
  RequireParticipation(participation);
  std::vector<std::uint8_t> entries(2 * days);
  for (std::size_t d = 0; d < days; ++d) {
    entries[d] = d % 2 == 0 ? 1 : 0;
    entries[days + d] = d % 2 == 0 ? 0 : 1;
  }
  return RotationSchedule(2, days, std::move(entries),
                          {participation / 2.0, participation / 2.0});
}

double RotationSchedule::participation() const {
  return std::accumulate(shares_.begin(), shares_.end(), 0.0);
}

Eigen::MatrixXd DayFlows(const RotationSchedule& schedule,
                         const Eigen::MatrixXd& so_flows,
                         const Eigen::MatrixXd& ue_flows) {
  const auto groups = static_cast<Eigen::Index>(schedule.groups());
  Require(so_flows.rows() == groups && ue_flows.rows() == groups &&
              so_flows.cols() == ue_flows.cols(),
          ErrorCode::kDimensionMismatch,
          "SO/UE flow matrices must both be groups x routes");
  Eigen::MatrixXd result =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(schedule.days()), so_flows.cols());
  for (std::size_t d = 0; d < schedule.days(); ++d) {
    for (std::size_t i = 0; i < schedule.groups(); ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      result.row(static_cast<Eigen::Index>(d)) +=
          schedule.so(i, d) ? so_flows.row(row) : ue_flows.row(row);
    }
  }
  return result;
}

RotationOutcome SimulateRotation(double participation, double beta) {
  RequireParticipation(participation);
  RequireBeta(beta);
  const double p = participation;
  // Groups P1, P2, NP. Route a is the SO role, route b the UE role.
  const std::array<double, 3> shares = {p / 2.0, p / 2.0, 1.0 - p};
  const RotationSchedule schedule(3, 2, {1, 0, 0, 1, 0, 0},
                                  {shares[0], shares[1], shares[2]});
  Eigen::MatrixXd so = Eigen::MatrixXd::Zero(3, 2);
  Eigen::MatrixXd ue = Eigen::MatrixXd::Zero(3, 2);
  for (int i = 0; i < 3; ++i) {
    so(i, 0) = shares[static_cast<std::size_t>(i)];
    ue(i, 1) = shares[static_cast<std::size_t>(i)];
  }
  const Eigen::MatrixXd flows = DayFlows(schedule, so, ue);

  RotationOutcome outcome;
  outcome.participation = p;
  outcome.beta = beta;
  std::array<double, 3> mean_time{};
  for (std::size_t d = 0; d < 2; ++d) {
    const auto day = static_cast<Eigen::Index>(d);
    const double time_a = 1.0;
    const double time_b = std::pow(flows(day, 1), beta);
    for (std::size_t i = 0; i < 3; ++i) {
      GroupDay& cell = outcome.cube[d][i];
      cell.route = schedule.so(i, d) ? Route::kA : Route::kB;
      cell.flow = cell.route == Route::kA ? flows(day, 0) : flows(day, 1);
      cell.time = cell.route == Route::kA ? time_a : time_b;
      mean_time[i] += cell.time / 2.0;
    }
  }
  // The subgroups carry equal shares, so the participant mean is their
  // plain average; this stays defined at p = 0.
  outcome.mean_time_participants = (mean_time[0] + mean_time[1]) / 2.0;
  outcome.mean_time_nonparticipants = mean_time[2];
  outcome.system_cost =
      shares[0] * mean_time[0] + shares[1] * mean_time[1] + shares[2] * mean_time[2];
  outcome.delta = 1.0 - outcome.system_cost;
  outcome.delta_approx = beta * p / 2.0;
  outcome.poa = outcome.system_cost / PigouSo({beta}).mean_cost;
  return outcome;
}

RotationOutcome EvaluateRotation(double participation, double beta) {
  RotationOutcome outcome = SimulateRotation(participation, beta);
  const double p = participation;
  const double loaded = 1.0 - p / 2.0;
  outcome.mean_time_participants = (1.0 + std::pow(loaded, beta)) / 2.0;
  outcome.mean_time_nonparticipants = std::pow(loaded, beta);
  outcome.system_cost = p / 2.0 + std::pow(loaded, beta + 1.0);
  outcome.delta = 1.0 - outcome.system_cost;
  outcome.delta_approx = beta * p / 2.0;
  outcome.poa = outcome.system_cost / PigouSo({beta}).mean_cost;
  return outcome;
}

double PriceOfAnarchy(double participation, double beta) {
  return EvaluateRotation(participation, beta).poa;
}

ScheduleOutcome EvaluateSchedule(const RotationSchedule& schedule, double beta) {
  RequireBeta(beta);
  Require(schedule.days() > 0, ErrorCode::kInvalidArgument, "schedule has no days");
  const std::size_t groups = schedule.groups();
  const double p = std::min(1.0, schedule.participation());
  Eigen::MatrixXd so = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(groups), 2);
  Eigen::MatrixXd ue = so;
  for (std::size_t i = 0; i < groups; ++i) {
    so(static_cast<Eigen::Index>(i), 0) = schedule.shares()[i];
    ue(static_cast<Eigen::Index>(i), 1) = schedule.shares()[i];
  }
  const Eigen::MatrixXd flows = DayFlows(schedule, so, ue);

  ScheduleOutcome outcome;
  std::vector<double> group_time(groups, 0.0);
  double nonparticipant_time = 0.0;
  const double days = static_cast<double>(schedule.days());
  for (std::size_t d = 0; d < schedule.days(); ++d) {
    const auto day = static_cast<Eigen::Index>(d);
    const double time_b = std::pow(flows(day, 1) + (1.0 - p), beta);
    outcome.daily_cost.push_back(flows(day, 0) + (flows(day, 1) + (1.0 - p)) * time_b);
    for (std::size_t i = 0; i < groups; ++i) {
      group_time[i] += (schedule.so(i, d) ? 1.0 : time_b) / days;
    }
    nonparticipant_time += time_b / days;
  }
  if (p > 0.0) {
    for (std::size_t i = 0; i < groups; ++i) {
      outcome.mean_time_participants += schedule.shares()[i] * group_time[i] / p;
    }
  } else if (groups > 0) {
    outcome.mean_time_participants =
        std::accumulate(group_time.begin(), group_time.end(), 0.0) /
        static_cast<double>(groups);
  }
  outcome.mean_time_nonparticipants = nonparticipant_time;
  outcome.system_cost =
      std::accumulate(outcome.daily_cost.begin(), outcome.daily_cost.end(), 0.0) / days;
  return outcome;
}

ParetoCheck CheckPareto(double participation, double beta) {
  const RotationOutcome outcome = EvaluateRotation(participation, beta);
  const double worst = std::max(outcome.mean_time_participants,
                                outcome.mean_time_nonparticipants);
  return {worst < 1.0, 1.0 - worst};
}

}  // namespace ftt
