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

#include "ftt/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ftt/error.hpp"

namespace ftt {
namespace {

void RequireNonNegative(std::span<const double> values, ErrorCode code,
                        const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    Require(std::isfinite(values[i]) && values[i] >= 0.0, code,
            std::string(what) + "[" + std::to_string(i) +
                "] must be finite and >= 0");
  }
}

}  // namespace

BprParams BprParams::FromNetwork(const Network& network) {
  BprParams params;
  for (const Link& link : network.links()) {
    params.free_flow_time.push_back(link.free_flow_time);
    params.capacity.push_back(link.capacity);
    params.alpha.push_back(link.bpr_alpha);
    params.beta.push_back(link.bpr_beta);
  }
  return params;
}

BprParams BprParams::Constant(std::vector<double> times) {
  BprParams params;
  const std::size_t n = times.size();
  params.free_flow_time = std::move(times);
  params.capacity.assign(n, 1.0);
  params.alpha.assign(n, 0.0);
  params.beta.assign(n, 1.0);
  return params;
}

BprParams BprParams::Marginal() const {
  BprParams marginal = *this;
  for (std::size_t l = 0; l < size(); ++l) {
    marginal.alpha[l] = alpha[l] * (1.0 + beta[l]);
  }
  return marginal;
}

FlowState ForwardFlows(const IncidenceSet& incidence,
                       std::span<const double> od_flows) {
  Require(od_flows.size() == incidence.od_count(), ErrorCode::kDimensionMismatch,
          "f_OD has " + std::to_string(od_flows.size()) + " entries, B has " +
              std::to_string(incidence.od_count()) + " rows");
  RequireNonNegative(od_flows, ErrorCode::kNegativeDemand, "f_OD");
  FlowState state;
  state.od.assign(od_flows.begin(), od_flows.end());
  state.path = incidence.od_path.MultiplyTranspose(od_flows);
  state.link = incidence.path_link.MultiplyTranspose(state.path);
  return state;
}

std::vector<double> Bpr(std::span<const double> link_flows,
                        const BprParams& params) {
  Require(link_flows.size() == params.size(), ErrorCode::kDimensionMismatch,
          "f_L has " + std::to_string(link_flows.size()) + " entries, " +
              std::to_string(params.size()) + " links parameterized");
  std::vector<double> times(link_flows.size());
  for (std::size_t l = 0; l < link_flows.size(); ++l) {
    const double ratio = link_flows[l] / params.capacity[l];
    times[l] = params.free_flow_time[l] *
               (1.0 + params.alpha[l] * std::pow(ratio, params.beta[l]));
  }
  return times;
}

std::pair<std::vector<double>, std::vector<double>> BackwardTimes(
    const IncidenceSet& incidence, std::span<const double> link_times) {
  Require(link_times.size() == incidence.link_count(),
          ErrorCode::kDimensionMismatch,
          "t_L has " + std::to_string(link_times.size()) + " entries, A has " +
              std::to_string(incidence.link_count()) + " columns");
  std::vector<double> path_times = incidence.path_link.Multiply(link_times);
  std::vector<double> od_times = incidence.od_path.Multiply(path_times);
  return {std::move(path_times), std::move(od_times)};
}

std::vector<double> OdTimeFlowWeighted(std::span<const double> path_flows,
                                       std::span<const double> path_times,
                                       std::span<const double> od_flows,
                                       const IncidenceSet& incidence) {
  Require(path_flows.size() == incidence.path_count() &&
              path_times.size() == incidence.path_count() &&
              od_flows.size() == incidence.od_count(),
          ErrorCode::kDimensionMismatch, "flow/time vectors disagree with B");
  std::vector<double> od_times(incidence.od_count(), 0.0);
  for (std::size_t od = 0; od < incidence.od_count(); ++od) {
    const auto paths = incidence.paths_of(od);
    Require(!paths.empty(), ErrorCode::kNoPathForOD,
            "OD " + std::to_string(od) + " has no path");
    if (od_flows[od] > 0.0) {
      double weighted = 0.0;
      for (std::size_t p : paths) weighted += path_flows[p] * path_times[p];
      od_times[od] = weighted / od_flows[od];
    } else {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t p : paths) best = std::min(best, path_times[p]);
      od_times[od] = best;
    }
  }
  return od_times;
}

SparseMatrix LogitChoice(std::span<const double> path_times, double theta,
                         const SparseMatrix& support) {
  Require(path_times.size() == support.cols(), ErrorCode::kDimensionMismatch,
          "t_P has " + std::to_string(path_times.size()) + " entries, B^I has " +
              std::to_string(support.cols()) + " columns");
  Require(std::isfinite(theta) && theta >= 0.0, ErrorCode::kInvalidArgument,
          "logit theta must be finite and >= 0");
  std::vector<Triplet> entries;
  for (std::size_t od = 0; od < support.rows(); ++od) {
    const auto paths = support.row_indices(od);
    if (paths.empty()) continue;
    double shortest = std::numeric_limits<double>::infinity();
    for (std::size_t p : paths) shortest = std::min(shortest, path_times[p]);
    std::vector<double> weights;
    double total = 0.0;
    for (std::size_t p : paths) {
      weights.push_back(std::exp(-theta * (path_times[p] - shortest)));
      total += weights.back();
    }
    for (std::size_t k = 0; k < paths.size(); ++k) {
      entries.push_back({od, paths[k], weights[k] / total});
    }
  }
  return SparseMatrix::FromTriplets(support.rows(), support.cols(),
                                    std::move(entries));
}

std::pair<FlowState, TimeState> FullChain(std::span<const double> od_flows,
                                          const IncidenceSet& incidence,
                                          const BprParams& params) {
  FlowState flows = ForwardFlows(incidence, od_flows);
  TimeState times;
  times.link = Bpr(flows.link, params);
  auto [path_times, od_times] = BackwardTimes(incidence, times.link);
  times.path = std::move(path_times);
  times.od = std::move(od_times);
  return {std::move(flows), std::move(times)};
}

}  // namespace ftt
