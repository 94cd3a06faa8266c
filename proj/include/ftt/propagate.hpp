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

// The layered flow/time graph:
//
//   f_OD --B^T--> f_P --A^T--> f_L --bpr--> t_L --A--> t_P --B--> t_OD

#ifndef FTT_PROPAGATE_HPP_
#define FTT_PROPAGATE_HPP_

#include <span>
#include <utility>
#include <vector>

#include "ftt/network.hpp"

namespace ftt {

struct FlowState {
  std::vector<double> od;    // f_OD
  std::vector<double> path;  // f_P
  std::vector<double> link;  // f_L
};

struct TimeState {
  std::vector<double> link;  // t_L
  std::vector<double> path;  // t_P
  std::vector<double> od;    // t_OD
};

// Per-link volume-delay parameters, t = t0 (1 + alpha (f / C)^beta).
struct BprParams {
  std::vector<double> free_flow_time;
  std::vector<double> capacity;
  std::vector<double> alpha;
  std::vector<double> beta;

  std::size_t size() const { return free_flow_time.size(); }

  static BprParams FromNetwork(const Network& network);
  // Constant-time links, t_L = t0 for every flow.
  static BprParams Constant(std::vector<double> times);
  // Parameters whose BPR curve is the marginal cost t + f t'(f) of *this:
  // alpha scales by (1 + beta). Its Beckmann integral is f t(f).
  BprParams Marginal() const;
};

FlowState ForwardFlows(const IncidenceSet& incidence,
                       std::span<const double> od_flows);

std::vector<double> Bpr(std::span<const double> link_flows,
                        const BprParams& params);

// Returns (t_P, t_OD).
std::pair<std::vector<double>, std::vector<double>> BackwardTimes(
    const IncidenceSet& incidence, std::span<const double> link_times);

// Realized OD time sum_p f_p t_p / f_od; zero-demand ODs take the minimum
// time over their paths.
std::vector<double> OdTimeFlowWeighted(std::span<const double> path_flows,
                                       std::span<const double> path_times,
                                       std::span<const double> od_flows,
                                       const IncidenceSet& incidence);

// Logit split exp(-theta t_p) over each OD's paths in `support`. Rows with
// no paths stay empty.
SparseMatrix LogitChoice(std::span<const double> path_times, double theta,
                         const SparseMatrix& support);

std::pair<FlowState, TimeState> FullChain(std::span<const double> od_flows,
                                          const IncidenceSet& incidence,
                                          const BprParams& params);

}  // namespace ftt

#endif  // FTT_PROPAGATE_HPP_
