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

// Static assignment on the flow/time graph.
//
// User equilibrium minimizes the Beckmann objective. The system optimum is
// the user equilibrium of the marginal-cost links t + f t'(f); for BPR this
// is another BPR curve (BprParams::Marginal), so both objectives share the
// same two algorithms:
//   * path-based gradient projection over a fixed PathSet;
//   * link-based Frank-Wolfe, which discovers its own paths.

#ifndef FTT_SOLVERS_HPP_
#define FTT_SOLVERS_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "ftt/network.hpp"
#include "ftt/propagate.hpp"

namespace ftt {

enum class StepRule {
  kFixed,        // shift step * (t_p - t_min)
  kDiminishing,  // step_k = s0 / k, s0 = 1 / max_l (d_l + eps) unless given
  kLineSearch,   // Newton-scaled shift with an exact per-OD line search
};

enum class AssignmentObjective { kUserEquilibrium, kSystemOptimum };

struct SolverConfig {
  int max_iterations = 1000;
  double gap_tolerance = 1e-4;
  StepRule step_rule = StepRule::kLineSearch;
  double step_size = 0.0;  // s for kFixed, s0 for kDiminishing (0 = auto)
  std::uint64_t seed = 0;  // recorded only; the solvers are deterministic
};

struct AssignmentResult {
  PathSet paths;
  IncidenceSet incidence;  // B holds the realized path proportions
  FlowState flows;
  TimeState times;  // actual BPR times, also for system-optimal runs
  std::vector<double> gap_history;
  std::vector<double> objective_history;
  int iterations = 0;
  bool converged = false;
  double total_system_time = 0.0;  // sum_l f_l t_l
  double mean_cost = 0.0;          // total_system_time / total demand
};

// sum_l integral_0^{f_l} t_l(w) dw in closed form.
double BeckmannObjective(std::span<const double> link_flows,
                         const BprParams& params);

double TotalSystemTime(std::span<const double> link_flows,
                       const BprParams& params);

// (sum_p f_p t_p - sum_od f_od min_p t_p) / sum_p f_p t_p.
double RelativeGap(std::span<const double> path_flows,
                   std::span<const double> path_times,
                   std::span<const double> od_flows,
                   const IncidenceSet& incidence);

AssignmentResult SolveUeGradientProjection(const Network& network,
                                           const PathSet& paths,
                                           const SolverConfig& config);

AssignmentResult SolveUeFrankWolfe(const Network& network,
                                   const SolverConfig& config);

// Gradient projection on marginal costs.
AssignmentResult SolveSystemOptimum(const Network& network,
                                    const PathSet& paths,
                                    const SolverConfig& config);

AssignmentResult SolveSystemOptimumFrankWolfe(const Network& network,
                                              const SolverConfig& config);

// Proportions f_p / f_od, uniform on zero-demand ODs.
std::vector<double> RealizedProbabilities(const PathSet& paths,
                                          std::span<const double> path_flows);

}  // namespace ftt

#endif  // FTT_SOLVERS_HPP_
