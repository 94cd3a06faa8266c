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

#include "ftt/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "ftt/adjoint.hpp"
#include "ftt/error.hpp"

namespace ftt {
namespace {

constexpr int kBisectionSteps = 60;
constexpr double kCurvatureFloor = 1e-12;

void ValidateConfig(const SolverConfig& config) {
  Require(config.max_iterations >= 1, ErrorCode::kInvalidArgument,
          "max_iterations must be >= 1");
  Require(std::isfinite(config.gap_tolerance) && config.gap_tolerance > 0.0,
          ErrorCode::kInvalidArgument, "gap tolerance must be > 0");
  Require(std::isfinite(config.step_size) && config.step_size >= 0.0,
          ErrorCode::kInvalidArgument, "step size must be >= 0");
  Require(config.step_rule != StepRule::kFixed || config.step_size > 0.0,
          ErrorCode::kInvalidArgument, "fixed step rule needs step_size > 0");
}

double LinkCost(const BprParams& params, std::size_t l, double flow) {
  return params.free_flow_time[l] *
         (1.0 + params.alpha[l] *
                    std::pow(std::max(flow, 0.0) / params.capacity[l], params.beta[l]));
}

// Exact minimizer over theta in [0, 1] of the convex objective whose
// gradient along `direction` is sum_l dir_l c_l(f_l + theta dir_l).
// Returns the lower end of the final bracket, so the objective never rises.
double LineSearch(const BprParams& params, std::span<const double> link_flows,
                  const std::vector<std::pair<std::size_t, double>>& direction) {
  auto slope = [&](double theta) {
    double g = 0.0;
    for (const auto& [l, d] : direction) {
      g += d * LinkCost(params, l, link_flows[l] + theta * d);
    }
    return g;
  };
  if (slope(0.0) >= 0.0) return 0.0;
  if (slope(1.0) <= 0.0) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < kBisectionSteps; ++i) {
    const double mid = 0.5 * (lo + hi);
    (slope(mid) <= 0.0 ? lo : hi) = mid;
  }
  return lo;
}

double SafeGap(double total, double shortest) {
  if (total <= 0.0) return 0.0;
  return std::max(0.0, (total - shortest) / total);
}

struct Problem {
  const Network& network;
  BprParams actual;  // reported travel times
  BprParams cost;    // what the algorithm equilibrates
};

Problem MakeProblem(const Network& network, AssignmentObjective objective) {
  BprParams actual = BprParams::FromNetwork(network);
  BprParams cost = objective == AssignmentObjective::kSystemOptimum
                       ? actual.Marginal()
                       : actual;
  return {network, std::move(actual), std::move(cost)};
}

AssignmentResult Finish(const Problem& problem, PathSet paths,
                        std::vector<double> path_flows) {
  const Network& network = problem.network;
  AssignmentResult result;
  const std::vector<double> probabilities = RealizedProbabilities(paths, path_flows);
  result.incidence = MakeIncidence(paths, network.link_count(), probabilities);
  result.paths = std::move(paths);
  result.flows.od = network.demands();
  result.flows.path = std::move(path_flows);
  result.flows.link = result.incidence.path_link.MultiplyTranspose(result.flows.path);
  result.times.link = Bpr(result.flows.link, problem.actual);
  result.times.path = result.incidence.path_link.Multiply(result.times.link);
  result.times.od = OdTimeFlowWeighted(result.flows.path, result.times.path,
                                       result.flows.od, result.incidence);
  result.total_system_time = TotalSystemTime(result.flows.link, problem.actual);
  const double demand =
      std::accumulate(result.flows.od.begin(), result.flows.od.end(), 0.0);
  result.mean_cost = demand > 0.0 ? result.total_system_time / demand : 0.0;
  return result;
}

AssignmentResult RunGradientProjection(const Problem& problem,
                                       const PathSet& paths,
                                       const SolverConfig& config) {
  ValidateConfig(config);
  const Network& network = problem.network;
  Require(paths.od_count == network.od_count(), ErrorCode::kDimensionMismatch,
          "path set covers " + std::to_string(paths.od_count) +
              " OD pairs, network has " + std::to_string(network.od_count()));
  const std::vector<double> demand = network.demands();
  const SparseMatrix incidence = BuildIncidence(paths, network.link_count());
  std::vector<std::vector<std::size_t>> od_paths(network.od_count());
  for (const Path& path : paths.paths) od_paths[path.od_index].push_back(path.id);
  for (std::size_t od = 0; od < od_paths.size(); ++od) {
    Require(demand[od] <= 0.0 || !od_paths[od].empty(), ErrorCode::kNoPathForOD,
            "OD (" + std::to_string(network.od_pairs()[od].origin) + "," +
                std::to_string(network.od_pairs()[od].destination) +
                ") has demand but no path");
  }

  auto path_cost = [&](std::size_t p, std::span<const double> link_flows) {
    double c = 0.0;
    for (std::size_t l : paths.paths[p].links) c += LinkCost(problem.cost, l, link_flows[l]);
    return c;
  };

  // All-or-nothing start on free-flow costs.
  std::vector<double> path_flows(paths.size(), 0.0);
  {
    const std::vector<double> empty(network.link_count(), 0.0);
    for (std::size_t od = 0; od < od_paths.size(); ++od) {
      if (demand[od] <= 0.0) continue;
      std::size_t best = od_paths[od].front();
      for (std::size_t p : od_paths[od]) {
        if (path_cost(p, empty) < path_cost(best, empty)) best = p;
      }
      path_flows[best] = demand[od];
    }
  }

  double s0 = config.step_size;
  if (config.step_rule == StepRule::kDiminishing && s0 <= 0.0) {
    const auto d = LinkTimeDerivative(incidence.MultiplyTranspose(path_flows),
                                      problem.cost);
    const double max_d = d.diagonal.empty()
                             ? 0.0
                             : *std::max_element(d.diagonal.begin(), d.diagonal.end());
    s0 = 1.0 / (max_d + kCurvatureFloor);
  }

  std::vector<double> best_flows = path_flows;
  double best_gap = std::numeric_limits<double>::infinity();
  std::vector<double> gaps;
  std::vector<double> objectives;
  bool converged = false;
  int iteration = 0;
  while (iteration < config.max_iterations) {
    ++iteration;
    std::vector<double> link_flows = incidence.MultiplyTranspose(path_flows);
    const std::vector<double> link_costs = Bpr(link_flows, problem.cost);
    const std::vector<double> path_costs = incidence.Multiply(link_costs);
    double total = 0.0;
    double shortest = 0.0;
    for (std::size_t od = 0; od < od_paths.size(); ++od) {
      if (demand[od] <= 0.0) continue;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t p : od_paths[od]) {
        total += path_flows[p] * path_costs[p];
        best = std::min(best, path_costs[p]);
      }
      shortest += demand[od] * best;
    }
    const double gap = SafeGap(total, shortest);
    gaps.push_back(gap);
    objectives.push_back(BeckmannObjective(link_flows, problem.cost));
    if (gap < best_gap) {
      best_gap = gap;
      best_flows = path_flows;
    }
    if (gap <= config.gap_tolerance) {
      converged = true;
      break;
    }
    if (iteration == config.max_iterations) break;

    // Gauss-Seidel sweep: each OD sees the link flows left by the previous.
    for (std::size_t od = 0; od < od_paths.size(); ++od) {
      const auto& members = od_paths[od];
      if (demand[od] <= 0.0 || members.size() < 2) continue;
      std::vector<double> costs;
      costs.reserve(members.size());
      for (std::size_t p : members) costs.push_back(path_cost(p, link_flows));
      const std::size_t shortest_pos = static_cast<std::size_t>(
          std::min_element(costs.begin(), costs.end()) - costs.begin());
      const std::size_t target = members[shortest_pos];

      std::vector<double> shift(members.size(), 0.0);
      if (config.step_rule == StepRule::kLineSearch) {
        const auto d = LinkTimeDerivative(link_flows, problem.cost).diagonal;
        const auto& target_links = paths.paths[target].links;
        for (std::size_t k = 0; k < members.size(); ++k) {
          if (k == shortest_pos) continue;
          const auto& links = paths.paths[members[k]].links;
          double curvature = 0.0;
          for (std::size_t l : links) {
            if (std::find(target_links.begin(), target_links.end(), l) == target_links.end()) {
              curvature += d[l];
            }
          }
          for (std::size_t l : target_links) {
            if (std::find(links.begin(), links.end(), l) == links.end()) curvature += d[l];
          }
          const double diff = costs[k] - costs[shortest_pos];
          shift[k] = curvature > kCurvatureFloor
                         ? std::min(path_flows[members[k]], diff / curvature)
                         : path_flows[members[k]];
          if (diff <= 0.0) shift[k] = 0.0;
        }
      } else {
        const double step = config.step_rule == StepRule::kFixed
                                ? config.step_size
                                : s0 / static_cast<double>(iteration);
        for (std::size_t k = 0; k < members.size(); ++k) {
          if (k == shortest_pos) continue;
          shift[k] = std::min(path_flows[members[k]],
                              step * (costs[k] - costs[shortest_pos]));
        }
      }

      // Link-space direction of moving `shift` onto the shortest path.
      std::map<std::size_t, double> link_dir;
      double moved = 0.0;
      for (std::size_t k = 0; k < members.size(); ++k) {
        if (shift[k] <= 0.0) continue;
        moved += shift[k];
        for (std::size_t l : paths.paths[members[k]].links) link_dir[l] -= shift[k];
      }
      if (moved <= 0.0) continue;
      for (std::size_t l : paths.paths[target].links) link_dir[l] += moved;
      std::vector<std::pair<std::size_t, double>> direction(link_dir.begin(), link_dir.end());

      double theta = 1.0;
      if (config.step_rule == StepRule::kLineSearch) {
        theta = LineSearch(problem.cost, link_flows, direction);
      }
      if (theta <= 0.0) continue;

      std::vector<double> updated(members.size());
      double sum = 0.0;
      for (std::size_t k = 0; k < members.size(); ++k) {
        double f = path_flows[members[k]] - theta * shift[k];
        if (k == shortest_pos) f += theta * moved;
        updated[k] = std::max(0.0, f);
        sum += updated[k];
      }
      // Renormalize onto the OD total; clipping only removes roundoff.
      for (std::size_t k = 0; k < members.size(); ++k) {
        const double f = sum > 0.0 ? updated[k] * demand[od] / sum : 0.0;
        const double delta = f - path_flows[members[k]];
        if (delta != 0.0) {
          for (std::size_t l : paths.paths[members[k]].links) link_flows[l] += delta;
        }
        path_flows[members[k]] = f;
      }
    }
  }

  AssignmentResult result = Finish(problem, paths, converged ? path_flows : best_flows);
  result.gap_history = std::move(gaps);
  result.objective_history = std::move(objectives);
  result.iterations = iteration;
  result.converged = converged;
  return result;
}

struct AonResult {
  std::vector<double> link_flows;
  // Shortest path (link indices) per OD; empty for skipped ODs.
  std::vector<std::vector<std::size_t>> od_paths;
  double shortest_total = 0.0;  // sum_od f_od * shortest cost
};

AonResult AllOrNothing(const Network& network, std::span<const double> costs,
                       std::span<const double> demand) {
  AonResult aon;
  aon.link_flows.assign(network.link_count(), 0.0);
  aon.od_paths.resize(network.od_count());
  const auto& ods = network.od_pairs();
  std::size_t od = 0;
  while (od < ods.size()) {
    const NodeId origin_id = ods[od].origin;
    const std::size_t origin = network.node_index(origin_id);
    std::size_t run_end = od;
    bool needed = false;
    while (run_end < ods.size() && ods[run_end].origin == origin_id) {
      needed = needed || demand[run_end] > 0.0;
      ++run_end;
    }
    if (needed) {
      const ShortestPathTree tree = ShortestPath(network, costs, origin);
      for (; od < run_end; ++od) {
        if (demand[od] <= 0.0) continue;
        const std::size_t dest = network.node_index(ods[od].destination);
        Require(dest != origin && std::isfinite(tree.labels[dest]),
                ErrorCode::kDisconnectedOD,
                "no path from node " + std::to_string(ods[od].origin) +
                    " to node " + std::to_string(ods[od].destination));
        aon.od_paths[od] = TracePath(network, tree, dest);
        for (std::size_t l : aon.od_paths[od]) aon.link_flows[l] += demand[od];
        aon.shortest_total += demand[od] * tree.labels[dest];
      }
    }
    od = run_end;
  }
  return aon;
}

AssignmentResult RunFrankWolfe(const Problem& problem, const SolverConfig& config) {
  ValidateConfig(config);
  const Network& network = problem.network;
  const std::vector<double> demand = network.demands();

  // Paths discovered by the AON steps, keyed per OD by link sequence.
  std::vector<std::map<std::vector<std::size_t>, std::size_t>> known(network.od_count());
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> discovered;
  std::vector<double> path_flows;
  auto path_id = [&](std::size_t od, const std::vector<std::size_t>& links) {
    const auto [it, inserted] = known[od].emplace(links, discovered.size());
    if (inserted) {
      discovered.emplace_back(od, links);
      path_flows.push_back(0.0);
    }
    return it->second;
  };

  const AonResult start = AllOrNothing(
      network, Bpr(std::vector<double>(network.link_count(), 0.0), problem.cost), demand);
  std::vector<double> link_flows = start.link_flows;
  for (std::size_t od = 0; od < network.od_count(); ++od) {
    if (demand[od] > 0.0) path_flows[path_id(od, start.od_paths[od])] += demand[od];
  }

  std::vector<double> best_links = link_flows;
  std::vector<double> best_paths = path_flows;
  double best_gap = std::numeric_limits<double>::infinity();
  std::vector<double> gaps;
  std::vector<double> objectives;
  bool converged = false;
  int iteration = 0;
  while (iteration < config.max_iterations) {
    ++iteration;
    const std::vector<double> costs = Bpr(link_flows, problem.cost);
    const AonResult aon = AllOrNothing(network, costs, demand);
    double total = 0.0;
    for (std::size_t l = 0; l < costs.size(); ++l) total += link_flows[l] * costs[l];
    const double gap = SafeGap(total, aon.shortest_total);
    gaps.push_back(gap);
    objectives.push_back(BeckmannObjective(link_flows, problem.cost));
    if (gap < best_gap) {
      best_gap = gap;
      best_links = link_flows;
      best_paths = path_flows;
    }
    if (gap <= config.gap_tolerance) {
      converged = true;
      break;
    }
    if (iteration == config.max_iterations) break;

    std::vector<std::pair<std::size_t, double>> direction;
    for (std::size_t l = 0; l < link_flows.size(); ++l) {
      const double d = aon.link_flows[l] - link_flows[l];
      if (d != 0.0) direction.emplace_back(l, d);
    }
    const double theta = LineSearch(problem.cost, link_flows, direction);
    if (theta <= 0.0) continue;
    for (const auto& [l, d] : direction) link_flows[l] += theta * d;
    for (double& f : path_flows) f *= 1.0 - theta;
    for (std::size_t od = 0; od < network.od_count(); ++od) {
      if (demand[od] > 0.0) path_flows[path_id(od, aon.od_paths[od])] += theta * demand[od];
    }
  }
  if (!converged) path_flows = best_paths;

  // Group discovered paths by OD, keeping discovery order within each OD.
  PathSet paths;
  paths.od_count = network.od_count();
  std::vector<double> ordered_flows;
  for (std::size_t od = 0; od < network.od_count(); ++od) {
    for (std::size_t k = 0; k < discovered.size(); ++k) {
      if (discovered[k].first != od) continue;
      paths.paths.push_back({paths.paths.size(), od, discovered[k].second});
      ordered_flows.push_back(path_flows[k]);
    }
  }
  AssignmentResult result = Finish(problem, std::move(paths), std::move(ordered_flows));
  result.gap_history = std::move(gaps);
  result.objective_history = std::move(objectives);
  result.iterations = iteration;
  result.converged = converged;
  return result;
}

}  // namespace

double BeckmannObjective(std::span<const double> link_flows,
                         const BprParams& params) {
  Require(link_flows.size() == params.size(), ErrorCode::kDimensionMismatch,
          "f_L has " + std::to_string(link_flows.size()) + " entries, " +
              std::to_string(params.size()) + " links parameterized");
  double total = 0.0;
  for (std::size_t l = 0; l < link_flows.size(); ++l) {
    const double t0 = params.free_flow_time[l];
    const double c = params.capacity[l];
    const double beta = params.beta[l];
    const double f = link_flows[l];
    total += t0 * f +
             t0 * params.alpha[l] * c / (beta + 1.0) * std::pow(f / c, beta + 1.0);
  }
  return total;
}

double TotalSystemTime(std::span<const double> link_flows,
                       const BprParams& params) {
  const std::vector<double> times = Bpr(link_flows, params);
  double total = 0.0;
  for (std::size_t l = 0; l < times.size(); ++l) total += link_flows[l] * times[l];
  return total;
}

double RelativeGap(std::span<const double> path_flows,
                   std::span<const double> path_times,
                   std::span<const double> od_flows,
                   const IncidenceSet& incidence) {
  Require(path_flows.size() == incidence.path_count() &&
              path_times.size() == incidence.path_count() &&
              od_flows.size() == incidence.od_count(),
          ErrorCode::kDimensionMismatch, "flow/time vectors disagree with B");
  double total = 0.0;
  double shortest = 0.0;
  for (std::size_t od = 0; od < incidence.od_count(); ++od) {
    const auto paths = incidence.paths_of(od);
    if (od_flows[od] <= 0.0) continue;
    Require(!paths.empty(), ErrorCode::kNoPathForOD,
            "OD " + std::to_string(od) + " has demand but no path");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t p : paths) {
      total += path_flows[p] * path_times[p];
      best = std::min(best, path_times[p]);
    }
    shortest += od_flows[od] * best;
  }
  Require(total > 0.0, ErrorCode::kZeroTotalCost,
          "total path cost is zero; the gap is undefined");
  return std::clamp((total - shortest) / total, 0.0, 1.0);
}

AssignmentResult SolveUeGradientProjection(const Network& network,
                                           const PathSet& paths,
                                           const SolverConfig& config) {
  return RunGradientProjection(
      MakeProblem(network, AssignmentObjective::kUserEquilibrium), paths, config);
}

AssignmentResult SolveUeFrankWolfe(const Network& network,
                                   const SolverConfig& config) {
  return RunFrankWolfe(MakeProblem(network, AssignmentObjective::kUserEquilibrium),
                       config);
}

AssignmentResult SolveSystemOptimum(const Network& network, const PathSet& paths,
                                    const SolverConfig& config) {
  return RunGradientProjection(
      MakeProblem(network, AssignmentObjective::kSystemOptimum), paths, config);
}

AssignmentResult SolveSystemOptimumFrankWolfe(const Network& network,
                                              const SolverConfig& config) {
  return RunFrankWolfe(MakeProblem(network, AssignmentObjective::kSystemOptimum),
                       config);
}

std::vector<double> RealizedProbabilities(const PathSet& paths,
                                          std::span<const double> path_flows) {
  Require(path_flows.size() == paths.size(), ErrorCode::kDimensionMismatch,
          "path flow vector has wrong length");
  std::vector<double> totals(paths.od_count, 0.0);
  std::vector<double> counts(paths.od_count, 0.0);
  for (const Path& path : paths.paths) {
    totals[path.od_index] += path_flows[path.id];
    counts[path.od_index] += 1.0;
  }
  std::vector<double> probabilities(paths.size());
  for (const Path& path : paths.paths) {
    probabilities[path.id] = totals[path.od_index] > 0.0
                                 ? path_flows[path.id] / totals[path.od_index]
                                 : 1.0 / counts[path.od_index];
  }
  return probabilities;
}

}  // namespace ftt
