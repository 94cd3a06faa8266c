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

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "common/instances.hpp"
#include "doctest.h"
#include "ftt/error.hpp"
#include "ftt/solvers.hpp"

using namespace ftt;

namespace {

BprParams OneLink(double t0, double alpha, double beta, double capacity) {
  return BprParams{{t0}, {capacity}, {alpha}, {beta}};
}

// Two parallel links 1 -> 2 with the given BPR data and demand.
Network TwoRoutes(const Link& a, const Link& b, double demand) {
  Link first = a, second = b;
  first.id = 1;
  second.id = 2;
  first.from_node = second.from_node = 1;
  first.to_node = second.to_node = 2;
  return Network({{1, std::nullopt}, {2, std::nullopt}}, {first, second}, {{1, 2, demand}});
}

Link Bpr(double t0, double capacity, double alpha, double beta) {
  Link link;
  link.free_flow_time = t0;
  link.capacity = capacity;
  link.bpr_alpha = alpha;
  link.bpr_beta = beta;
  return link;
}

// Three links: 1 -> 2 -> 3 and a bypass 1 -> 3; two paths.
Network ThreeLinks() {
  std::vector<Link> links = {Bpr(1, 2, 0.5, 2), Bpr(1, 3, 0.3, 3), Bpr(2.5, 2, 0.4, 2)};
  const std::vector<std::pair<NodeId, NodeId>> ends = {{1, 2}, {2, 3}, {1, 3}};
  for (std::size_t l = 0; l < 3; ++l) {
    links[l].id = static_cast<LinkId>(l + 1);
    links[l].from_node = ends[l].first;
    links[l].to_node = ends[l].second;
  }
  return Network({{1, std::nullopt}, {2, std::nullopt}, {3, std::nullopt}}, links,
                 {{1, 3, 3.0}});
}

SolverConfig Tight(int iterations = 1000) {
  SolverConfig config;
  config.gap_tolerance = 1e-10;
  config.max_iterations = iterations;
  return config;
}

// Golden-section minimization on [0, 1], the one-dimensional oracle.
template <typename F>
double MinimizeOnUnit(F f) {
  double lo = 0.0, hi = 1.0;
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int k = 0; k < 200; ++k) {
    const double a = hi - r * (hi - lo), b = lo + r * (hi - lo);
    (f(a) < f(b) ? hi : lo) = (f(a) < f(b) ? b : a);
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("Beckmann objective") {
  CHECK(BeckmannObjective(std::vector<double>{0}, OneLink(1, 0.15, 4, 1000)) == 0.0);
  CHECK(BeckmannObjective(std::vector<double>{7}, OneLink(3, 0.0, 4, 1000)) == 21.0);
  CHECK(BeckmannObjective(std::vector<double>{1000}, OneLink(1, 0.15, 4, 1000)) ==
        doctest::Approx(1030.0).epsilon(1e-14));
}

TEST_CASE("relative gap") {
  const IncidenceSet two = IncidenceSet::Make(
      SparseMatrix::Identity(2), SparseMatrix::FromDense((Eigen::MatrixXd(1, 2) << 1, 0).finished()),
      SparseMatrix::FromDense(Eigen::MatrixXd::Ones(1, 2)));
  // All flow on route a (time 1) while route b costs 0.
  CHECK(RelativeGap(std::vector<double>{1, 0}, std::vector<double>{1, 0}, std::vector<double>{1},
                    two) == 1.0);
  CHECK(RelativeGap(std::vector<double>{0.5, 0.5}, std::vector<double>{2, 2},
                    std::vector<double>{1}, two) == 0.0);
  const IncidenceSet example = testing::WorkedExample();
  CHECK(RelativeGap(std::vector<double>{4000, 1000, 2000, 600, 1400},
                    std::vector<double>{33, 33, 18, 18, 18}, std::vector<double>{4000, 1000, 2000, 2000},
                    example) == 0.0);
  try {
    RelativeGap(std::vector<double>{0, 0}, std::vector<double>{1, 1}, std::vector<double>{0}, two);
    FAIL("zero total cost accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kZeroTotalCost);
  }
}

TEST_CASE("Pigou user equilibrium with both solvers") {
  const Network network = PigouNetwork(1.0);
  const PathSet paths = GeneratePaths(network, 2);
  const AssignmentResult gp = SolveUeGradientProjection(network, paths, Tight());
  const AssignmentResult fw = SolveUeFrankWolfe(network, Tight());
  for (const AssignmentResult* r : {&gp, &fw}) {
    CHECK(r->converged);
    CHECK(r->flows.link[1] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r->mean_cost == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r->gap_history.back() < 1e-6);
  }
  CHECK(BeckmannObjective(fw.flows.link, BprParams::FromNetwork(network)) ==
        doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("Pigou system optimum") {
  SUBCASE("beta 1") {
    const Network network = PigouNetwork(1.0);
    const AssignmentResult so = SolveSystemOptimum(network, GeneratePaths(network, 2), Tight());
    CHECK(so.flows.link[1] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(so.mean_cost == doctest::Approx(0.75).epsilon(1e-9));
  }
  SUBCASE("beta 2 against a one-dimensional search") {
    const auto cost = [](double x) { return (1.0 - x) + x * x * x; };
    const double x_star = MinimizeOnUnit(cost);
    CHECK(x_star == doctest::Approx(0.5774).epsilon(1e-4));
    CHECK(cost(x_star) == doctest::Approx(0.6151).epsilon(1e-4));
    const Network network = PigouNetwork(2.0);
    const AssignmentResult gp = SolveSystemOptimum(network, GeneratePaths(network, 2), Tight());
    const AssignmentResult fw = SolveSystemOptimumFrankWolfe(network, Tight(20000));
    CHECK(gp.flows.link[1] == doctest::Approx(x_star).epsilon(1e-6));
    CHECK(gp.mean_cost == doctest::Approx(cost(x_star)).epsilon(1e-9));
    CHECK(fw.flows.link[1] == doctest::Approx(x_star).epsilon(1e-4));
  }
}

TEST_CASE("identical parallel routes split evenly") {
  const Network network = TwoRoutes(Bpr(2, 1, 0.5, 2), Bpr(2, 1, 0.5, 2), 3.0);
  const AssignmentResult gp = SolveUeGradientProjection(network, GeneratePaths(network, 2), Tight());
  CHECK(gp.flows.link[0] == doctest::Approx(1.5).epsilon(1e-6));
  SolverConfig config = Tight(5000);
  config.gap_tolerance = 1e-9;
  const AssignmentResult fw = SolveUeFrankWolfe(network, config);
  CHECK(std::abs(fw.flows.link[0] - 1.5) <= 1e-4 * 3.0);
}

TEST_CASE("constant-time network converges in one step and SO equals UE") {
  const Network network = TwoRoutes(Bpr(2, 1, 0.0, 1), Bpr(3, 1, 0.0, 1), 4.0);
  const AssignmentResult fw = SolveUeFrankWolfe(network, Tight());
  CHECK(fw.iterations == 1);
  CHECK(fw.flows.link[0] == 4.0);
  const PathSet paths = GeneratePaths(network, 2);
  const AssignmentResult ue = SolveUeGradientProjection(network, paths, Tight());
  const AssignmentResult so = SolveSystemOptimum(network, paths, Tight());
  CHECK(so.total_system_time == doctest::Approx(ue.total_system_time));
}

TEST_CASE("three-link instance: both methods agree with the scalar equilibrium") {
  const Network network = ThreeLinks();
  const PathSet paths = GeneratePaths(network, 3);
  REQUIRE(paths.size() == 2);
  const AssignmentResult gp = SolveUeGradientProjection(network, paths, Tight());
  SolverConfig config = Tight(200000);
  config.gap_tolerance = 1e-8;
  const AssignmentResult fw = SolveUeFrankWolfe(network, config);
  // Independent oracle: bisection on the flow x through 1 -> 2 -> 3.
  const BprParams bpr = BprParams::FromNetwork(network);
  const auto time = [&](std::size_t l, double f) {
    return bpr.free_flow_time[l] * (1 + bpr.alpha[l] * std::pow(f / bpr.capacity[l], bpr.beta[l]));
  };
  double lo = 0.0, hi = 3.0;
  for (int k = 0; k < 200; ++k) {
    const double x = 0.5 * (lo + hi);
    (time(0, x) + time(1, x) > time(2, 3.0 - x) ? hi : lo) = x;
  }
  const double x = 0.5 * (lo + hi);
  CHECK(gp.flows.link[0] == doctest::Approx(x).epsilon(1e-6));
  CHECK(std::abs(fw.flows.link[0] - gp.flows.link[0]) <= 1e-3);
  CHECK(std::abs(fw.flows.link[2] - gp.flows.link[2]) <= 1e-3);
}

TEST_CASE("solver invariants on random networks") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 6; ++trial) {
    const Network network = testing::MakeRandomNetwork(rng);
    const PathSet paths = GeneratePaths(network, 4);
    SolverConfig config;
    config.gap_tolerance = 1e-6;
    config.max_iterations = 2000;
    const AssignmentResult gp = SolveUeGradientProjection(network, paths, config);
    const AssignmentResult fw = SolveUeFrankWolfe(network, config);
    const AssignmentResult so = SolveSystemOptimum(network, paths, config);
    for (const AssignmentResult* r : {&gp, &fw, &so}) {
      for (double f : r->flows.path) CHECK(f >= 0.0);
      for (std::size_t od = 0; od < network.od_count(); ++od) {
        double total = 0.0;
        for (std::size_t p : r->paths.paths_of(od)) total += r->flows.path[p];
        CHECK(total == doctest::Approx(network.od_pairs()[od].demand).epsilon(1e-9));
      }
      for (const Path& p : r->paths.paths) CHECK(IsValidPath(network, p));
    }
    // Frank-Wolfe objective values never increase.
    for (std::size_t k = 1; k < fw.objective_history.size(); ++k) {
      CHECK(fw.objective_history[k] <= fw.objective_history[k - 1] + 1e-12);
    }
    CHECK(so.total_system_time <= gp.total_system_time + 1e-9);
  }
}

TEST_CASE("gradient projection step rules") {
  const Network network = ThreeLinks();
  const PathSet paths = GeneratePaths(network, 3);
  const AssignmentResult reference = SolveUeGradientProjection(network, paths, Tight());
  SUBCASE("fixed") {
    SolverConfig config = Tight(5000);
    config.gap_tolerance = 1e-8;
    config.step_rule = StepRule::kFixed;
    config.step_size = 0.2;
    const AssignmentResult r = SolveUeGradientProjection(network, paths, config);
    CHECK(r.converged);
    CHECK(r.flows.link[0] == doctest::Approx(reference.flows.link[0]).epsilon(1e-4));
  }
  SUBCASE("diminishing reports non-convergence with the best iterate") {
    SolverConfig config;
    config.gap_tolerance = 1e-14;
    config.max_iterations = 5;
    config.step_rule = StepRule::kDiminishing;
    const AssignmentResult r = SolveUeGradientProjection(network, paths, config);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 5);
    CHECK(r.gap_history.size() == 5);
  }
}
