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

// Two-block ADMM for
//
//   min J1(x) + J2(z)  s.t.  C x_S + D z_S = b   (or <= b),
//
// where x_S, z_S are the shared components of each block. The multiplier is
// unscaled: the augmented term is lambda^T r + rho/2 ||r||^2. Inequality
// coupling adds a slack s >= 0 (C x_S + D z_S + s = b) that is minimized
// jointly with z.

#ifndef FTT_ADMM_HPP_
#define FTT_ADMM_HPP_

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "ftt/network.hpp"
#include "ftt/propagate.hpp"

namespace ftt {

using ScalarField = std::function<double(const Eigen::VectorXd&)>;
using GradientField = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// sum_{i in indices} x_i = total, on top of the lower bounds.
struct SimplexGroup {
  std::vector<std::size_t> indices;
  double total = 0.0;
};

struct BlockProblem {
  std::size_t dimension = 0;
  ScalarField objective;
  GradientField gradient;
  std::vector<std::size_t> shared_indices;
  Eigen::VectorXd lower_bounds;  // empty means all zero
  std::vector<SimplexGroup> simplex_groups;

  // Throws kInvalidArgument / kDimensionMismatch.
  void Validate() const;
  // Euclidean projection onto the feasible set.
  Eigen::VectorXd Project(const Eigen::VectorXd& x) const;
  Eigen::VectorXd Shared(const Eigen::VectorXd& x) const;
};

enum class CouplingKind { kEquality, kInequalityLeq };

struct CouplingSpec {
  Eigen::MatrixXd C;  // m x |x_S|
  Eigen::MatrixXd D;  // m x |z_S|
  Eigen::VectorXd b;  // m
  CouplingKind kind = CouplingKind::kEquality;
};

struct AdmmState {
  Eigen::VectorXd x;
  Eigen::VectorXd z;
  Eigen::VectorXd lambda;
  Eigen::VectorXd slack;  // empty for equality coupling
  double rho = 1.0;
  int iteration = 0;
};

struct ResidualReport {
  int iteration = 0;
  double primal = 0.0;  // ||C x_S + D z_S (+ s) - b||
  double dual = 0.0;    // ||rho C^T (D dz_S + ds)||
  double objective1 = 0.0;
  double objective2 = 0.0;
  int inner_iterations = 0;
};

struct AdmmConfig {
  double rho = 1.0;
  double tol_primal = 1e-6;
  double tol_dual = 1e-6;
  int max_iterations = 500;
  // Doubles or halves rho when one residual exceeds the other tenfold.
  bool residual_balancing = false;
  double inner_tolerance = 1e-8;
  int max_inner_iterations = 200000;
};

// x, z at their projected zero points, lambda and slack zero.
AdmmState InitialAdmmState(const BlockProblem& block1, const BlockProblem& block2,
                           const CouplingSpec& coupling, double rho);

// One x-update, z-update (with slack) and dual step. Throws
// kInnerSolverDiverged when an inner solve produces non-finite values.
ResidualReport AdmmIterate(AdmmState& state, const BlockProblem& block1,
                           const BlockProblem& block2, const CouplingSpec& coupling,
                           const AdmmConfig& config = {});

struct AdmmResult {
  AdmmState state;
  std::vector<ResidualReport> trace;
  bool converged = false;
};

// Not converging within max_iterations is reported through `converged`,
// with the last iterate and its multiplier.
AdmmResult SolveAdmm(const BlockProblem& block1, const BlockProblem& block2,
                     const CouplingSpec& coupling, const AdmmConfig& config);

// Passenger paths over links, vehicles per link, coupled by
// A^T x <= omega .* z.
struct PassengerVehicleData {
  IncidenceSet passenger;              // only A and B^I are used
  std::vector<double> od_demand;       // passenger demand per OD
  BprParams passenger_times;           // per link
  std::vector<double> omega;           // passengers per vehicle, per link
  std::vector<double> vehicle_cost;    // per vehicle, per link
};

struct PassengerVehicleInstance {
  BlockProblem passenger;  // path flows, J1 = sum_l f_l t_l(f_l)
  BlockProblem vehicle;    // link vehicle flows, J2 = sum_l z_l c_l
  CouplingSpec coupling;
};

// Throws kDimensionMismatch, kInvalidArgument for omega <= 0.
PassengerVehicleInstance MakePassengerVehicle(const PassengerVehicleData& data);

}  // namespace ftt

#endif  // FTT_ADMM_HPP_
