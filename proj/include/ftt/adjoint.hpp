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

// Exact derivatives through the flow/time chain with B held fixed.

#ifndef FTT_ADJOINT_HPP_
#define FTT_ADJOINT_HPP_

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ftt/network.hpp"
#include "ftt/propagate.hpp"

namespace ftt {

// Diagonal of dt_L/df_L for separable BPR links.
struct LinkTimeJacobian {
  std::vector<double> diagonal;
};

LinkTimeJacobian LinkTimeDerivative(std::span<const double> link_flows,
                                    const BprParams& params);

// dt_OD/df_OD = B A diag(d) A^T B^T.
Eigen::MatrixXd OdSensitivity(const IncidenceSet& incidence,
                              const LinkTimeJacobian& jacobian);

// Partials of an objective Z(f_L, t_L, t_P) at the current point.
struct ObjectiveGradients {
  std::vector<double> d_link_flow;  // dZ/df_L
  std::vector<double> d_link_time;  // dZ/dt_L
  std::vector<double> d_path_time;  // dZ/dt_P
};

struct AdjointState {
  std::vector<double> p3;          // |P|, equals dZ/dt_P
  std::vector<double> p2;          // |L|
  std::vector<double> p1;          // |L|
  std::vector<double> lambda;      // |OD|, conservation multipliers
  std::vector<double> mu;          // |P|, nonnegativity multipliers (>= 0)
  std::vector<double> grad_path_flow;  // dZ/df_P
};

// Backward sweep:
//   p3 = dZ/dt_P
//   p2 = dZ/dt_L + A^T p3
//   p1 = dZ/df_L + diag(d) p2
//   dZ/df_P = A p1
// lambda and mu stay zero; a constrained solver may fill them in.
AdjointState AdjointBackward(const IncidenceSet& incidence,
                             const LinkTimeJacobian& jacobian,
                             const ObjectiveGradients& gradients);

// dZ/df_OD = B dZ/df_P for a fixed choice matrix.
std::vector<double> OdGradient(const IncidenceSet& incidence,
                               const AdjointState& adjoint);

using VectorFunction = std::function<std::vector<double>(std::span<const double>)>;

// Central-difference check of `analytic` (the Jacobian at `point`, rows =
// outputs). Returns the largest per-entry relative error
// |fd - analytic| / max(1e-12, |analytic|). Without an explicit step the
// per-coordinate step is 1e-4 * max(1, |x_j|).
double FiniteDiffCheck(const VectorFunction& function,
                       std::span<const double> point,
                       const Eigen::MatrixXd& analytic,
                       std::optional<double> step = std::nullopt);

// The central-difference Jacobian itself, same step rule.
Eigen::MatrixXd FiniteDiffJacobian(const VectorFunction& function,
                                   std::span<const double> point,
                                   std::optional<double> step = std::nullopt);

}  // namespace ftt

#endif  // FTT_ADJOINT_HPP_
