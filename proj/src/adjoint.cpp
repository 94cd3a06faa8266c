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

#include "ftt/adjoint.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ftt/error.hpp"

namespace ftt {

LinkTimeJacobian LinkTimeDerivative(std::span<const double> link_flows,
                                    const BprParams& params) {
  Require(link_flows.size() == params.size(), ErrorCode::kDimensionMismatch,
          "f_L has " + std::to_string(link_flows.size()) + " entries, " +
              std::to_string(params.size()) + " links parameterized");
  LinkTimeJacobian jacobian;
  jacobian.diagonal.resize(link_flows.size());
  for (std::size_t l = 0; l < link_flows.size(); ++l) {
    const double c = params.capacity[l];
    const double beta = params.beta[l];
    // pow(0, 0) == 1 keeps the beta == 1 case constant at zero flow.
    jacobian.diagonal[l] = params.free_flow_time[l] * params.alpha[l] * beta /
                           c * std::pow(link_flows[l] / c, beta - 1.0);
  }
  return jacobian;
}

Eigen::MatrixXd OdSensitivity(const IncidenceSet& incidence,
                              const LinkTimeJacobian& jacobian) {
  Require(jacobian.diagonal.size() == incidence.link_count(),
          ErrorCode::kDimensionMismatch,
          "Jacobian has " + std::to_string(jacobian.diagonal.size()) +
              " links, A has " + std::to_string(incidence.link_count()));
  // M = B A is |OD| x |L|; the product is M diag(d) M^T.
  const Eigen::MatrixXd od_link =
      incidence.od_path.ToDense() * incidence.path_link.ToDense();
  const Eigen::Map<const Eigen::VectorXd> d(
      jacobian.diagonal.data(), static_cast<Eigen::Index>(jacobian.diagonal.size()));
  return od_link * d.asDiagonal() * od_link.transpose();
}

AdjointState AdjointBackward(const IncidenceSet& incidence,
                             const LinkTimeJacobian& jacobian,
                             const ObjectiveGradients& gradients) {
  const std::size_t n_links = incidence.link_count();
  const std::size_t n_paths = incidence.path_count();
  Require(jacobian.diagonal.size() == n_links &&
              gradients.d_link_flow.size() == n_links &&
              gradients.d_link_time.size() == n_links &&
              gradients.d_path_time.size() == n_paths,
          ErrorCode::kDimensionMismatch,
          "objective partials do not match the incidence dimensions");

  AdjointState state;
  state.p3 = gradients.d_path_time;
  state.p2 = incidence.path_link.MultiplyTranspose(state.p3);
  for (std::size_t l = 0; l < n_links; ++l) state.p2[l] += gradients.d_link_time[l];
  state.p1.resize(n_links);
  for (std::size_t l = 0; l < n_links; ++l) {
    state.p1[l] = gradients.d_link_flow[l] + jacobian.diagonal[l] * state.p2[l];
  }
  state.grad_path_flow = incidence.path_link.Multiply(state.p1);
  state.lambda.assign(incidence.od_count(), 0.0);
  state.mu.assign(n_paths, 0.0);
  return state;
}

std::vector<double> OdGradient(const IncidenceSet& incidence,
                               const AdjointState& adjoint) {
  return incidence.od_path.Multiply(adjoint.grad_path_flow);
}

Eigen::MatrixXd FiniteDiffJacobian(const VectorFunction& function,
                                   std::span<const double> point,
                                   std::optional<double> step) {
  Require(!step || *step > 0.0, ErrorCode::kInvalidArgument,
          "finite-difference step must be > 0");
  std::vector<double> x(point.begin(), point.end());
  Eigen::MatrixXd jacobian;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double h = step ? *step : 1e-4 * std::max(1.0, std::abs(point[j]));
    x[j] = point[j] + h;
    const std::vector<double> plus = function(x);
    x[j] = point[j] - h;
    const std::vector<double> minus = function(x);
    x[j] = point[j];
    Require(plus.size() == minus.size(), ErrorCode::kDimensionMismatch,
            "function output length changed between evaluations");
    if (j == 0) {
      jacobian.setZero(static_cast<Eigen::Index>(plus.size()),
                       static_cast<Eigen::Index>(x.size()));
    }
    for (std::size_t i = 0; i < plus.size(); ++i) {
      Require(std::isfinite(plus[i]) && std::isfinite(minus[i]),
              ErrorCode::kNonFiniteEvaluation,
              "non-finite evaluation at coordinate " + std::to_string(j));
      jacobian(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          (plus[i] - minus[i]) / (2.0 * h);
    }
  }
  return jacobian;
}

double FiniteDiffCheck(const VectorFunction& function,
                       std::span<const double> point,
                       const Eigen::MatrixXd& analytic,
                       std::optional<double> step) {
  const Eigen::MatrixXd numeric = FiniteDiffJacobian(function, point, step);
  if (point.empty()) return 0.0;
  Require(numeric.rows() == analytic.rows() && numeric.cols() == analytic.cols(),
          ErrorCode::kDimensionMismatch,
          "analytic Jacobian is " + std::to_string(analytic.rows()) + "x" +
              std::to_string(analytic.cols()) + ", numeric is " +
              std::to_string(numeric.rows()) + "x" +
              std::to_string(numeric.cols()));
  double worst = 0.0;
  for (Eigen::Index i = 0; i < numeric.rows(); ++i) {
    for (Eigen::Index j = 0; j < numeric.cols(); ++j) {
      const double denom = std::max(1e-12, std::abs(analytic(i, j)));
      worst = std::max(worst, std::abs(numeric(i, j) - analytic(i, j)) / denom);
    }
  }
  return worst;
}

}  // namespace ftt
