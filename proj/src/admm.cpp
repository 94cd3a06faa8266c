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

#include "ftt/admm.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "ftt/error.hpp"
#include "ftt/solvers.hpp"

namespace ftt {
namespace {

constexpr double kArmijo = 1e-4;
constexpr double kMinStep = 1e-12;
constexpr double kMaxStep = 1e12;

using Vector = Eigen::VectorXd;
using Projection = std::function<Vector(const Vector&)>;

// Projects y onto {y >= 0, sum y = total}.
void ProjectSimplex(std::vector<double>& y, double total) {
  std::vector<double> sorted = y;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double shift = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - total) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) shift = candidate;
  }
  for (double& v : y) v = std::max(0.0, v - shift);
}

struct InnerResult {
  Vector point;
  int iterations = 0;
};

void RequireFinite(const Vector& v, const char* what) {
  Require(v.allFinite(), ErrorCode::kInnerSolverDiverged,
          std::string("inner solver produced a non-finite ") + what);
}

// Projected gradient with Barzilai-Borwein trial steps and Armijo
// backtracking. Stops when ||v - P(v - g)|| <= tolerance.
InnerResult ProjectedGradient(const ScalarField& f, const GradientField& grad,
                              const Projection& project, Vector start,
                              double tolerance, int max_iterations) {
  Vector v = project(start);
  double value = f(v);
  Vector g = grad(v);
  Require(std::isfinite(value), ErrorCode::kInnerSolverDiverged,
          "inner objective is not finite at the start point");
  RequireFinite(g, "gradient");
  double step = 1.0;
  int it = 0;
  for (; it < max_iterations; ++it) {
    if ((v - project(v - g)).norm() <= tolerance) break;
    Vector candidate;
    double candidate_value = 0.0;
    double trial = step;
    bool accepted = false;
    while (trial >= 1e-20) {
      candidate = project(v - trial * g);
      candidate_value = f(candidate);
      if (std::isfinite(candidate_value) &&
          candidate_value <= value + kArmijo * g.dot(candidate - v)) {
        accepted = true;
        break;
      }
      trial *= 0.5;
    }
    if (!accepted) break;  // no descent left at double precision
    const Vector g_next = grad(candidate);
    RequireFinite(candidate, "iterate");
    RequireFinite(g_next, "gradient");
    const Vector s = candidate - v;
    const Vector y = g_next - g;
    const double sy = s.dot(y);
    step = sy > 0.0 ? std::clamp(s.squaredNorm() / sy, kMinStep, kMaxStep)
                    : std::min(kMaxStep, 2.0 * trial);
    v = candidate;
    value = candidate_value;
    g = g_next;
  }
  return {std::move(v), it};
}

Vector Scatter(const std::vector<std::size_t>& indices, const Vector& values,
               std::size_t dimension) {
  Vector full = Vector::Zero(static_cast<Eigen::Index>(dimension));
  for (std::size_t k = 0; k < indices.size(); ++k) {
    full(static_cast<Eigen::Index>(indices[k])) += values(static_cast<Eigen::Index>(k));
  }
  return full;
}

void ValidateCoupling(const BlockProblem& block1, const BlockProblem& block2,
                      const CouplingSpec& coupling) {
  const Eigen::Index m = coupling.b.size();
  Require(coupling.C.rows() == m && coupling.D.rows() == m, ErrorCode::kDimensionMismatch,
          "C and D must have one row per coupling constraint");
  Require(coupling.C.cols() == static_cast<Eigen::Index>(block1.shared_indices.size()),
          ErrorCode::kDimensionMismatch,
          "C has " + std::to_string(coupling.C.cols()) + " columns for " +
              std::to_string(block1.shared_indices.size()) + " shared x components");
  Require(coupling.D.cols() == static_cast<Eigen::Index>(block2.shared_indices.size()),
          ErrorCode::kDimensionMismatch,
          "D has " + std::to_string(coupling.D.cols()) + " columns for " +
              std::to_string(block2.shared_indices.size()) + " shared z components");
  Require(coupling.C.allFinite() && coupling.D.allFinite() && coupling.b.allFinite(),
          ErrorCode::kInvalidArgument, "coupling data must be finite");
}

void ValidateState(const AdmmState& state, const BlockProblem& block1,
                   const BlockProblem& block2, const CouplingSpec& coupling) {
  Require(state.x.size() == static_cast<Eigen::Index>(block1.dimension) &&
              state.z.size() == static_cast<Eigen::Index>(block2.dimension) &&
              state.lambda.size() == coupling.b.size(),
          ErrorCode::kDimensionMismatch, "ADMM state does not match the problem");
  const bool inequality = coupling.kind == CouplingKind::kInequalityLeq;
  Require(state.slack.size() == (inequality ? coupling.b.size() : 0),
          ErrorCode::kDimensionMismatch, "slack size does not match the coupling kind");
  Require(std::isfinite(state.rho) && state.rho > 0.0, ErrorCode::kInvalidArgument,
          "rho must be > 0");
}

}  // namespace

void BlockProblem::Validate() const {
  Require(static_cast<bool>(objective) && static_cast<bool>(gradient),
          ErrorCode::kInvalidArgument, "block needs an objective and a gradient");
  Require(lower_bounds.size() == 0 ||
              lower_bounds.size() == static_cast<Eigen::Index>(dimension),
          ErrorCode::kDimensionMismatch, "lower bounds do not match the block dimension");
  Require(lower_bounds.size() == 0 || lower_bounds.allFinite(), ErrorCode::kInvalidArgument,
          "lower bounds must be finite");
  std::vector<bool> seen(dimension, false);
  for (std::size_t i : shared_indices) {
    Require(i < dimension, ErrorCode::kInvalidArgument,
            "shared index " + std::to_string(i) + " out of range");
    Require(!seen[i], ErrorCode::kInvalidArgument,
            "shared index " + std::to_string(i) + " repeated");
    seen[i] = true;
  }
  std::vector<bool> grouped(dimension, false);
  for (const SimplexGroup& group : simplex_groups) {
    Require(!group.indices.empty(), ErrorCode::kInvalidArgument, "empty simplex group");
    double floor = 0.0;
    for (std::size_t i : group.indices) {
      Require(i < dimension && !grouped[i], ErrorCode::kInvalidArgument,
              "simplex groups must be disjoint and in range");
      grouped[i] = true;
      if (lower_bounds.size() != 0) floor += lower_bounds(static_cast<Eigen::Index>(i));
    }
    Require(std::isfinite(group.total) && group.total >= floor - 1e-12,
            ErrorCode::kInvalidArgument, "simplex group total is below its lower bounds");
  }
}

Eigen::VectorXd BlockProblem::Project(const Eigen::VectorXd& x) const {
  Vector result = x;
  if (lower_bounds.size() == 0) {
    result = result.cwiseMax(0.0);
  } else {
    result = result.cwiseMax(lower_bounds);
  }
  for (const SimplexGroup& group : simplex_groups) {
    std::vector<double> y;
    double floor = 0.0;
    for (std::size_t i : group.indices) {
      const auto k = static_cast<Eigen::Index>(i);
      const double lb = lower_bounds.size() == 0 ? 0.0 : lower_bounds(k);
      floor += lb;
      y.push_back(x(k) - lb);
    }
    ProjectSimplex(y, group.total - floor);
    for (std::size_t k = 0; k < group.indices.size(); ++k) {
      const auto i = static_cast<Eigen::Index>(group.indices[k]);
      result(i) = y[k] + (lower_bounds.size() == 0 ? 0.0 : lower_bounds(i));
    }
  }
  return result;
}

Eigen::VectorXd BlockProblem::Shared(const Eigen::VectorXd& x) const {
  Vector shared(static_cast<Eigen::Index>(shared_indices.size()));
  for (std::size_t k = 0; k < shared_indices.size(); ++k) {
    shared(static_cast<Eigen::Index>(k)) = x(static_cast<Eigen::Index>(shared_indices[k]));
  }
  return shared;
}

AdmmState InitialAdmmState(const BlockProblem& block1, const BlockProblem& block2,
                           const CouplingSpec& coupling, double rho) {
  block1.Validate();
  block2.Validate();
  ValidateCoupling(block1, block2, coupling);
  Require(std::isfinite(rho) && rho > 0.0, ErrorCode::kInvalidArgument, "rho must be > 0");
  AdmmState state;
  state.x = block1.Project(Vector::Zero(static_cast<Eigen::Index>(block1.dimension)));
  state.z = block2.Project(Vector::Zero(static_cast<Eigen::Index>(block2.dimension)));
  state.lambda = Vector::Zero(coupling.b.size());
  if (coupling.kind == CouplingKind::kInequalityLeq) {
    state.slack = Vector::Zero(coupling.b.size());
  }
  state.rho = rho;
  return state;
}

ResidualReport AdmmIterate(AdmmState& state, const BlockProblem& block1,
                           const BlockProblem& block2, const CouplingSpec& coupling,
                           const AdmmConfig& config) {
  ValidateState(state, block1, block2, coupling);
  const double rho = state.rho;
  const bool inequality = coupling.kind == CouplingKind::kInequalityLeq;
  const Vector lambda = state.lambda;
  ResidualReport report;

  // x-update with z_S and s fixed.
  {
    const Vector offset = coupling.D * block2.Shared(state.z) - coupling.b +
                          (inequality ? state.slack : Vector::Zero(coupling.b.size()));
    const auto residual = [&](const Vector& x) {
      return Vector(coupling.C * block1.Shared(x) + offset);
    };
    const ScalarField f = [&](const Vector& x) {
      const Vector r = residual(x);
      return block1.objective(x) + lambda.dot(r) + 0.5 * rho * r.squaredNorm();
    };
    const GradientField g = [&](const Vector& x) {
      const Vector r = residual(x);
      return Vector(block1.gradient(x) +
                    Scatter(block1.shared_indices,
                            coupling.C.transpose() * (lambda + rho * r), block1.dimension));
    };
    InnerResult inner =
        ProjectedGradient(f, g, [&](const Vector& x) { return block1.Project(x); }, state.x,
                          config.inner_tolerance, config.max_inner_iterations);
    state.x = std::move(inner.point);
    report.inner_iterations += inner.iterations;
  }

  // z-update (and slack) with the new x_S.
  const Vector z_shared_old = block2.Shared(state.z);
  const Vector slack_old = state.slack;
  {
    const Vector offset = coupling.C * block1.Shared(state.x) - coupling.b;
    const auto n = static_cast<Eigen::Index>(block2.dimension);
    const Eigen::Index m = inequality ? coupling.b.size() : 0;
    const auto residual = [&](const Vector& v) {
      Vector r = coupling.D * block2.Shared(v.head(n)) + offset;
      if (inequality) r += v.tail(m);
      return r;
    };
    const ScalarField f = [&](const Vector& v) {
      const Vector r = residual(v);
      return block2.objective(v.head(n)) + lambda.dot(r) + 0.5 * rho * r.squaredNorm();
    };
    const GradientField g = [&](const Vector& v) {
      const Vector r = residual(v);
      const Vector pull = lambda + rho * r;
      Vector grad(n + m);
      grad.head(n) = block2.gradient(v.head(n)) +
                     Scatter(block2.shared_indices, coupling.D.transpose() * pull,
                             block2.dimension);
      if (inequality) grad.tail(m) = pull;
      return grad;
    };
    const Projection project = [&](const Vector& v) {
      Vector p(n + m);
      p.head(n) = block2.Project(v.head(n));
      if (inequality) p.tail(m) = v.tail(m).cwiseMax(0.0);
      return p;
    };
    Vector start(n + m);
    start.head(n) = state.z;
    if (inequality) start.tail(m) = state.slack;
    InnerResult inner = ProjectedGradient(f, g, project, start, config.inner_tolerance,
                                          config.max_inner_iterations);
    state.z = inner.point.head(n);
    if (inequality) state.slack = inner.point.tail(m);
    report.inner_iterations += inner.iterations;
  }

  Vector primal = coupling.C * block1.Shared(state.x) + coupling.D * block2.Shared(state.z) -
                  coupling.b;
  Vector change = coupling.D * (block2.Shared(state.z) - z_shared_old);
  if (inequality) {
    primal += state.slack;
    change += state.slack - slack_old;
  }
  state.lambda = lambda + rho * primal;
  RequireFinite(state.lambda, "multiplier");
  ++state.iteration;

  report.iteration = state.iteration;
  report.primal = primal.norm();
  report.dual = (rho * (coupling.C.transpose() * change)).norm();
  report.objective1 = block1.objective(state.x);
  report.objective2 = block2.objective(state.z);
  return report;
}

AdmmResult SolveAdmm(const BlockProblem& block1, const BlockProblem& block2,
                     const CouplingSpec& coupling, const AdmmConfig& config) {
  Require(config.tol_primal > 0.0 && config.tol_dual > 0.0, ErrorCode::kInvalidArgument,
          "ADMM tolerances must be > 0");
  Require(config.max_iterations >= 1, ErrorCode::kInvalidArgument,
          "ADMM max_iterations must be >= 1");
  Require(config.inner_tolerance > 0.0 && config.max_inner_iterations >= 1,
          ErrorCode::kInvalidArgument, "inner solver settings must be positive");
  AdmmResult result;
  result.state = InitialAdmmState(block1, block2, coupling, config.rho);
  for (int k = 0; k < config.max_iterations; ++k) {
    const ResidualReport report = AdmmIterate(result.state, block1, block2, coupling, config);
    result.trace.push_back(report);
    if (report.primal <= config.tol_primal && report.dual <= config.tol_dual) {
      result.converged = true;
      break;
    }
    if (config.residual_balancing) {
      if (report.primal > 10.0 * report.dual) {
        result.state.rho *= 2.0;
      } else if (report.dual > 10.0 * report.primal) {
        result.state.rho /= 2.0;
      }
    }
  }
  return result;
}

PassengerVehicleInstance MakePassengerVehicle(const PassengerVehicleData& data) {
  const IncidenceSet& incidence = data.passenger;
  const std::size_t links = incidence.link_count();
  const std::size_t paths = incidence.path_count();
  Require(data.od_demand.size() == incidence.od_count(), ErrorCode::kDimensionMismatch,
          "demand vector does not match the OD count");
  Require(data.passenger_times.size() == links && data.omega.size() == links &&
              data.vehicle_cost.size() == links,
          ErrorCode::kDimensionMismatch, "per-link data does not match the link count");
  for (double w : data.omega) {
    Require(std::isfinite(w) && w > 0.0, ErrorCode::kInvalidArgument,
            "occupancy omega must be > 0");
  }
  for (double c : data.vehicle_cost) {
    Require(std::isfinite(c), ErrorCode::kInvalidArgument, "vehicle cost must be finite");
  }

  PassengerVehicleInstance instance;
  const SparseMatrix a = incidence.path_link;
  const BprParams times = data.passenger_times;
  const BprParams marginal = times.Marginal();
  auto link_flows = [a](const Vector& x) {
    return a.MultiplyTranspose(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  };

  BlockProblem& passenger = instance.passenger;
  passenger.dimension = paths;
  passenger.objective = [link_flows, times](const Vector& x) {
    return TotalSystemTime(link_flows(x), times);
  };
  passenger.gradient = [a, link_flows, marginal](const Vector& x) {
    const std::vector<double> cost = Bpr(link_flows(x), marginal);
    const std::vector<double> grad = a.Multiply(cost);
    return Vector(Eigen::Map<const Vector>(grad.data(), static_cast<Eigen::Index>(grad.size())));
  };
  passenger.shared_indices.resize(paths);
  std::iota(passenger.shared_indices.begin(), passenger.shared_indices.end(), std::size_t{0});
  for (std::size_t od = 0; od < incidence.od_count(); ++od) {
    Require(std::isfinite(data.od_demand[od]) && data.od_demand[od] >= 0.0,
            ErrorCode::kNegativeDemand, "passenger demand must be >= 0");
    const auto owned = incidence.paths_of(od);
    Require(!owned.empty() || data.od_demand[od] == 0.0, ErrorCode::kNoPathForOD,
            "OD " + std::to_string(od) + " has demand but no path");
    if (owned.empty()) continue;
    passenger.simplex_groups.push_back(
        {std::vector<std::size_t>(owned.begin(), owned.end()), data.od_demand[od]});
  }

  const Vector cost =
      Eigen::Map<const Vector>(data.vehicle_cost.data(), static_cast<Eigen::Index>(links));
  BlockProblem& vehicle = instance.vehicle;
  vehicle.dimension = links;
  vehicle.objective = [cost](const Vector& z) { return cost.dot(z); };
  vehicle.gradient = [cost](const Vector&) { return cost; };
  vehicle.shared_indices.resize(links);
  std::iota(vehicle.shared_indices.begin(), vehicle.shared_indices.end(), std::size_t{0});

  CouplingSpec& coupling = instance.coupling;
  coupling.C = a.ToDense().transpose();
  coupling.D = -Eigen::Map<const Vector>(data.omega.data(), static_cast<Eigen::Index>(links))
                    .asDiagonal()
                    .toDenseMatrix();
  coupling.b = Vector::Zero(static_cast<Eigen::Index>(links));
  coupling.kind = CouplingKind::kInequalityLeq;
  return instance;
}

}  // namespace ftt
