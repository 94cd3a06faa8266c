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

#include "ftt/ftt.h"

#include <algorithm>
#include <exception>
#include <filesystem>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "ftt/adjoint.hpp"
#include "ftt/admm.hpp"
#include "ftt/error.hpp"
#include "ftt/network.hpp"
#include "ftt/propagate.hpp"
#include "ftt/rotation.hpp"
#include "ftt/solvers.hpp"
#include "ftt/tensor.hpp"
#include "report.hpp"

#ifndef FTT_VERSION_STRING
#define FTT_VERSION_STRING "0.0.0"
#endif

struct ftt_network {
  ftt::Network network;
};

struct ftt_assignment {
  ftt::Network network;
  ftt::AssignmentResult result;
};

struct ftt_admm_result {
  ftt::AdmmResult result;
};

struct ftt_tensor {
  ftt::NamedTensor tensor;
};

struct ftt_cp_model {
  ftt::CpModel model;
  double fit = 0.0;
};

struct ftt_tucker_model {
  ftt::TuckerModel model;
  std::vector<std::string> axis_names;
  double fit = 0.0;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
ftt_status Guard(Fn&& fn) {
  try {
    fn();
    return FTT_OK;
  } catch (const ftt::Error& e) {
    g_last_error = std::string(ftt::ErrorCodeName(e.code())) + ": " + e.what();
    return static_cast<ftt_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    g_last_error = "Internal: out of memory";
  } catch (const std::exception& e) {
    g_last_error = std::string("Internal: ") + e.what();
  } catch (...) {
    g_last_error = "Internal: unknown exception";
  }
  return FTT_INTERNAL;
}

void NotNull(const void* pointer, const char* name) {
  ftt::Require(pointer != nullptr, ftt::ErrorCode::kInvalidArgument,
               std::string(name) + " must not be null");
}

void CopyOut(const std::vector<double>& values, double* out, std::size_t length,
             const char* what) {
  NotNull(out, "out");
  ftt::Require(length == values.size(), ftt::ErrorCode::kDimensionMismatch,
               std::string(what) + " has " + std::to_string(values.size()) +
                   " entries, buffer holds " + std::to_string(length));
  std::copy(values.begin(), values.end(), out);
}

void CopyOut(const Eigen::VectorXd& values, double* out, std::size_t length, const char* what) {
  CopyOut(std::vector<double>(values.data(), values.data() + values.size()), out, length, what);
}

std::vector<double> Span(const double* data, std::size_t n, const char* name) {
  if (n > 0) NotNull(data, name);
  return n == 0 ? std::vector<double>{} : std::vector<double>(data, data + n);
}

// B^I is the nonzero pattern of the dense choice matrix.
ftt::IncidenceSet DenseIncidence(const double* a, const double* b, std::size_t ods,
                                 std::size_t paths, std::size_t links) {
  const std::vector<double> a_values = Span(a, paths * links, "a");
  const std::vector<double> b_values = Span(b, ods * paths, "b");
  std::vector<ftt::Triplet> a_entries;
  std::vector<ftt::Triplet> b_entries;
  std::vector<ftt::Triplet> support;
  for (std::size_t p = 0; p < paths; ++p) {
    for (std::size_t l = 0; l < links; ++l) {
      if (a_values[p * links + l] != 0.0) a_entries.push_back({p, l, a_values[p * links + l]});
    }
  }
  for (std::size_t od = 0; od < ods; ++od) {
    for (std::size_t p = 0; p < paths; ++p) {
      const double value = b_values[od * paths + p];
      if (value != 0.0) {
        b_entries.push_back({od, p, value});
        support.push_back({od, p, 1.0});
      }
    }
  }
  return ftt::IncidenceSet::Make(
      ftt::SparseMatrix::FromTriplets(paths, links, std::move(a_entries)),
      ftt::SparseMatrix::FromTriplets(ods, paths, std::move(b_entries)),
      ftt::SparseMatrix::FromTriplets(ods, paths, std::move(support)));
}

void FillRow(double p, double beta, double system_cost, double t_part, double t_nonpart,
             ftt_rotation_row* out) {
  out->p = p;
  out->beta = beta;
  out->t_part = t_part;
  out->t_nonpart = t_nonpart;
  out->system_cost = system_cost;
  out->delta = 1.0 - system_cost;
  out->delta_approx = beta * p / 2.0;
  out->poa = system_cost / ftt::PigouSo({beta}).mean_cost;
}

ftt::report::RotationRow ToRow(const ftt_rotation_row& row) {
  return {row.p,           row.beta,  row.t_part,        row.t_nonpart,
          row.system_cost, row.delta, row.delta_approx, row.poa};
}

std::filesystem::path Directory(const char* directory) {
  NotNull(directory, "directory");
  const std::filesystem::path path(directory);
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  ftt::Require(!ec && std::filesystem::is_directory(path), ftt::ErrorCode::kIo,
               "cannot create directory " + path.string());
  return path;
}

}  // namespace

extern "C" {

const char* ftt_version(void) { return FTT_VERSION_STRING; }

const char* ftt_status_name(ftt_status status) {
  switch (status) {
    case FTT_OK:
      return "Ok";
    case FTT_INTERNAL:
      return "Internal";
    default:
      break;
  }
  if (status >= FTT_INVALID_ARGUMENT && status <= FTT_INVALID_LINK) {
    // The names are string literals, so data() is null-terminated.
    return ftt::ErrorCodeName(static_cast<ftt::ErrorCode>(static_cast<int>(status))).data();
  }
  return "Unknown";
}

const char* ftt_last_error(void) { return g_last_error.c_str(); }

ftt_status ftt_network_load_gmns(const char* node_csv, const char* link_csv,
                                 const char* demand_csv, ftt_network** out) {
  return Guard([&] {
    NotNull(node_csv, "node_csv");
    NotNull(link_csv, "link_csv");
    NotNull(demand_csv, "demand_csv");
    NotNull(out, "out");
    *out = new ftt_network{ftt::LoadGmns(node_csv, link_csv, demand_csv)};
  });
}

ftt_status ftt_network_pigou(double beta, ftt_network** out) {
  return Guard([&] {
    NotNull(out, "out");
    *out = new ftt_network{ftt::PigouNetwork(beta)};
  });
}

void ftt_network_free(ftt_network* network) { delete network; }

size_t ftt_network_node_count(const ftt_network* network) {
  return network == nullptr ? 0 : network->network.node_count();
}

size_t ftt_network_link_count(const ftt_network* network) {
  return network == nullptr ? 0 : network->network.link_count();
}

size_t ftt_network_od_count(const ftt_network* network) {
  return network == nullptr ? 0 : network->network.od_count();
}

ftt_status ftt_network_path_count(const ftt_network* network, int rounds, size_t* out) {
  return Guard([&] {
    NotNull(network, "network");
    NotNull(out, "out");
    *out = ftt::GeneratePaths(network->network, rounds).size();
  });
}

ftt_status ftt_forward_flows(const double* a, const double* b, size_t ods, size_t paths,
                             size_t links, const double* od_flows, double* path_flows,
                             double* link_flows) {
  return Guard([&] {
    const ftt::IncidenceSet incidence = DenseIncidence(a, b, ods, paths, links);
    const ftt::FlowState flows = ftt::ForwardFlows(incidence, Span(od_flows, ods, "od_flows"));
    CopyOut(flows.path, path_flows, paths, "f_P");
    CopyOut(flows.link, link_flows, links, "f_L");
  });
}

ftt_status ftt_backward_times(const double* a, const double* b, size_t ods, size_t paths,
                              size_t links, const double* link_times, double* path_times,
                              double* od_times) {
  return Guard([&] {
    const ftt::IncidenceSet incidence = DenseIncidence(a, b, ods, paths, links);
    const auto [t_path, t_od] =
        ftt::BackwardTimes(incidence, Span(link_times, links, "link_times"));
    CopyOut(t_path, path_times, paths, "t_P");
    CopyOut(t_od, od_times, ods, "t_OD");
  });
}

ftt_assign_options ftt_assign_default_options(void) {
  ftt_assign_options options;
  options.method = FTT_METHOD_GP;
  options.objective = FTT_OBJECTIVE_UE;
  options.gap_tolerance = 1e-4;
  options.max_iterations = 1000;
  options.step_rule = FTT_STEP_LINE_SEARCH;
  options.step_size = 0.0;
  options.path_rounds = 2;
  options.seed = 0;
  return options;
}

ftt_status ftt_assign(const ftt_network* network, const ftt_assign_options* options,
                      ftt_assignment** out) {
  return Guard([&] {
    NotNull(network, "network");
    NotNull(options, "options");
    NotNull(out, "out");
    ftt::Require(options->gap_tolerance > 0.0, ftt::ErrorCode::kInvalidArgument,
                 "gap tolerance must be > 0");
    ftt::Require(options->max_iterations >= 1, ftt::ErrorCode::kInvalidArgument,
                 "max_iterations must be >= 1");
    ftt::SolverConfig config;
    config.gap_tolerance = options->gap_tolerance;
    config.max_iterations = options->max_iterations;
    config.step_size = options->step_size;
    config.seed = options->seed;
    switch (options->step_rule) {
      case FTT_STEP_LINE_SEARCH:
        config.step_rule = ftt::StepRule::kLineSearch;
        break;
      case FTT_STEP_FIXED:
        config.step_rule = ftt::StepRule::kFixed;
        break;
      case FTT_STEP_DIMINISHING:
        config.step_rule = ftt::StepRule::kDiminishing;
        break;
      default:
        ftt::Fail(ftt::ErrorCode::kInvalidArgument, "unknown step rule");
    }
    const bool so = options->objective == FTT_OBJECTIVE_SO;
    ftt::Require(so || options->objective == FTT_OBJECTIVE_UE, ftt::ErrorCode::kInvalidArgument,
                 "unknown objective");
    const ftt::Network& net = network->network;
    auto holder = std::make_unique<ftt_assignment>();
    holder->network = net;
    if (options->method == FTT_METHOD_GP) {
      const ftt::PathSet paths = ftt::GeneratePaths(net, options->path_rounds);
      holder->result = so ? ftt::SolveSystemOptimum(net, paths, config)
                          : ftt::SolveUeGradientProjection(net, paths, config);
    } else if (options->method == FTT_METHOD_FW) {
      holder->result = so ? ftt::SolveSystemOptimumFrankWolfe(net, config)
                          : ftt::SolveUeFrankWolfe(net, config);
    } else {
      ftt::Fail(ftt::ErrorCode::kInvalidArgument, "unknown method");
    }
    *out = holder.release();
  });
}

void ftt_assignment_free(ftt_assignment* assignment) { delete assignment; }

int ftt_assignment_converged(const ftt_assignment* assignment) {
  return assignment != nullptr && assignment->result.converged ? 1 : 0;
}

int ftt_assignment_iterations(const ftt_assignment* assignment) {
  return assignment == nullptr ? 0 : assignment->result.iterations;
}

double ftt_assignment_final_gap(const ftt_assignment* assignment) {
  if (assignment == nullptr || assignment->result.gap_history.empty()) return 0.0;
  return assignment->result.gap_history.back();
}

double ftt_assignment_total_time(const ftt_assignment* assignment) {
  return assignment == nullptr ? 0.0 : assignment->result.total_system_time;
}

double ftt_assignment_mean_cost(const ftt_assignment* assignment) {
  return assignment == nullptr ? 0.0 : assignment->result.mean_cost;
}

size_t ftt_assignment_path_count(const ftt_assignment* assignment) {
  return assignment == nullptr ? 0 : assignment->result.paths.size();
}

ftt_status ftt_assignment_link_flows(const ftt_assignment* assignment, double* out,
                                     size_t length) {
  return Guard([&] {
    NotNull(assignment, "assignment");
    CopyOut(assignment->result.flows.link, out, length, "link flows");
  });
}

ftt_status ftt_assignment_link_times(const ftt_assignment* assignment, double* out,
                                     size_t length) {
  return Guard([&] {
    NotNull(assignment, "assignment");
    CopyOut(assignment->result.times.link, out, length, "link times");
  });
}

ftt_status ftt_assignment_od_times(const ftt_assignment* assignment, double* out,
                                   size_t length) {
  return Guard([&] {
    NotNull(assignment, "assignment");
    CopyOut(assignment->result.times.od, out, length, "OD times");
  });
}

namespace {

Eigen::MatrixXd Sensitivity(const ftt_assignment& assignment) {
  const ftt::LinkTimeJacobian jacobian = ftt::LinkTimeDerivative(
      assignment.result.flows.link, ftt::BprParams::FromNetwork(assignment.network));
  return ftt::OdSensitivity(assignment.result.incidence, jacobian);
}

}  // namespace

ftt_status ftt_assignment_od_sensitivity(const ftt_assignment* assignment, double* out,
                                         size_t length) {
  return Guard([&] {
    NotNull(assignment, "assignment");
    const Eigen::MatrixXd matrix = Sensitivity(*assignment);
    // Eigen is column-major; the C interface is row-major.
    const Eigen::MatrixXd transposed = matrix.transpose();
    CopyOut(std::vector<double>(transposed.data(), transposed.data() + transposed.size()), out,
            length, "OD sensitivity");
  });
}

ftt_status ftt_assignment_write_reports(const ftt_assignment* assignment,
                                        const char* directory) {
  return Guard([&] {
    NotNull(assignment, "assignment");
    const std::filesystem::path dir = Directory(directory);
    ftt::report::WriteLinkPerformance(dir / "link_performance.csv", assignment->network,
                                      assignment->result);
    ftt::report::WritePathFlows(dir / "path_flow.csv", assignment->network, assignment->result);
    ftt::report::WriteOdTimes(dir / "od_time.csv", assignment->network, assignment->result);
    ftt::report::WriteConvergence(dir / "convergence.csv", assignment->result);
  });
}

ftt_status ftt_assignment_write_sensitivity(const ftt_assignment* assignment,
                                            const char* directory) {
  return Guard([&] {
    NotNull(assignment, "assignment");
    const std::filesystem::path dir = Directory(directory);
    ftt::report::WriteOdSensitivity(dir / "od_sensitivity.csv", assignment->network,
                                    Sensitivity(*assignment));
  });
}

ftt_status ftt_rotation_evaluate(double p, double beta, ftt_rotation_row* out) {
  return Guard([&] {
    NotNull(out, "out");
    const ftt::RotationOutcome outcome = ftt::EvaluateRotation(p, beta);
    FillRow(p, beta, outcome.system_cost, outcome.mean_time_participants,
            outcome.mean_time_nonparticipants, out);
  });
}

ftt_status ftt_rotation_evaluate_schedule(const uint8_t* entries, size_t groups, size_t days,
                                          double p, double beta, ftt_rotation_row* out) {
  return Guard([&] {
    NotNull(out, "out");
    ftt::Require(groups > 0 && days > 0, ftt::ErrorCode::kInvalidArgument,
                 "schedule needs at least one group and one day");
    NotNull(entries, "entries");
    ftt::Require(p >= 0.0 && p <= 1.0, ftt::ErrorCode::kOutOfRange,
                 "participation must lie in [0, 1], got " + std::to_string(p));
    const ftt::RotationSchedule schedule(
        groups, days, std::vector<std::uint8_t>(entries, entries + groups * days),
        std::vector<double>(groups, p / static_cast<double>(groups)));
    const ftt::ScheduleOutcome outcome = ftt::EvaluateSchedule(schedule, beta);
    FillRow(p, beta, outcome.system_cost, outcome.mean_time_participants,
            outcome.mean_time_nonparticipants, out);
  });
}

ftt_status ftt_rotation_write_csv(const ftt_rotation_row* rows, size_t count, const char* path) {
  return Guard([&] {
    if (count > 0) NotNull(rows, "rows");
    NotNull(path, "path");
    std::vector<ftt::report::RotationRow> converted;
    for (std::size_t k = 0; k < count; ++k) converted.push_back(ToRow(rows[k]));
    ftt::report::WriteRotation(path, converted);
  });
}

ftt_admm_options ftt_admm_default_options(void) {
  const ftt::AdmmConfig defaults;
  ftt_admm_options options;
  options.rho = defaults.rho;
  options.tol_primal = defaults.tol_primal;
  options.tol_dual = defaults.tol_dual;
  options.max_iterations = defaults.max_iterations;
  options.residual_balancing = defaults.residual_balancing ? 1 : 0;
  return options;
}

ftt_status ftt_admm_passenger_vehicle(const ftt_passenger_vehicle* instance,
                                      const ftt_admm_options* options, ftt_admm_result** out) {
  return Guard([&] {
    NotNull(instance, "instance");
    NotNull(options, "options");
    NotNull(out, "out");
    const std::size_t links = instance->links;
    const std::size_t paths = instance->paths;
    const std::size_t ods = instance->ods;
    const std::vector<double> a = Span(instance->path_link, paths * links, "path_link");
    if (paths > 0) NotNull(instance->path_od, "path_od");
    std::vector<ftt::Triplet> a_entries;
    std::vector<std::vector<std::size_t>> owned(ods);
    for (std::size_t p = 0; p < paths; ++p) {
      for (std::size_t l = 0; l < links; ++l) {
        if (a[p * links + l] != 0.0) a_entries.push_back({p, l, a[p * links + l]});
      }
      ftt::Require(instance->path_od[p] < ods, ftt::ErrorCode::kInvalidArgument,
                   "path " + std::to_string(p) + " refers to OD " +
                       std::to_string(instance->path_od[p]) + " of " + std::to_string(ods));
      owned[instance->path_od[p]].push_back(p);
    }
    std::vector<ftt::Triplet> b_entries;
    std::vector<ftt::Triplet> support;
    for (std::size_t od = 0; od < ods; ++od) {
      for (std::size_t p : owned[od]) {
        b_entries.push_back({od, p, 1.0 / static_cast<double>(owned[od].size())});
        support.push_back({od, p, 1.0});
      }
    }
    ftt::PassengerVehicleData data;
    data.passenger = ftt::IncidenceSet::Make(
        ftt::SparseMatrix::FromTriplets(paths, links, std::move(a_entries)),
        ftt::SparseMatrix::FromTriplets(ods, paths, std::move(b_entries)),
        ftt::SparseMatrix::FromTriplets(ods, paths, std::move(support)));
    data.od_demand = Span(instance->od_demand, ods, "od_demand");
    data.passenger_times.free_flow_time = Span(instance->free_flow_time, links, "free_flow_time");
    data.passenger_times.capacity = Span(instance->capacity, links, "capacity");
    data.passenger_times.alpha = Span(instance->alpha, links, "alpha");
    data.passenger_times.beta = Span(instance->beta, links, "beta");
    data.omega = Span(instance->omega, links, "omega");
    data.vehicle_cost = Span(instance->vehicle_cost, links, "vehicle_cost");
    const ftt::PassengerVehicleInstance problem = ftt::MakePassengerVehicle(data);

    ftt::AdmmConfig config;
    config.rho = options->rho;
    config.tol_primal = options->tol_primal;
    config.tol_dual = options->tol_dual;
    config.max_iterations = options->max_iterations;
    config.residual_balancing = options->residual_balancing != 0;
    *out = new ftt_admm_result{
        ftt::SolveAdmm(problem.passenger, problem.vehicle, problem.coupling, config)};
  });
}

void ftt_admm_result_free(ftt_admm_result* result) { delete result; }

int ftt_admm_converged(const ftt_admm_result* result) {
  return result != nullptr && result->result.converged ? 1 : 0;
}

int ftt_admm_iterations(const ftt_admm_result* result) {
  return result == nullptr ? 0 : result->result.state.iteration;
}

ftt_status ftt_admm_passenger_flows(const ftt_admm_result* result, double* out, size_t length) {
  return Guard([&] {
    NotNull(result, "result");
    CopyOut(result->result.state.x, out, length, "passenger flows");
  });
}

ftt_status ftt_admm_vehicle_flows(const ftt_admm_result* result, double* out, size_t length) {
  return Guard([&] {
    NotNull(result, "result");
    CopyOut(result->result.state.z, out, length, "vehicle flows");
  });
}

ftt_status ftt_admm_multipliers(const ftt_admm_result* result, double* out, size_t length) {
  return Guard([&] {
    NotNull(result, "result");
    CopyOut(result->result.state.lambda, out, length, "multipliers");
  });
}

ftt_status ftt_admm_slacks(const ftt_admm_result* result, double* out, size_t length) {
  return Guard([&] {
    NotNull(result, "result");
    CopyOut(result->result.state.slack, out, length, "slacks");
  });
}

ftt_status ftt_admm_write_trace(const ftt_admm_result* result, const char* directory) {
  return Guard([&] {
    NotNull(result, "result");
    ftt::report::WriteAdmmTrace(Directory(directory) / "admm_trace.csv", result->result.trace);
  });
}

ftt_status ftt_tensor_create(size_t order, const char* const* axis_names, const size_t* shape,
                             const double* data, ftt_tensor** out) {
  return Guard([&] {
    NotNull(out, "out");
    ftt::Require(order > 0, ftt::ErrorCode::kInvalidArgument, "tensor order must be >= 1");
    NotNull(axis_names, "axis_names");
    NotNull(shape, "shape");
    std::vector<std::string> names;
    std::size_t size = 1;
    for (std::size_t k = 0; k < order; ++k) {
      NotNull(axis_names[k], "axis name");
      names.emplace_back(axis_names[k]);
      size *= shape[k];
    }
    *out = new ftt_tensor{ftt::NamedTensor(std::move(names),
                                           std::vector<std::size_t>(shape, shape + order),
                                           Span(data, size, "data"))};
  });
}

void ftt_tensor_free(ftt_tensor* tensor) { delete tensor; }

ftt_status ftt_cp_als(const ftt_tensor* tensor, size_t rank, double tolerance, int max_sweeps,
                      uint64_t seed, ftt_cp_model** out) {
  return Guard([&] {
    NotNull(tensor, "tensor");
    NotNull(out, "out");
    ftt::CpOptions options;
    options.rank = rank;
    options.tolerance = tolerance;
    options.max_sweeps = max_sweeps;
    options.seed = seed;
    auto model = std::make_unique<ftt_cp_model>();
    model->model = ftt::CpAls(tensor->tensor, options);
    model->fit = ftt::Fit(tensor->tensor, ftt::CpReconstruct(model->model));
    *out = model.release();
  });
}

void ftt_cp_model_free(ftt_cp_model* model) { delete model; }

double ftt_cp_model_fit(const ftt_cp_model* model) { return model == nullptr ? 0.0 : model->fit; }

int ftt_cp_model_sweeps(const ftt_cp_model* model) {
  return model == nullptr ? 0 : model->model.sweeps;
}

ftt_status ftt_cp_model_weights(const ftt_cp_model* model, double* out, size_t length) {
  return Guard([&] {
    NotNull(model, "model");
    CopyOut(model->model.weights, out, length, "weights");
  });
}

ftt_status ftt_cp_model_write(const ftt_cp_model* model, const char* directory) {
  return Guard([&] {
    NotNull(model, "model");
    ftt::report::WriteCpModel(Directory(directory), model->model);
  });
}

ftt_status ftt_tucker_hosvd(const ftt_tensor* tensor, const size_t* ranks,
                            ftt_tucker_model** out) {
  return Guard([&] {
    NotNull(tensor, "tensor");
    NotNull(ranks, "ranks");
    NotNull(out, "out");
    const std::vector<std::size_t> rank_vector(ranks, ranks + tensor->tensor.order());
    auto model = std::make_unique<ftt_tucker_model>();
    model->model = ftt::TuckerHosvd(tensor->tensor, rank_vector);
    model->axis_names = tensor->tensor.axis_names();
    model->fit = ftt::Fit(tensor->tensor, ftt::TuckerReconstruct(model->model));
    *out = model.release();
  });
}

void ftt_tucker_model_free(ftt_tucker_model* model) { delete model; }

double ftt_tucker_model_fit(const ftt_tucker_model* model) {
  return model == nullptr ? 0.0 : model->fit;
}

ftt_status ftt_tucker_model_write(const ftt_tucker_model* model, const char* directory) {
  return Guard([&] {
    NotNull(model, "model");
    ftt::report::WriteTuckerModel(Directory(directory), model->model, model->axis_names);
  });
}

}  // extern "C"
