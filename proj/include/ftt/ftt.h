/* Copyright 2026 The FTT Authors
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the flow-through-tensor toolkit.
 *
 * Every fallible call returns an ftt_status; on failure the message of the
 * most recent error on the calling thread is available from
 * ftt_last_error(). Objects are opaque handles released with their _free
 * function; passing NULL to a _free function is a no-op. Dense matrices are
 * row-major. Output arrays are caller-allocated and their length is passed
 * explicitly; a wrong length yields FTT_DIMENSION_MISMATCH.
 */

#ifndef FTT_FTT_H_
#define FTT_FTT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(FTT_BUILDING_LIBRARY)
#define FTT_API __declspec(dllexport)
#else
#define FTT_API __declspec(dllimport)
#endif
#else
#define FTT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ftt_status {
  FTT_OK = 0,
  FTT_INVALID_ARGUMENT = 1,
  FTT_IO = 2,
  FTT_PARSE = 3,
  FTT_MISSING_COLUMN = 4,
  FTT_DANGLING_NODE_REFERENCE = 5,
  FTT_NON_POSITIVE_CAPACITY = 6,
  FTT_NON_POSITIVE_FREE_FLOW_TIME = 7,
  FTT_DUPLICATE_ID = 8,
  FTT_NEGATIVE_COST = 9,
  FTT_DISCONNECTED_OD = 10,
  FTT_ROW_SUM_VIOLATION = 11,
  FTT_DIMENSION_MISMATCH = 12,
  FTT_NEGATIVE_DEMAND = 13,
  FTT_NO_PATH_FOR_OD = 14,
  FTT_ZERO_TOTAL_COST = 15,
  FTT_OUT_OF_RANGE = 16,
  FTT_BAD_MODE = 17,
  FTT_BAD_RANKS = 18,
  FTT_ZERO_NORM = 19,
  FTT_INNER_SOLVER_DIVERGED = 20,
  FTT_NON_FINITE_EVALUATION = 21,
  FTT_INVALID_LINK = 22,
  FTT_INTERNAL = 100
} ftt_status;

FTT_API const char* ftt_version(void);
/* Stable identifier such as "DisconnectedOD"; "Ok" for FTT_OK. */
FTT_API const char* ftt_status_name(ftt_status status);
/* Message of the last failed call on this thread, "" if none. */
FTT_API const char* ftt_last_error(void);

/* ---- Networks ---------------------------------------------------------- */

typedef struct ftt_network ftt_network;

FTT_API ftt_status ftt_network_load_gmns(const char* node_csv, const char* link_csv,
                                         const char* demand_csv, ftt_network** out);
/* Two routes, demand 1: route a with time 1, route b with time x^beta. */
FTT_API ftt_status ftt_network_pigou(double beta, ftt_network** out);
FTT_API void ftt_network_free(ftt_network* network);
FTT_API size_t ftt_network_node_count(const ftt_network* network);
FTT_API size_t ftt_network_link_count(const ftt_network* network);
FTT_API size_t ftt_network_od_count(const ftt_network* network);
/* Number of paths GeneratePaths finds with the given rounds. */
FTT_API ftt_status ftt_network_path_count(const ftt_network* network, int rounds,
                                          size_t* out);

/* ---- Flow and time propagation on explicit matrices --------------------- */

/* a: paths x links (0/1), b: ods x paths (row-stochastic on its support).
 * Writes f_P (paths) and f_L (links). */
FTT_API ftt_status ftt_forward_flows(const double* a, const double* b, size_t ods,
                                     size_t paths, size_t links, const double* od_flows,
                                     double* path_flows, double* link_flows);
/* Writes t_P (paths) and t_OD (ods) from t_L. */
FTT_API ftt_status ftt_backward_times(const double* a, const double* b, size_t ods,
                                      size_t paths, size_t links, const double* link_times,
                                      double* path_times, double* od_times);

/* ---- Assignment --------------------------------------------------------- */

typedef enum ftt_method { FTT_METHOD_GP = 0, FTT_METHOD_FW = 1 } ftt_method;
typedef enum ftt_objective { FTT_OBJECTIVE_UE = 0, FTT_OBJECTIVE_SO = 1 } ftt_objective;
typedef enum ftt_step_rule {
  FTT_STEP_LINE_SEARCH = 0,
  FTT_STEP_FIXED = 1,
  FTT_STEP_DIMINISHING = 2
} ftt_step_rule;

typedef struct ftt_assign_options {
  ftt_method method;
  ftt_objective objective;
  double gap_tolerance;
  int max_iterations;
  ftt_step_rule step_rule;
  double step_size; /* fixed step, or s0 for diminishing; 0 = automatic */
  int path_rounds;  /* column-generation rounds for gradient projection */
  uint64_t seed;
} ftt_assign_options;

FTT_API ftt_assign_options ftt_assign_default_options(void);

typedef struct ftt_assignment ftt_assignment;

FTT_API ftt_status ftt_assign(const ftt_network* network, const ftt_assign_options* options,
                              ftt_assignment** out);
FTT_API void ftt_assignment_free(ftt_assignment* assignment);
FTT_API int ftt_assignment_converged(const ftt_assignment* assignment);
FTT_API int ftt_assignment_iterations(const ftt_assignment* assignment);
FTT_API double ftt_assignment_final_gap(const ftt_assignment* assignment);
FTT_API double ftt_assignment_total_time(const ftt_assignment* assignment);
FTT_API double ftt_assignment_mean_cost(const ftt_assignment* assignment);
FTT_API size_t ftt_assignment_path_count(const ftt_assignment* assignment);
FTT_API ftt_status ftt_assignment_link_flows(const ftt_assignment* assignment, double* out,
                                             size_t length);
FTT_API ftt_status ftt_assignment_link_times(const ftt_assignment* assignment, double* out,
                                             size_t length);
FTT_API ftt_status ftt_assignment_od_times(const ftt_assignment* assignment, double* out,
                                           size_t length);
/* dt_OD/df_OD at the assignment with its realized choice matrix, ods x ods. */
FTT_API ftt_status ftt_assignment_od_sensitivity(const ftt_assignment* assignment,
                                                 double* out, size_t length);
/* link_performance.csv, path_flow.csv, od_time.csv and convergence.csv. */
FTT_API ftt_status ftt_assignment_write_reports(const ftt_assignment* assignment,
                                                const char* directory);
/* od_sensitivity.csv in the directory. */
FTT_API ftt_status ftt_assignment_write_sensitivity(const ftt_assignment* assignment,
                                                    const char* directory);

/* ---- Rotation on the Pigou network ------------------------------------ */

typedef struct ftt_rotation_row {
  double p;
  double beta;
  double t_part;
  double t_nonpart;
  double system_cost;
  double delta;
  double delta_approx;
  double poa;
} ftt_rotation_row;

/* Two subgroups of p/2 alternating between the routes. */
FTT_API ftt_status ftt_rotation_evaluate(double p, double beta, ftt_rotation_row* out);
/* entries: groups x days of 0/1 (1 = SO role); each group carries p/groups. */
FTT_API ftt_status ftt_rotation_evaluate_schedule(const uint8_t* entries, size_t groups,
                                                  size_t days, double p, double beta,
                                                  ftt_rotation_row* out);
FTT_API ftt_status ftt_rotation_write_csv(const ftt_rotation_row* rows, size_t count,
                                          const char* path);

/* ---- ADMM passenger-vehicle coupling ---------------------------------- */

typedef struct ftt_passenger_vehicle {
  size_t links;
  size_t paths;
  size_t ods;
  const double* path_link;     /* paths x links, 0/1 */
  const size_t* path_od;       /* owning OD of each path */
  const double* od_demand;     /* passengers per OD */
  const double* free_flow_time; /* passenger BPR per link */
  const double* capacity;
  const double* alpha;
  const double* beta;
  const double* omega;         /* passengers per vehicle, per link */
  const double* vehicle_cost;  /* per vehicle, per link */
} ftt_passenger_vehicle;

typedef struct ftt_admm_options {
  double rho;
  double tol_primal;
  double tol_dual;
  int max_iterations;
  int residual_balancing;
} ftt_admm_options;

FTT_API ftt_admm_options ftt_admm_default_options(void);

typedef struct ftt_admm_result ftt_admm_result;

FTT_API ftt_status ftt_admm_passenger_vehicle(const ftt_passenger_vehicle* instance,
                                              const ftt_admm_options* options,
                                              ftt_admm_result** out);
FTT_API void ftt_admm_result_free(ftt_admm_result* result);
FTT_API int ftt_admm_converged(const ftt_admm_result* result);
FTT_API int ftt_admm_iterations(const ftt_admm_result* result);
/* Passenger path flows (paths). */
FTT_API ftt_status ftt_admm_passenger_flows(const ftt_admm_result* result, double* out,
                                            size_t length);
/* Vehicle link flows, multipliers and slacks (links each). */
FTT_API ftt_status ftt_admm_vehicle_flows(const ftt_admm_result* result, double* out,
                                          size_t length);
FTT_API ftt_status ftt_admm_multipliers(const ftt_admm_result* result, double* out,
                                        size_t length);
FTT_API ftt_status ftt_admm_slacks(const ftt_admm_result* result, double* out,
                                   size_t length);
/* admm_trace.csv in the directory. */
FTT_API ftt_status ftt_admm_write_trace(const ftt_admm_result* result, const char* directory);

/* ---- Tensors ------------------------------------------------------------ */

typedef struct ftt_tensor ftt_tensor;
typedef struct ftt_cp_model ftt_cp_model;
typedef struct ftt_tucker_model ftt_tucker_model;

/* data is row-major with the last axis fastest. */
FTT_API ftt_status ftt_tensor_create(size_t order, const char* const* axis_names,
                                     const size_t* shape, const double* data,
                                     ftt_tensor** out);
FTT_API void ftt_tensor_free(ftt_tensor* tensor);

FTT_API ftt_status ftt_cp_als(const ftt_tensor* tensor, size_t rank, double tolerance,
                              int max_sweeps, uint64_t seed, ftt_cp_model** out);
FTT_API void ftt_cp_model_free(ftt_cp_model* model);
FTT_API double ftt_cp_model_fit(const ftt_cp_model* model);
FTT_API int ftt_cp_model_sweeps(const ftt_cp_model* model);
FTT_API ftt_status ftt_cp_model_weights(const ftt_cp_model* model, double* out, size_t length);
/* factors_<axis>.csv per mode and weights.csv. */
FTT_API ftt_status ftt_cp_model_write(const ftt_cp_model* model, const char* directory);

/* ranks has one entry per mode. */
FTT_API ftt_status ftt_tucker_hosvd(const ftt_tensor* tensor, const size_t* ranks,
                                    ftt_tucker_model** out);
FTT_API void ftt_tucker_model_free(ftt_tucker_model* model);
FTT_API double ftt_tucker_model_fit(const ftt_tucker_model* model);
/* factors_<axis>.csv per mode and core.csv. */
FTT_API ftt_status ftt_tucker_model_write(const ftt_tucker_model* model, const char* directory);

#ifdef __cplusplus
}
#endif

#endif /* FTT_FTT_H_ */
