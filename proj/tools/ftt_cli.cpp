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

// ftt-cli: command-line front end over the C interface.
//
//   ftt-cli <subcommand> [options] [--config file.json] [--out dir] [--seed N]
//
// Keys of a --config JSON object are option names without the leading
// dashes; options given on the command line win.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ftt/ftt.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Carries an ftt_status out of the subcommand handlers.
class CliError : public std::runtime_error {
 public:
  CliError(ftt_status status, const std::string& message)
      : std::runtime_error(message), status_(status) {}
  ftt_status status() const { return status_; }

 private:
  ftt_status status_;
};

void Check(ftt_status status) {
  if (status != FTT_OK) throw CliError(status, ftt_last_error());
}

[[noreturn]] void Invalid(const std::string& message) {
  throw CliError(FTT_INVALID_ARGUMENT, std::string("InvalidArgument: ") + message);
}

enum class Level { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

Level LogLevel() {
  static const Level level = [] {
    const char* env = std::getenv("FTT_LOG_LEVEL");
    const std::string value = env == nullptr ? "" : env;
    if (value == "error") return Level::kError;
    if (value == "info") return Level::kInfo;
    if (value == "debug") return Level::kDebug;
    return Level::kWarn;
  }();
  return level;
}

void Log(Level level, const std::string& message) {
  static const char* const kNames[] = {"error", "warn", "info", "debug"};
  if (level <= LogLevel()) {
    std::cerr << "[" << kNames[static_cast<int>(level)] << "] " << message << '\n';
  }
}

std::string Num(double value) {
  if (value == 0.0) return "0";
  char buffer[32];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return ec == std::errc() ? std::string(buffer, end) : "nan";
}

// 15 significant digits for display, so 0.3 * 18 + 0.7 * 10 shows as 12.4.
std::string Vector(const std::vector<double>& values) {
  std::string out = "(";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    char buffer[32];
    const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), values[i],
                                         std::chars_format::general, 15);
    out += values[i] == 0.0 || ec != std::errc() ? Num(values[i]) : std::string(buffer, end);
  }
  return out + ")";
}

std::uint64_t Fnv1a(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

template <typename Handle, void (*Free)(Handle*)>
struct Owned {
  Handle* handle = nullptr;
  Owned() = default;
  Owned(const Owned&) = delete;
  Owned& operator=(const Owned&) = delete;
  ~Owned() { Free(handle); }
};

using NetworkHandle = Owned<ftt_network, ftt_network_free>;
using AssignmentHandle = Owned<ftt_assignment, ftt_assignment_free>;
using AdmmHandle = Owned<ftt_admm_result, ftt_admm_result_free>;
using TensorHandle = Owned<ftt_tensor, ftt_tensor_free>;
using CpHandle = Owned<ftt_cp_model, ftt_cp_model_free>;
using TuckerHandle = Owned<ftt_tucker_model, ftt_tucker_model_free>;

struct Common {
  std::string config;
  std::string out = "ftt_out";
  std::uint64_t seed = 0;
};

fs::path PrepareOut(const Common& common) {
  const fs::path out(common.out);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) {
    throw CliError(FTT_IO, "Io: cannot create output directory " + out.string());
  }
  return out;
}

void WriteText(const fs::path& file, const std::string& text) {
  std::ofstream stream(file, std::ios::binary | std::ios::trunc);
  stream << text;
  if (!stream) throw CliError(FTT_IO, "Io: cannot write " + file.string());
}

// Settings are hashed as sorted compact JSON; the output directory is not
// part of the configuration.
void WriteManifest(const fs::path& out, const std::string& command, const json& settings,
                   std::uint64_t seed) {
  char hash[17];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(Fnv1a(settings.dump())));
  json manifest;
  manifest["command"] = command;
  manifest["config"] = settings;
  manifest["config_hash"] = std::string("fnv1a64:") + hash;
  manifest["seed"] = seed;
  manifest["version"] = ftt_version();
  WriteText(out / "run_manifest.json", manifest.dump(2) + "\n");
  Log(Level::kInfo, "wrote " + (out / "run_manifest.json").string());
}

// ---- network-based commands ----------------------------------------------

struct NetworkArgs {
  std::string network;
};

void LoadNetwork(const NetworkArgs& args, NetworkHandle& network) {
  const fs::path dir(args.network);
  Check(ftt_network_load_gmns((dir / "node.csv").c_str(), (dir / "link.csv").c_str(),
                              (dir / "demand.csv").c_str(), &network.handle));
}

struct AssignArgs {
  NetworkArgs network;
  std::string method = "gp";
  std::string objective = "ue";
  double gap = 1e-4;
  int max_iter = 1000;
  std::string step_rule = "line-search";
  double step = 0.0;
  int rounds = 2;
};

void AddAssignOptions(CLI::App* sub, AssignArgs& args) {
  sub->add_option("--network", args.network.network, "directory with node.csv, link.csv, demand.csv")
      ->required();
  sub->add_option("--method", args.method, "gp or fw")->check(CLI::IsMember({"gp", "fw"}));
  sub->add_option("--objective", args.objective, "ue or so")->check(CLI::IsMember({"ue", "so"}));
  sub->add_option("--gap", args.gap, "relative gap tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--max-iter", args.max_iter, "iteration limit")->check(CLI::PositiveNumber);
  sub->add_option("--step-rule", args.step_rule, "gradient projection step rule")
      ->check(CLI::IsMember({"line-search", "fixed", "diminishing"}));
  sub->add_option("--step", args.step, "fixed step, or s0 for diminishing (0 = automatic)")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--rounds", args.rounds, "path generation rounds")
      ->check(CLI::NonNegativeNumber);
}

json AssignSettings(const AssignArgs& args) {
  return json{{"network", args.network.network}, {"method", args.method},
              {"objective", args.objective},     {"gap", args.gap},
              {"max_iter", args.max_iter},       {"step_rule", args.step_rule},
              {"step", args.step},               {"rounds", args.rounds}};
}

void RunAssignment(const AssignArgs& args, std::uint64_t seed, NetworkHandle& network,
                   AssignmentHandle& assignment) {
  LoadNetwork(args.network, network);
  ftt_assign_options options = ftt_assign_default_options();
  options.method = args.method == "fw" ? FTT_METHOD_FW : FTT_METHOD_GP;
  options.objective = args.objective == "so" ? FTT_OBJECTIVE_SO : FTT_OBJECTIVE_UE;
  options.gap_tolerance = args.gap;
  options.max_iterations = args.max_iter;
  options.step_rule = args.step_rule == "fixed"         ? FTT_STEP_FIXED
                      : args.step_rule == "diminishing" ? FTT_STEP_DIMINISHING
                                                        : FTT_STEP_LINE_SEARCH;
  options.step_size = args.step;
  options.path_rounds = args.rounds;
  options.seed = seed;
  Check(ftt_assign(network.handle, &options, &assignment.handle));
  const ftt_assignment* result = assignment.handle;
  Log(Level::kInfo, "assignment finished after " +
                        std::to_string(ftt_assignment_iterations(result)) + " iterations");
  if (ftt_assignment_converged(result) == 0) {
    Log(Level::kWarn, "NotConverged: gap " + Num(ftt_assignment_final_gap(result)) +
                          " above tolerance " + Num(args.gap) + " after " +
                          std::to_string(ftt_assignment_iterations(result)) + " iterations");
  }
}

void PrintAssignment(const ftt_assignment* result) {
  std::cout << "converged=" << (ftt_assignment_converged(result) != 0 ? "true" : "false")
            << " iterations=" << ftt_assignment_iterations(result)
            << " gap=" << Num(ftt_assignment_final_gap(result))
            << " total_time=" << Num(ftt_assignment_total_time(result))
            << " mean_cost=" << Num(ftt_assignment_mean_cost(result))
            << " paths=" << ftt_assignment_path_count(result) << '\n';
}

int Validate(const NetworkArgs& args, int rounds, const Common& common) {
  const fs::path out = PrepareOut(common);
  NetworkHandle network;
  LoadNetwork(args, network);
  std::size_t paths = 0;
  Check(ftt_network_path_count(network.handle, rounds, &paths));
  std::cout << "nodes=" << ftt_network_node_count(network.handle)
            << " links=" << ftt_network_link_count(network.handle)
            << " ods=" << ftt_network_od_count(network.handle) << " paths=" << paths << '\n';
  WriteManifest(out, "validate", json{{"network", args.network}, {"rounds", rounds}},
                common.seed);
  return 0;
}

int Assign(const AssignArgs& args, const Common& common) {
  const fs::path out = PrepareOut(common);
  NetworkHandle network;
  AssignmentHandle assignment;
  RunAssignment(args, common.seed, network, assignment);
  Check(ftt_assignment_write_reports(assignment.handle, out.c_str()));
  PrintAssignment(assignment.handle);
  WriteManifest(out, "assign", AssignSettings(args), common.seed);
  return 0;
}

int Sensitivity(const AssignArgs& args, const Common& common) {
  const fs::path out = PrepareOut(common);
  NetworkHandle network;
  AssignmentHandle assignment;
  RunAssignment(args, common.seed, network, assignment);
  Check(ftt_assignment_write_reports(assignment.handle, out.c_str()));
  Check(ftt_assignment_write_sensitivity(assignment.handle, out.c_str()));
  PrintAssignment(assignment.handle);
  WriteManifest(out, "sensitivity", AssignSettings(args), common.seed);
  return 0;
}

// ---- rotate --------------------------------------------------------------

// "a:b:s" -> a, a+s, ..., up to b. Values are snapped to a 1e-12 grid so
// that 0:1:0.05 ends exactly at 1.
std::vector<double> ParseGrid(const std::string& text, const char* name) {
  std::vector<double> parts;
  std::stringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      Invalid(std::string(name) + " '" + text + "' is not of the form start:stop:step");
    }
  }
  if (parts.size() == 1) parts = {parts[0], parts[0], 1.0};
  if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
    Invalid(std::string(name) + " '" + text + "' needs start <= stop and step > 0");
  }
  const auto count = static_cast<long long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
  std::vector<double> values;
  for (long long k = 0; k <= count; ++k) {
    values.push_back(std::round((parts[0] + static_cast<double>(k) * parts[2]) * 1e12) / 1e12);
  }
  return values;
}

struct Schedule {
  std::size_t groups = 0;
  std::size_t days = 0;
  std::vector<std::uint8_t> entries;
};

// Header group_id,day_1,...,day_D; one row per group with 0/1 entries.
Schedule LoadSchedule(const std::string& path) {
  std::ifstream stream(path);
  if (!stream) throw CliError(FTT_IO, "Io: cannot open schedule " + path);
  Schedule schedule;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(stream, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream row(line);
    std::string field;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (line_number == 1) {
      if (fields.empty() || fields[0] != "group_id" || fields.size() < 2) {
        throw CliError(FTT_MISSING_COLUMN,
                       "MissingColumn: schedule header must be group_id,day_1,...");
      }
      schedule.days = fields.size() - 1;
      continue;
    }
    if (fields.size() != schedule.days + 1) {
      throw CliError(FTT_PARSE, "Parse: schedule line " + std::to_string(line_number) +
                                    " has " + std::to_string(fields.size()) + " fields");
    }
    for (std::size_t d = 1; d < fields.size(); ++d) {
      if (fields[d] != "0" && fields[d] != "1") {
        throw CliError(FTT_PARSE, "Parse: schedule line " + std::to_string(line_number) +
                                      " entry '" + fields[d] + "' is not 0 or 1");
      }
      schedule.entries.push_back(fields[d] == "1" ? 1 : 0);
    }
    ++schedule.groups;
  }
  if (schedule.groups == 0) throw CliError(FTT_PARSE, "Parse: schedule " + path + " has no groups");
  return schedule;
}

struct RotateArgs {
  std::string beta_grid = "1:4:1";
  std::string p_grid = "0:1:0.05";
  std::string schedule;
};

int Rotate(const RotateArgs& args, const Common& common) {
  const std::vector<double> betas = ParseGrid(args.beta_grid, "--beta-grid");
  const std::vector<double> ps = ParseGrid(args.p_grid, "--p-grid");
  Schedule schedule;
  if (!args.schedule.empty()) schedule = LoadSchedule(args.schedule);
  const fs::path out = PrepareOut(common);
  std::vector<ftt_rotation_row> rows;
  for (double beta : betas) {
    for (double p : ps) {
      ftt_rotation_row row;
      if (args.schedule.empty()) {
        Check(ftt_rotation_evaluate(p, beta, &row));
      } else {
        Check(ftt_rotation_evaluate_schedule(schedule.entries.data(), schedule.groups,
                                             schedule.days, p, beta, &row));
      }
      rows.push_back(row);
    }
  }
  Check(ftt_rotation_write_csv(rows.data(), rows.size(),
                               (out / "rotation_outcome.csv").c_str()));
  std::cout << "rows=" << rows.size() << '\n';
  WriteManifest(out, "rotate",
                json{{"beta_grid", args.beta_grid},
                     {"p_grid", args.p_grid},
                     {"schedule", args.schedule}},
                common.seed);
  return 0;
}

// ---- admm ----------------------------------------------------------------

struct AdmmArgs {
  std::string instance;
  double rho = 1.0;
  double tol = 1e-6;
  int max_iter = 500;
  bool balance = false;
};

// {"links":[{"id","free_flow_time","capacity","alpha","beta","omega",
//  "vehicle_cost"}], "ods":[{"origin","destination","demand"}],
//  "paths":[{"od": index into ods, "links": [link ids]}]}
struct PassengerVehicleJson {
  std::vector<long long> link_ids;
  std::vector<double> path_link, od_demand, free_flow_time, capacity, alpha, beta, omega,
      vehicle_cost;
  std::vector<std::size_t> path_od;
  ftt_passenger_vehicle view{};
};

template <typename T>
T Field(const json& object, const char* key, const std::string& where) {
  if (!object.is_object() || !object.contains(key)) {
    throw CliError(FTT_MISSING_COLUMN,
                   "MissingColumn: " + where + " lacks \"" + std::string(key) + "\"");
  }
  try {
    return object.at(key).get<T>();
  } catch (const json::exception&) {
    throw CliError(FTT_PARSE, "Parse: " + where + " field \"" + key + "\" has the wrong type");
  }
}

void LoadPassengerVehicle(const std::string& path, PassengerVehicleJson& data) {
  std::ifstream stream(path);
  if (!stream) throw CliError(FTT_IO, "Io: cannot open instance " + path);
  json root;
  try {
    root = json::parse(stream);
  } catch (const json::exception& e) {
    throw CliError(FTT_PARSE, std::string("Parse: ") + path + ": " + e.what());
  }
  const auto links = Field<std::vector<json>>(root, "links", path);
  const auto ods = Field<std::vector<json>>(root, "ods", path);
  const auto paths = Field<std::vector<json>>(root, "paths", path);
  std::map<long long, std::size_t> link_index;
  for (std::size_t l = 0; l < links.size(); ++l) {
    const std::string where = "links[" + std::to_string(l) + "]";
    const auto id = Field<long long>(links[l], "id", where);
    if (!link_index.emplace(id, l).second) {
      throw CliError(FTT_DUPLICATE_ID, "DuplicateId: link id " + std::to_string(id));
    }
    data.link_ids.push_back(id);
    data.free_flow_time.push_back(Field<double>(links[l], "free_flow_time", where));
    data.capacity.push_back(Field<double>(links[l], "capacity", where));
    data.alpha.push_back(Field<double>(links[l], "alpha", where));
    data.beta.push_back(Field<double>(links[l], "beta", where));
    data.omega.push_back(Field<double>(links[l], "omega", where));
    data.vehicle_cost.push_back(Field<double>(links[l], "vehicle_cost", where));
  }
  for (std::size_t od = 0; od < ods.size(); ++od) {
    data.od_demand.push_back(Field<double>(ods[od], "demand", "ods[" + std::to_string(od) + "]"));
  }
  data.path_link.assign(paths.size() * links.size(), 0.0);
  for (std::size_t p = 0; p < paths.size(); ++p) {
    const std::string where = "paths[" + std::to_string(p) + "]";
    data.path_od.push_back(Field<std::size_t>(paths[p], "od", where));
    for (long long id : Field<std::vector<long long>>(paths[p], "links", where)) {
      const auto found = link_index.find(id);
      if (found == link_index.end()) {
        throw CliError(FTT_INVALID_LINK,
                       "InvalidLink: " + where + " uses unknown link " + std::to_string(id));
      }
      data.path_link[p * links.size() + found->second] = 1.0;
    }
  }
  data.view.links = links.size();
  data.view.paths = paths.size();
  data.view.ods = ods.size();
  data.view.path_link = data.path_link.data();
  data.view.path_od = data.path_od.data();
  data.view.od_demand = data.od_demand.data();
  data.view.free_flow_time = data.free_flow_time.data();
  data.view.capacity = data.capacity.data();
  data.view.alpha = data.alpha.data();
  data.view.beta = data.beta.data();
  data.view.omega = data.omega.data();
  data.view.vehicle_cost = data.vehicle_cost.data();
}

int Admm(const AdmmArgs& args, const Common& common) {
  PassengerVehicleJson data;
  LoadPassengerVehicle(args.instance, data);
  const fs::path out = PrepareOut(common);
  ftt_admm_options options = ftt_admm_default_options();
  options.rho = args.rho;
  options.tol_primal = args.tol;
  options.tol_dual = args.tol;
  options.max_iterations = args.max_iter;
  options.residual_balancing = args.balance ? 1 : 0;
  AdmmHandle result;
  Check(ftt_admm_passenger_vehicle(&data.view, &options, &result.handle));
  const std::size_t links = data.view.links;
  const std::size_t paths = data.view.paths;
  std::vector<double> x(paths), z(links), lambda(links), slack(links);
  Check(ftt_admm_passenger_flows(result.handle, x.data(), x.size()));
  Check(ftt_admm_vehicle_flows(result.handle, z.data(), z.size()));
  Check(ftt_admm_multipliers(result.handle, lambda.data(), lambda.size()));
  Check(ftt_admm_slacks(result.handle, slack.data(), slack.size()));
  Check(ftt_admm_write_trace(result.handle, out.c_str()));

  std::ostringstream csv;
  csv << "link_id,passenger_flow,vehicle_flow,multiplier,slack\n";
  for (std::size_t l = 0; l < links; ++l) {
    double passengers = 0.0;
    for (std::size_t p = 0; p < paths; ++p) passengers += data.path_link[p * links + l] * x[p];
    csv << data.link_ids[l] << ',' << Num(passengers) << ',' << Num(z[l]) << ','
        << Num(lambda[l]) << ',' << Num(slack[l]) << '\n';
  }
  WriteText(out / "admm_solution.csv", csv.str());

  const bool converged = ftt_admm_converged(result.handle) != 0;
  if (!converged) {
    Log(Level::kWarn, "NotConverged: ADMM stopped after " +
                          std::to_string(ftt_admm_iterations(result.handle)) +
                          " iterations; a growing multiplier suggests infeasible coupling");
  }
  std::cout << "converged=" << (converged ? "true" : "false")
            << " iterations=" << ftt_admm_iterations(result.handle)
            << " vehicle_flow=" << Vector(z) << " multiplier=" << Vector(lambda) << '\n';
  WriteManifest(out, "admm",
                json{{"instance", args.instance},
                     {"rho", args.rho},
                     {"tol", args.tol},
                     {"max_iter", args.max_iter},
                     {"balance", args.balance}},
                common.seed);
  return 0;
}

// ---- decompose -----------------------------------------------------------

struct DecomposeArgs {
  std::string method = "cp";
  std::string rank = "1";
  std::string input;
  int max_sweeps = 500;
  double tol = 1e-10;
};

std::vector<std::size_t> ParseRanks(const std::string& text) {
  std::vector<std::size_t> ranks;
  std::stringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ',')) {
    std::size_t value = 0;
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || end != token.data() + token.size() || value == 0) {
      Invalid("--rank '" + text + "' must be a positive integer or a comma list of them");
    }
    ranks.push_back(value);
  }
  if (ranks.empty()) Invalid("--rank is empty");
  return ranks;
}

int Decompose(const DecomposeArgs& args, const Common& common) {
  std::ifstream stream(args.input);
  if (!stream) throw CliError(FTT_IO, "Io: cannot open tensor " + args.input);
  json root;
  try {
    root = json::parse(stream);
  } catch (const json::exception& e) {
    throw CliError(FTT_PARSE, std::string("Parse: ") + args.input + ": " + e.what());
  }
  const auto names = Field<std::vector<std::string>>(root, "axis_names", args.input);
  const auto shape = Field<std::vector<std::size_t>>(root, "shape", args.input);
  const auto values = Field<std::vector<double>>(root, "data", args.input);
  if (names.size() != shape.size()) {
    throw CliError(FTT_DIMENSION_MISMATCH, "DimensionMismatch: " + std::to_string(names.size()) +
                                               " axis names for " + std::to_string(shape.size()) +
                                               " modes");
  }
  std::vector<const char*> name_pointers;
  for (const std::string& name : names) name_pointers.push_back(name.c_str());
  TensorHandle tensor;
  Check(ftt_tensor_create(shape.size(), name_pointers.data(), shape.data(), values.data(),
                          &tensor.handle));
  std::vector<std::size_t> ranks = ParseRanks(args.rank);
  const fs::path out = PrepareOut(common);
  double fit = 0.0;
  if (args.method == "cp") {
    if (ranks.size() != 1) Invalid("cp takes a single --rank");
    CpHandle model;
    Check(ftt_cp_als(tensor.handle, ranks[0], args.tol, args.max_sweeps, common.seed,
                     &model.handle));
    Check(ftt_cp_model_write(model.handle, out.c_str()));
    std::vector<double> weights(ranks[0]);
    Check(ftt_cp_model_weights(model.handle, weights.data(), weights.size()));
    fit = ftt_cp_model_fit(model.handle);
    std::cout << "fit=" << Num(fit) << " sweeps=" << ftt_cp_model_sweeps(model.handle)
              << " weights=" << Vector(weights) << '\n';
  } else {
    if (ranks.size() == 1) ranks.assign(shape.size(), ranks[0]);
    if (ranks.size() != shape.size()) {
      throw CliError(FTT_BAD_RANKS, "BadRanks: " + std::to_string(ranks.size()) +
                                        " ranks for " + std::to_string(shape.size()) + " modes");
    }
    TuckerHandle model;
    Check(ftt_tucker_hosvd(tensor.handle, ranks.data(), &model.handle));
    Check(ftt_tucker_model_write(model.handle, out.c_str()));
    fit = ftt_tucker_model_fit(model.handle);
    std::cout << "fit=" << Num(fit) << '\n';
  }
  Log(Level::kInfo, args.method + " fit " + Num(fit));
  WriteManifest(out, "decompose",
                json{{"method", args.method},
                     {"rank", args.rank},
                     {"input", args.input},
                     {"max_sweeps", args.max_sweeps},
                     {"tol", args.tol}},
                common.seed);
  return 0;
}

// ---- example -------------------------------------------------------------

int Example(const Common& common) {
  // Three links, five paths, four OD pairs; OD 4 splits 0.3/0.7.
  const std::vector<double> a = {1, 1, 0, 1, 1, 0, 0, 1, 0, 0, 1, 0, 0, 0, 1};
  const std::vector<double> b = {1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0.3, 0.7};
  const std::vector<double> od_flows = {4000, 1000, 2000, 2000};
  const std::vector<double> link_times = {15, 18, 10};
  std::vector<double> path_flows(5), link_flows(3), path_times(5), od_times(4);
  Check(ftt_forward_flows(a.data(), b.data(), 4, 5, 3, od_flows.data(), path_flows.data(),
                          link_flows.data()));
  Check(ftt_backward_times(a.data(), b.data(), 4, 5, 3, link_times.data(), path_times.data(),
                           od_times.data()));
  const fs::path out = PrepareOut(common);
  std::cout << "f_P=" << Vector(path_flows) << '\n'
            << "f_L=" << Vector(link_flows) << '\n'
            << "t_P=" << Vector(path_times) << '\n'
            << "t_OD=" << Vector(od_times) << '\n';
  WriteManifest(out, "example", json::object(), common.seed);
  return 0;
}

// ---- configuration files -------------------------------------------------

// Expands a --config JSON object into option tokens placed right after the
// subcommand, so later command-line tokens override them.
std::vector<std::string> ExpandConfig(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty() || args.empty()) return args;
  std::ifstream stream(path);
  if (!stream) throw CliError(FTT_IO, "Io: cannot open config " + path);
  json config;
  try {
    config = json::parse(stream);
  } catch (const json::exception& e) {
    throw CliError(FTT_PARSE, std::string("Parse: ") + path + ": " + e.what());
  }
  if (!config.is_object()) throw CliError(FTT_PARSE, "Parse: config " + path + " is not an object");
  std::vector<std::string> tokens;
  for (const auto& [key, value] : config.items()) {
    std::string flag = "--" + key;
    for (char& c : flag) c = c == '_' ? '-' : c;
    if (flag == "--config") continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) tokens.push_back(flag);
    } else if (value.is_string()) {
      tokens.push_back(flag);
      tokens.push_back(value.get<std::string>());
    } else if (value.is_number_integer() || value.is_number_unsigned()) {
      tokens.push_back(flag);
      tokens.push_back(value.dump());
    } else if (value.is_number()) {
      tokens.push_back(flag);
      tokens.push_back(Num(value.get<double>()));
    } else {
      throw CliError(FTT_PARSE, "Parse: config key \"" + key + "\" must be a scalar");
    }
  }
  args.insert(args.begin() + 1, tokens.begin(), tokens.end());
  return args;
}

void AddCommon(CLI::App* sub, Common& common) {
  sub->add_option("--config", common.config, "JSON file with option values");
  sub->add_option("--out", common.out, "output directory");
  sub->add_option("--seed", common.seed, "random seed");
}

int Run(int argc, char** argv) {
  CLI::App app{"Flow-through-tensor toolkit"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_version_flag("--version", std::string(ftt_version()));

  Common common;
  NetworkArgs validate_args;
  int validate_rounds = 2;
  AssignArgs assign_args;
  AssignArgs sensitivity_args;
  RotateArgs rotate_args;
  AdmmArgs admm_args;
  DecomposeArgs decompose_args;

  CLI::App* validate = app.add_subcommand("validate", "load and check a GMNS network");
  validate->add_option("--network", validate_args.network, "directory with the GMNS files")
      ->required();
  validate->add_option("--rounds", validate_rounds, "path generation rounds")
      ->check(CLI::NonNegativeNumber);
  AddCommon(validate, common);

  CLI::App* assign = app.add_subcommand("assign", "solve user equilibrium or system optimum");
  AddAssignOptions(assign, assign_args);
  AddCommon(assign, common);

  CLI::App* sensitivity =
      app.add_subcommand("sensitivity", "OD time sensitivity at the assignment");
  AddAssignOptions(sensitivity, sensitivity_args);
  AddCommon(sensitivity, common);

  CLI::App* rotate = app.add_subcommand("rotate", "rotation outcomes on the Pigou network");
  rotate->add_option("--beta-grid", rotate_args.beta_grid, "start:stop:step");
  rotate->add_option("--p-grid", rotate_args.p_grid, "start:stop:step");
  rotate->add_option("--schedule", rotate_args.schedule, "CSV group_id,day_1,...")
      ->check(CLI::ExistingFile);
  AddCommon(rotate, common);

  CLI::App* admm = app.add_subcommand("admm", "passenger-vehicle ADMM coordination");
  admm->add_option("--instance", admm_args.instance, "instance JSON")->required();
  admm->add_option("--rho", admm_args.rho, "penalty")->check(CLI::PositiveNumber);
  admm->add_option("--tol", admm_args.tol, "primal and dual tolerance")
      ->check(CLI::PositiveNumber);
  admm->add_option("--max-iter", admm_args.max_iter, "iteration limit")
      ->check(CLI::PositiveNumber);
  admm->add_flag("--balance", admm_args.balance, "adapt rho by residual balancing");
  AddCommon(admm, common);

  CLI::App* decompose = app.add_subcommand("decompose", "CP or Tucker decomposition");
  decompose->add_option("--method", decompose_args.method, "cp or tucker")
      ->check(CLI::IsMember({"cp", "tucker"}));
  decompose->add_option("--rank", decompose_args.rank, "N, or N1,N2,... for tucker");
  decompose->add_option("--input", decompose_args.input, "tensor JSON")->required();
  decompose->add_option("--max-sweeps", decompose_args.max_sweeps, "CP-ALS sweep limit")
      ->check(CLI::PositiveNumber);
  decompose->add_option("--tol", decompose_args.tol, "CP-ALS fit change tolerance")
      ->check(CLI::PositiveNumber);
  AddCommon(decompose, common);

  CLI::App* example = app.add_subcommand("example", "print the worked three-link example");
  AddCommon(example, common);

  std::vector<std::string> args(argv + 1, argv + argc);
  args = ExpandConfig(std::move(args));
  std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string message = e.what();
    for (char& c : message) c = c == '\n' ? ' ' : c;
    std::cerr << "error: InvalidArgument: " << message << '\n';
    return FTT_INVALID_ARGUMENT;
  }

  if (validate->parsed()) return Validate(validate_args, validate_rounds, common);
  if (assign->parsed()) return Assign(assign_args, common);
  if (sensitivity->parsed()) return Sensitivity(sensitivity_args, common);
  if (rotate->parsed()) return Rotate(rotate_args, common);
  if (admm->parsed()) return Admm(admm_args, common);
  if (decompose->parsed()) return Decompose(decompose_args, common);
  return Example(common);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Run(argc, argv);
  } catch (const CliError& e) {
    std::string message = e.what();
    for (char& c : message) c = c == '\n' ? ' ' : c;
    std::cerr << "error: " << message << '\n';
    return static_cast<int>(e.status());
  } catch (const std::exception& e) {
    std::cerr << "error: Internal: " << e.what() << '\n';
    return FTT_INTERNAL;
  }
}
