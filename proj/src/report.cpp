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

#include "report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ftt/error.hpp"

namespace ftt::report {
namespace {

class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& file) : file_(file) {}

  CsvWriter& Field(const std::string& text) {
    if (!first_) out_ << ',';
    first_ = false;
    out_ << text;
    return *this;
  }
  CsvWriter& Field(double value) { return Field(FormatNumber(value)); }
  CsvWriter& Field(long long value) { return Field(std::to_string(value)); }
  CsvWriter& Field(std::size_t value) { return Field(std::to_string(value)); }
  void End() {
    out_ << '\n';
    first_ = true;
  }
  void Header(std::initializer_list<const char*> names) {
    for (const char* name : names) Field(std::string(name));
    End();
  }

  void Close() {
    std::ofstream stream(file_, std::ios::binary | std::ios::trunc);
    Require(static_cast<bool>(stream), ErrorCode::kIo,
            "cannot open " + file_.string() + " for writing");
    const std::string text = out_.str();
    stream.write(text.data(), static_cast<std::streamsize>(text.size()));
    Require(static_cast<bool>(stream), ErrorCode::kIo, "write to " + file_.string() + " failed");
  }

 private:
  std::filesystem::path file_;
  std::ostringstream out_;
  bool first_ = true;
};

std::string OdLabel(const OdPair& od) {
  return std::to_string(od.origin) + "-" + std::to_string(od.destination);
}

std::string SafeAxis(const std::string& name) {
  std::string out;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-';
    out += ok ? c : '_';
  }
  return out;
}

void WriteFactor(const std::filesystem::path& file, const Eigen::MatrixXd& factor) {
  CsvWriter csv(file);
  csv.Field(std::string("index"));
  for (Eigen::Index r = 0; r < factor.cols(); ++r) {
    csv.Field("component_" + std::to_string(r + 1));
  }
  csv.End();
  for (Eigen::Index i = 0; i < factor.rows(); ++i) {
    csv.Field(static_cast<std::size_t>(i));
    for (Eigen::Index r = 0; r < factor.cols(); ++r) csv.Field(factor(i, r));
    csv.End();
  }
  csv.Close();
}

}  // namespace

std::string FormatNumber(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";  // no "-0"
  char buffer[32];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  Require(ec == std::errc(), ErrorCode::kInvalidArgument, "number formatting failed");
  return std::string(buffer, end);
}

void WriteLinkPerformance(const std::filesystem::path& file, const Network& network,
                          const AssignmentResult& result) {
  CsvWriter csv(file);
  csv.Header({"link_id", "flow", "travel_time"});
  for (std::size_t l = 0; l < network.link_count(); ++l) {
    csv.Field(static_cast<long long>(network.links()[l].id))
        .Field(result.flows.link[l])
        .Field(result.times.link[l]);
    csv.End();
  }
  csv.Close();
}

void WritePathFlows(const std::filesystem::path& file, const Network& network,
                    const AssignmentResult& result) {
  CsvWriter csv(file);
  csv.Header({"path_id", "o_zone_id", "d_zone_id", "flow", "travel_time"});
  for (const Path& path : result.paths.paths) {
    const OdPair& od = network.od_pairs()[path.od_index];
    csv.Field(path.id + 1)
        .Field(static_cast<long long>(od.origin))
        .Field(static_cast<long long>(od.destination))
        .Field(result.flows.path[path.id])
        .Field(result.times.path[path.id]);
    csv.End();
  }
  csv.Close();
}

void WriteOdTimes(const std::filesystem::path& file, const Network& network,
                  const AssignmentResult& result) {
  CsvWriter csv(file);
  csv.Header({"o_zone_id", "d_zone_id", "demand", "avg_time"});
  for (std::size_t od = 0; od < network.od_count(); ++od) {
    const OdPair& pair = network.od_pairs()[od];
    csv.Field(static_cast<long long>(pair.origin))
        .Field(static_cast<long long>(pair.destination))
        .Field(pair.demand)
        .Field(result.times.od[od]);
    csv.End();
  }
  csv.Close();
}

void WriteConvergence(const std::filesystem::path& file, const AssignmentResult& result) {
  CsvWriter csv(file);
  csv.Header({"iteration", "gap", "objective"});
  for (std::size_t k = 0; k < result.gap_history.size(); ++k) {
    csv.Field(k + 1).Field(result.gap_history[k]).Field(result.objective_history[k]);
    csv.End();
  }
  csv.Close();
}

void WriteOdSensitivity(const std::filesystem::path& file, const Network& network,
                        const Eigen::MatrixXd& sensitivity) {
  const auto n = static_cast<Eigen::Index>(network.od_count());
  Require(sensitivity.rows() == n && sensitivity.cols() == n, ErrorCode::kDimensionMismatch,
          "sensitivity matrix does not match the OD count");
  CsvWriter csv(file);
  csv.Field(std::string("od"));
  for (const OdPair& od : network.od_pairs()) csv.Field(OdLabel(od));
  csv.End();
  for (Eigen::Index i = 0; i < n; ++i) {
    csv.Field(OdLabel(network.od_pairs()[static_cast<std::size_t>(i)]));
    for (Eigen::Index j = 0; j < n; ++j) csv.Field(sensitivity(i, j));
    csv.End();
  }
  csv.Close();
}

void WriteRotation(const std::filesystem::path& file, std::span<const RotationRow> rows) {
  CsvWriter csv(file);
  csv.Header({"p", "beta", "t_part", "t_nonpart", "system_cost", "delta", "delta_approx",
              "poa"});
  for (const RotationRow& row : rows) {
    csv.Field(row.p)
        .Field(row.beta)
        .Field(row.t_part)
        .Field(row.t_nonpart)
        .Field(row.system_cost)
        .Field(row.delta)
        .Field(row.delta_approx)
        .Field(row.poa);
    csv.End();
  }
  csv.Close();
}

void WriteAdmmTrace(const std::filesystem::path& file, std::span<const ResidualReport> trace) {
  CsvWriter csv(file);
  csv.Header({"iteration", "primal_res", "dual_res", "obj1", "obj2"});
  for (const ResidualReport& report : trace) {
    csv.Field(static_cast<long long>(report.iteration))
        .Field(report.primal)
        .Field(report.dual)
        .Field(report.objective1)
        .Field(report.objective2);
    csv.End();
  }
  csv.Close();
}

void WriteCpModel(const std::filesystem::path& directory, const CpModel& model) {
  for (std::size_t n = 0; n < model.factors.size(); ++n) {
    WriteFactor(directory / ("factors_" + SafeAxis(model.axis_names[n]) + ".csv"),
                model.factors[n]);
  }
  CsvWriter csv(directory / "weights.csv");
  csv.Header({"component", "weight"});
  for (std::size_t r = 0; r < model.weights.size(); ++r) {
    csv.Field(r + 1).Field(model.weights[r]);
    csv.End();
  }
  csv.Close();
}

void WriteTuckerModel(const std::filesystem::path& directory, const TuckerModel& model,
                      const std::vector<std::string>& axis_names) {
  for (std::size_t n = 0; n < model.factors.size(); ++n) {
    WriteFactor(directory / ("factors_" + SafeAxis(axis_names[n]) + ".csv"), model.factors[n]);
  }
  CsvWriter csv(directory / "core.csv");
  for (const std::string& name : axis_names) csv.Field(SafeAxis(name));
  csv.Field(std::string("value"));
  csv.End();
  const auto& shape = model.core.shape();
  std::vector<std::size_t> index(shape.size(), 0);
  for (double value : model.core.data()) {
    for (std::size_t i : index) csv.Field(i);
    csv.Field(value);
    csv.End();
    for (std::size_t k = shape.size(); k-- > 0;) {
      if (++index[k] < shape[k]) break;
      index[k] = 0;
    }
  }
  csv.Close();
}

}  // namespace ftt::report
