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

// CSV report writers. Numbers use the shortest representation that round
// trips, so identical results give identical bytes.

#ifndef FTT_SRC_REPORT_HPP_
#define FTT_SRC_REPORT_HPP_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ftt/admm.hpp"
#include "ftt/network.hpp"
#include "ftt/solvers.hpp"
#include "ftt/tensor.hpp"

namespace ftt::report {

std::string FormatNumber(double value);

struct RotationRow {
  double p = 0.0;
  double beta = 1.0;
  double t_part = 0.0;
  double t_nonpart = 0.0;
  double system_cost = 0.0;
  double delta = 0.0;
  double delta_approx = 0.0;
  double poa = 0.0;
};

// Each writer throws kIo when the file cannot be written.
void WriteLinkPerformance(const std::filesystem::path& file, const Network& network,
                          const AssignmentResult& result);
void WritePathFlows(const std::filesystem::path& file, const Network& network,
                    const AssignmentResult& result);
void WriteOdTimes(const std::filesystem::path& file, const Network& network,
                  const AssignmentResult& result);
void WriteConvergence(const std::filesystem::path& file, const AssignmentResult& result);
// Rows and columns labelled "origin-destination".
void WriteOdSensitivity(const std::filesystem::path& file, const Network& network,
                        const Eigen::MatrixXd& sensitivity);
void WriteRotation(const std::filesystem::path& file, std::span<const RotationRow> rows);
void WriteAdmmTrace(const std::filesystem::path& file,
                    std::span<const ResidualReport> trace);
// factors_<axis>.csv per mode and weights.csv.
void WriteCpModel(const std::filesystem::path& directory, const CpModel& model);
// factors_<axis>.csv per mode and core.csv (one row per core entry).
void WriteTuckerModel(const std::filesystem::path& directory, const TuckerModel& model,
                      const std::vector<std::string>& axis_names);

}  // namespace ftt::report

#endif  // FTT_SRC_REPORT_HPP_
