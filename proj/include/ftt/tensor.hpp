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

// Dense named-axis tensors with CP (ALS) and Tucker (HOSVD) decompositions.
//
// Storage is row-major: the last axis varies fastest. The mode-n unfolding
// puts mode-n fibers in rows; its columns enumerate the remaining axes in
// their original order, again with the last one fastest. For a row-major
// tensor this makes the mode-0 unfolding a plain reshape.

#ifndef FTT_TENSOR_HPP_
#define FTT_TENSOR_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ftt {

class NamedTensor {
 public:
  NamedTensor() = default;
  NamedTensor(std::vector<std::string> axis_names, std::vector<std::size_t> shape,
              std::vector<double> data);
  static NamedTensor Zeros(std::vector<std::string> axis_names,
                           std::vector<std::size_t> shape);

  const std::vector<std::string>& axis_names() const { return axis_names_; }
  const std::vector<std::size_t>& shape() const { return shape_; }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& mutable_data() { return data_; }
  std::size_t order() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }

  double& at(std::span<const std::size_t> index);
  double at(std::span<const std::size_t> index) const;

  double FrobeniusNorm() const;

  // Reorders axes: result axis k is this tensor's axis permutation[k].
  NamedTensor Permute(std::span<const std::size_t> permutation) const;

 private:
  std::size_t Offset(std::span<const std::size_t> index) const;

  std::vector<std::string> axis_names_;
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

Eigen::MatrixXd ModeUnfold(const NamedTensor& tensor, std::size_t mode);

// Inverse of ModeUnfold for a tensor with the given names and shape.
NamedTensor ModeFold(const Eigen::MatrixXd& unfolded, std::size_t mode,
                     std::vector<std::string> axis_names,
                     std::vector<std::size_t> shape);

// Contracts `mode` with the columns of `matrix`; that extent becomes
// matrix.rows().
NamedTensor ModeProduct(const NamedTensor& tensor, const Eigen::MatrixXd& matrix,
                        std::size_t mode);

struct CpModel {
  std::vector<std::string> axis_names;
  std::vector<double> weights;             // descending, >= 0
  std::vector<Eigen::MatrixXd> factors;    // extent x rank, unit columns
  std::vector<double> fit_history;         // fit after each sweep
  int sweeps = 0;
  bool regularized = false;  // a normal-equation solve needed eps * I
};

struct CpOptions {
  std::size_t rank = 1;
  double tolerance = 1e-10;  // on the change of fit between sweeps
  int max_sweeps = 500;
  std::uint64_t seed = 0;
};

CpModel CpAls(const NamedTensor& tensor, const CpOptions& options);
NamedTensor CpReconstruct(const CpModel& model);

struct TuckerModel {
  NamedTensor core;
  std::vector<Eigen::MatrixXd> factors;  // extent x rank, orthonormal columns
};

// Leading eigenvectors of each unfolding's Gram matrix, signed so the
// largest-magnitude entry of every column is positive.
TuckerModel TuckerHosvd(const NamedTensor& tensor, std::span<const std::size_t> ranks);
NamedTensor TuckerReconstruct(const TuckerModel& model);

// 1 - ||X - X_hat||_F / ||X||_F.
double Fit(const NamedTensor& tensor, const NamedTensor& approximation);

}  // namespace ftt

#endif  // FTT_TENSOR_HPP_
