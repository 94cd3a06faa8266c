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

#include "ftt/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <set>

#include <Eigen/Eigenvalues>

#include "ftt/error.hpp"

namespace ftt {
namespace {

constexpr double kRidge = 1e-10;

std::size_t Product(std::span<const std::size_t> extents) {
  return std::accumulate(extents.begin(), extents.end(), std::size_t{1},
                         std::multiplies<>());
}

void RequireMode(const NamedTensor& tensor, std::size_t mode) {
  Require(mode < tensor.order(), ErrorCode::kBadMode,
          "mode " + std::to_string(mode) + " out of range for an order-" +
              std::to_string(tensor.order()) + " tensor");
}

// Sizes of the blocks before and after `mode` in row-major storage.
std::pair<std::size_t, std::size_t> OuterInner(std::span<const std::size_t> shape,
                                               std::size_t mode) {
  return {Product(shape.subspan(0, mode)), Product(shape.subspan(mode + 1))};
}

double Uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

NamedTensor::NamedTensor(std::vector<std::string> axis_names,
                         std::vector<std::size_t> shape, std::vector<double> data)
    : axis_names_(std::move(axis_names)), shape_(std::move(shape)), data_(std::move(data)) {
  Require(axis_names_.size() == shape_.size(), ErrorCode::kDimensionMismatch,
          std::to_string(axis_names_.size()) + " axis names for " +
              std::to_string(shape_.size()) + " axes");
  const std::set<std::string> unique(axis_names_.begin(), axis_names_.end());
  Require(unique.size() == axis_names_.size(), ErrorCode::kInvalidArgument,
          "axis names must be unique");
  Require(Product(shape_) == data_.size(), ErrorCode::kDimensionMismatch,
          "shape holds " + std::to_string(Product(shape_)) + " entries, data has " +
              std::to_string(data_.size()));
  for (double v : data_) {
    Require(std::isfinite(v), ErrorCode::kInvalidArgument, "tensor data must be finite");
  }
}

NamedTensor NamedTensor::Zeros(std::vector<std::string> axis_names,
                               std::vector<std::size_t> shape) {
  const std::size_t n = Product(shape);
  return NamedTensor(std::move(axis_names), std::move(shape), std::vector<double>(n, 0.0));
}

std::size_t NamedTensor::Offset(std::span<const std::size_t> index) const {
  Require(index.size() == shape_.size(), ErrorCode::kDimensionMismatch,
          "index has wrong order");
  std::size_t offset = 0;
  for (std::size_t k = 0; k < shape_.size(); ++k) {
    Require(index[k] < shape_[k], ErrorCode::kOutOfRange, "tensor index out of range");
    offset = offset * shape_[k] + index[k];
  }
  return offset;
}

double& NamedTensor::at(std::span<const std::size_t> index) {
  return data_[Offset(index)];
}

double NamedTensor::at(std::span<const std::size_t> index) const {
  return data_[Offset(index)];
}

double NamedTensor::FrobeniusNorm() const {
  double sum = 0.0;
  for (double v : data_) sum += v * v;
  return std::sqrt(sum);
}

NamedTensor NamedTensor::Permute(std::span<const std::size_t> permutation) const {
  Require(permutation.size() == order(), ErrorCode::kDimensionMismatch,
          "permutation has wrong length");
  std::vector<std::size_t> sorted(permutation.begin(), permutation.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    Require(sorted[k] == k, ErrorCode::kInvalidArgument, "not a permutation");
  }
  std::vector<std::string> names;
  std::vector<std::size_t> extents;
  for (std::size_t axis : permutation) {
    names.push_back(axis_names_[axis]);
    extents.push_back(shape_[axis]);
  }
  NamedTensor result = Zeros(std::move(names), std::move(extents));
  std::vector<std::size_t> source(order(), 0);
  std::vector<std::size_t> target(order(), 0);
  for (std::size_t offset = 0; offset < data_.size(); ++offset) {
    for (std::size_t k = 0; k < order(); ++k) target[k] = source[permutation[k]];
    result.at(target) = data_[offset];
    for (std::size_t k = order(); k-- > 0;) {
      if (++source[k] < shape_[k]) break;
      source[k] = 0;
    }
  }
  return result;
}

Eigen::MatrixXd ModeUnfold(const NamedTensor& tensor, std::size_t mode) {
  RequireMode(tensor, mode);
  const std::size_t extent = tensor.shape()[mode];
  const auto [outer, inner] = OuterInner(tensor.shape(), mode);
  Eigen::MatrixXd unfolded(static_cast<Eigen::Index>(extent),
                           static_cast<Eigen::Index>(outer * inner));
  const auto& data = tensor.data();
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < extent; ++i) {
      for (std::size_t k = 0; k < inner; ++k) {
        unfolded(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(o * inner + k)) =
            data[(o * extent + i) * inner + k];
      }
    }
  }
  return unfolded;
}

NamedTensor ModeFold(const Eigen::MatrixXd& unfolded, std::size_t mode,
                     std::vector<std::string> axis_names,
                     std::vector<std::size_t> shape) {
  Require(mode < shape.size(), ErrorCode::kBadMode,
          "mode " + std::to_string(mode) + " out of range");
  const std::size_t extent = shape[mode];
  const auto [outer, inner] = OuterInner(shape, mode);
  Require(unfolded.rows() == static_cast<Eigen::Index>(extent) &&
              unfolded.cols() == static_cast<Eigen::Index>(outer * inner),
          ErrorCode::kDimensionMismatch, "unfolding does not match the target shape");
  std::vector<double> data(extent * outer * inner);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < extent; ++i) {
      for (std::size_t k = 0; k < inner; ++k) {
        data[(o * extent + i) * inner + k] =
            unfolded(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(o * inner + k));
      }
    }
  }
  return NamedTensor(std::move(axis_names), std::move(shape), std::move(data));
}

NamedTensor ModeProduct(const NamedTensor& tensor, const Eigen::MatrixXd& matrix,
                        std::size_t mode) {
  RequireMode(tensor, mode);
  Require(matrix.cols() == static_cast<Eigen::Index>(tensor.shape()[mode]),
          ErrorCode::kDimensionMismatch,
          "matrix has " + std::to_string(matrix.cols()) + " columns, mode " +
              std::to_string(mode) + " has extent " +
              std::to_string(tensor.shape()[mode]));
  std::vector<std::size_t> shape = tensor.shape();
  shape[mode] = static_cast<std::size_t>(matrix.rows());
  return ModeFold(matrix * ModeUnfold(tensor, mode), mode, tensor.axis_names(),
                  std::move(shape));
}

namespace {

// Rows follow the column order of the mode-`mode` unfolding.
Eigen::MatrixXd KhatriRaoExcept(const std::vector<Eigen::MatrixXd>& factors,
                                std::size_t mode) {
  const Eigen::Index rank = factors.front().cols();
  Eigen::MatrixXd result = Eigen::MatrixXd::Ones(1, rank);
  for (std::size_t m = 0; m < factors.size(); ++m) {
    if (m == mode) continue;
    const Eigen::MatrixXd& a = factors[m];
    Eigen::MatrixXd next(result.rows() * a.rows(), rank);
    for (Eigen::Index r = 0; r < result.rows(); ++r) {
      for (Eigen::Index i = 0; i < a.rows(); ++i) {
        next.row(r * a.rows() + i) = result.row(r).cwiseProduct(a.row(i));
      }
    }
    result = std::move(next);
  }
  return result;
}

// Unit-normalizes columns in place and returns their former norms.
std::vector<double> NormalizeColumns(Eigen::MatrixXd& factor) {
  std::vector<double> norms(static_cast<std::size_t>(factor.cols()));
  for (Eigen::Index r = 0; r < factor.cols(); ++r) {
    const double norm = factor.col(r).norm();
    norms[static_cast<std::size_t>(r)] = norm;
    if (norm > 0.0) {
      factor.col(r) /= norm;
    } else {
      factor.col(r).setZero();
      factor(0, r) = 1.0;
    }
  }
  return norms;
}

}  // namespace

NamedTensor CpReconstruct(const CpModel& model) {
  std::vector<std::size_t> shape;
  for (const auto& factor : model.factors) shape.push_back(static_cast<std::size_t>(factor.rows()));
  NamedTensor result = NamedTensor::Zeros(model.axis_names, shape);
  if (model.factors.empty()) return result;
  // Mode 0 unfolding of the model is A_0 diag(lambda) KR^T.
  const Eigen::MatrixXd kr = KhatriRaoExcept(model.factors, 0);
  const Eigen::Map<const Eigen::VectorXd> weights(
      model.weights.data(), static_cast<Eigen::Index>(model.weights.size()));
  const Eigen::MatrixXd unfolded =
      model.factors[0] * weights.asDiagonal() * kr.transpose();
  return ModeFold(unfolded, 0, model.axis_names, shape);
}

CpModel CpAls(const NamedTensor& tensor, const CpOptions& options) {
  Require(options.rank >= 1, ErrorCode::kInvalidArgument, "CP rank must be >= 1");
  Require(std::isfinite(options.tolerance) && options.tolerance > 0.0,
          ErrorCode::kInvalidArgument, "CP tolerance must be > 0");
  Require(options.max_sweeps >= 1, ErrorCode::kInvalidArgument,
          "CP max_sweeps must be >= 1");
  Require(tensor.order() >= 1, ErrorCode::kInvalidArgument, "tensor has no axes");
  const double norm = tensor.FrobeniusNorm();
  Require(norm > 0.0, ErrorCode::kZeroNorm, "cannot decompose an all-zero tensor");

  const std::size_t order = tensor.order();
  const auto rank = static_cast<Eigen::Index>(options.rank);
  std::mt19937_64 rng(options.seed);
  CpModel model;
  model.axis_names = tensor.axis_names();
  std::vector<Eigen::MatrixXd> unfoldings;
  for (std::size_t n = 0; n < order; ++n) {
    Eigen::MatrixXd factor(static_cast<Eigen::Index>(tensor.shape()[n]), rank);
    for (Eigen::Index r = 0; r < rank; ++r) {
      for (Eigen::Index i = 0; i < factor.rows(); ++i) factor(i, r) = Uniform01(rng);
    }
    NormalizeColumns(factor);
    model.factors.push_back(std::move(factor));
    unfoldings.push_back(ModeUnfold(tensor, n));
  }
  model.weights.assign(options.rank, 1.0);

  double previous_fit = 0.0;
  for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    for (std::size_t n = 0; n < order; ++n) {
      Eigen::MatrixXd gram = Eigen::MatrixXd::Ones(rank, rank);
      for (std::size_t m = 0; m < order; ++m) {
        if (m != n) gram = gram.cwiseProduct(model.factors[m].transpose() * model.factors[m]);
      }
      const Eigen::MatrixXd rhs = unfoldings[n] * KhatriRaoExcept(model.factors, n);
      Eigen::LLT<Eigen::MatrixXd> llt(gram);
      if (llt.info() != Eigen::Success || llt.rcond() < 1e-14) {
        llt.compute(gram + kRidge * Eigen::MatrixXd::Identity(rank, rank));
        model.regularized = true;
      }
      // A_n gram = rhs, gram symmetric.
      model.factors[n] = llt.solve(rhs.transpose()).transpose();
      model.weights = NormalizeColumns(model.factors[n]);
    }
    const double fit = Fit(tensor, CpReconstruct(model));
    model.fit_history.push_back(fit);
    model.sweeps = sweep;
    if (sweep > 1 && std::abs(fit - previous_fit) < options.tolerance) break;
    previous_fit = fit;
  }

  // Sort components by weight, descending.
  std::vector<std::size_t> order_idx(options.rank);
  std::iota(order_idx.begin(), order_idx.end(), std::size_t{0});
  std::stable_sort(order_idx.begin(), order_idx.end(), [&](std::size_t a, std::size_t b) {
    return model.weights[a] > model.weights[b];
  });
  std::vector<double> weights;
  for (std::size_t r : order_idx) weights.push_back(model.weights[r]);
  for (auto& factor : model.factors) {
    Eigen::MatrixXd sorted(factor.rows(), factor.cols());
    for (std::size_t k = 0; k < order_idx.size(); ++k) {
      sorted.col(static_cast<Eigen::Index>(k)) =
          factor.col(static_cast<Eigen::Index>(order_idx[k]));
    }
    factor = std::move(sorted);
  }
  model.weights = std::move(weights);
  return model;
}

TuckerModel TuckerHosvd(const NamedTensor& tensor, std::span<const std::size_t> ranks) {
  Require(ranks.size() == tensor.order(), ErrorCode::kBadRanks,
          std::to_string(ranks.size()) + " ranks for an order-" +
              std::to_string(tensor.order()) + " tensor");
  for (std::size_t n = 0; n < ranks.size(); ++n) {
    Require(ranks[n] >= 1 && ranks[n] <= tensor.shape()[n], ErrorCode::kBadRanks,
            "rank " + std::to_string(ranks[n]) + " for mode " + std::to_string(n) +
                " must lie in [1, " + std::to_string(tensor.shape()[n]) + "]");
  }
  TuckerModel model;
  NamedTensor core = tensor;
  for (std::size_t n = 0; n < tensor.order(); ++n) {
    const Eigen::MatrixXd unfolded = ModeUnfold(tensor, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(unfolded * unfolded.transpose());
    Require(eigen.info() == Eigen::Success, ErrorCode::kInvalidArgument,
            "eigendecomposition failed for mode " + std::to_string(n));
    const Eigen::Index extent = unfolded.rows();
    const auto rank = static_cast<Eigen::Index>(ranks[n]);
    Eigen::MatrixXd factor(extent, rank);
    for (Eigen::Index r = 0; r < rank; ++r) {
      // Eigenvalues come back ascending.
      Eigen::VectorXd column = eigen.eigenvectors().col(extent - 1 - r);
      Eigen::Index largest = 0;
      column.cwiseAbs().maxCoeff(&largest);
      if (column(largest) < 0.0) column = -column;
      factor.col(r) = column;
    }
    core = ModeProduct(core, factor.transpose(), n);
    model.factors.push_back(std::move(factor));
  }
  model.core = std::move(core);
  return model;
}

NamedTensor TuckerReconstruct(const TuckerModel& model) {
  NamedTensor result = model.core;
  for (std::size_t n = 0; n < model.factors.size(); ++n) {
    result = ModeProduct(result, model.factors[n], n);
  }
  return result;
}

double Fit(const NamedTensor& tensor, const NamedTensor& approximation) {
  Require(tensor.shape() == approximation.shape(), ErrorCode::kDimensionMismatch,
          "fit needs tensors of the same shape");
  const double norm = tensor.FrobeniusNorm();
  Require(norm > 0.0, ErrorCode::kZeroNorm, "reference tensor has zero norm");
  double residual = 0.0;
  for (std::size_t k = 0; k < tensor.size(); ++k) {
    const double d = tensor.data()[k] - approximation.data()[k];
    residual += d * d;
  }
  return 1.0 - std::sqrt(residual) / norm;
}

}  // namespace ftt
