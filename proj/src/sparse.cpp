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

#include "ftt/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ftt/error.hpp"

namespace ftt {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

SparseMatrix SparseMatrix::FromTriplets(std::size_t rows, std::size_t cols,
                                        std::vector<Triplet> entries) {
  for (const Triplet& t : entries) {
    Require(t.row < rows && t.col < cols, ErrorCode::kInvalidArgument,
            "sparse entry (" + std::to_string(t.row) + "," +
                std::to_string(t.col) + ") outside " + std::to_string(rows) +
                "x" + std::to_string(cols));
    Require(std::isfinite(t.value), ErrorCode::kInvalidArgument,
            "sparse entry (" + std::to_string(t.row) + "," +
                std::to_string(t.col) + ") is not finite");
  }
  std::sort(entries.begin(), entries.end(),
            [](const Triplet& a, const Triplet& b) {
              return a.row != b.row ? a.row < b.row : a.col < b.col;
            });
  SparseMatrix m(rows, cols);
  m.col_idx_.reserve(entries.size());
  m.values_.reserve(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (k > 0 && entries[k].row == entries[k - 1].row &&
        entries[k].col == entries[k - 1].col) {
      Fail(ErrorCode::kInvalidArgument,
           "duplicate sparse entry (" + std::to_string(entries[k].row) + "," +
               std::to_string(entries[k].col) + ")");
    }
    m.col_idx_.push_back(entries[k].col);
    m.values_.push_back(entries[k].value);
    ++m.row_ptr_[entries[k].row + 1];
  }
  for (std::size_t r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
  return m;
}

SparseMatrix SparseMatrix::FromDense(const Eigen::MatrixXd& dense) {
  std::vector<Triplet> entries;
  for (Eigen::Index r = 0; r < dense.rows(); ++r) {
    for (Eigen::Index c = 0; c < dense.cols(); ++c) {
      if (dense(r, c) != 0.0) {
        entries.push_back({static_cast<std::size_t>(r),
                           static_cast<std::size_t>(c), dense(r, c)});
      }
    }
  }
  return FromTriplets(static_cast<std::size_t>(dense.rows()),
                      static_cast<std::size_t>(dense.cols()),
                      std::move(entries));
}

SparseMatrix SparseMatrix::Identity(std::size_t n) {
  std::vector<Triplet> entries;
  entries.reserve(n);
  for (std::size_t i = 0; i < n; ++i) entries.push_back({i, i, 1.0});
  return FromTriplets(n, n, std::move(entries));
}

std::span<const std::size_t> SparseMatrix::row_indices(std::size_t row) const {
  return {col_idx_.data() + row_ptr_[row], row_ptr_[row + 1] - row_ptr_[row]};
}

std::span<const double> SparseMatrix::row_values(std::size_t row) const {
  return {values_.data() + row_ptr_[row], row_ptr_[row + 1] - row_ptr_[row]};
}

double SparseMatrix::at(std::size_t row, std::size_t col) const {
  const auto cols = row_indices(row);
  const auto it = std::lower_bound(cols.begin(), cols.end(), col);
  if (it == cols.end() || *it != col) return 0.0;
  return values_[row_ptr_[row] + static_cast<std::size_t>(it - cols.begin())];
}

bool SparseMatrix::contains(std::size_t row, std::size_t col) const {
  const auto cols = row_indices(row);
  return std::binary_search(cols.begin(), cols.end(), col);
}

std::vector<double> SparseMatrix::Multiply(std::span<const double> x) const {
  Require(x.size() == cols_, ErrorCode::kDimensionMismatch,
          "matrix has " + std::to_string(cols_) + " columns, vector has " +
              std::to_string(x.size()) + " entries");
  std::vector<double> y(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    double sum = 0.0;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      sum += values_[k] * x[col_idx_[k]];
    }
    y[r] = sum;
  }
  return y;
}

std::vector<double> SparseMatrix::MultiplyTranspose(
    std::span<const double> x) const {
  Require(x.size() == rows_, ErrorCode::kDimensionMismatch,
          "matrix has " + std::to_string(rows_) + " rows, vector has " +
              std::to_string(x.size()) + " entries");
  std::vector<double> y(cols_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      y[col_idx_[k]] += values_[k] * x[r];
    }
  }
  return y;
}

std::vector<double> SparseMatrix::RowSums() const {
  std::vector<double> sums(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      sums[r] += values_[k];
    }
  }
  return sums;
}

bool SparseMatrix::IsBinary() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return v == 0.0 || v == 1.0; });
}

SparseMatrix SparseMatrix::Transpose() const {
  std::vector<Triplet> entries;
  entries.reserve(values_.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      entries.push_back({col_idx_[k], r, values_[k]});
    }
  }
  return FromTriplets(cols_, rows_, std::move(entries));
}

Eigen::MatrixXd SparseMatrix::ToDense() const {
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      dense(static_cast<Eigen::Index>(r),
            static_cast<Eigen::Index>(col_idx_[k])) = values_[k];
    }
  }
  return dense;
}

bool operator==(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() ||
      a.nonzeros() != b.nonzeros()) {
    return false;
  }
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const auto ai = a.row_indices(r);
    const auto bi = b.row_indices(r);
    const auto av = a.row_values(r);
    const auto bv = b.row_values(r);
    if (!std::equal(ai.begin(), ai.end(), bi.begin(), bi.end()) ||
        !std::equal(av.begin(), av.end(), bv.begin(), bv.end())) {
      return false;
    }
  }
  return true;
}

}  // namespace ftt
