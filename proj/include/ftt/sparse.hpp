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

#ifndef FTT_SPARSE_HPP_
#define FTT_SPARSE_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ftt {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

// Compressed row storage. Column indices are strictly increasing within a
// row, so there are never duplicate (row, col) entries. Explicit zeros are
// kept: the support of a choice matrix is meaningful even where a
// probability is 0.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols);

  // Throws kInvalidArgument on duplicates, out-of-range indices or
  // non-finite values.
  static SparseMatrix FromTriplets(std::size_t rows, std::size_t cols,
                                   std::vector<Triplet> entries);
  static SparseMatrix FromDense(const Eigen::MatrixXd& dense);
  static SparseMatrix Identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nonzeros() const { return values_.size(); }

  std::span<const std::size_t> row_indices(std::size_t row) const;
  std::span<const double> row_values(std::size_t row) const;

  // Stored value at (row, col), 0 when not stored.
  double at(std::size_t row, std::size_t col) const;
  bool contains(std::size_t row, std::size_t col) const;

  // y = M x
  std::vector<double> Multiply(std::span<const double> x) const;
  // y = M^T x
  std::vector<double> MultiplyTranspose(std::span<const double> x) const;

  std::vector<double> RowSums() const;
  bool IsBinary() const;
  SparseMatrix Transpose() const;
  Eigen::MatrixXd ToDense() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

bool operator==(const SparseMatrix& a, const SparseMatrix& b);

}  // namespace ftt

#endif  // FTT_SPARSE_HPP_
