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

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "ftt/error.hpp"
#include "ftt/tensor.hpp"

using namespace ftt;

namespace {

NamedTensor Iota(std::vector<std::size_t> shape) {
  std::size_t size = 1;
  for (std::size_t n : shape) size *= n;
  std::vector<double> data(size);
  std::iota(data.begin(), data.end(), 1.0);
  std::vector<std::string> names;
  for (std::size_t k = 0; k < shape.size(); ++k) names.push_back("m" + std::to_string(k));
  return NamedTensor(names, shape, data);
}

// sum_r w_r u_r o v_r o x_r with explicit loops.
NamedTensor Outer3(const std::vector<double>& weights, const std::vector<Eigen::VectorXd>& u,
                   const std::vector<Eigen::VectorXd>& v, const std::vector<Eigen::VectorXd>& x) {
  const std::size_t I = u[0].size(), J = v[0].size(), K = x[0].size();
  std::vector<double> data(I * J * K, 0.0);
  for (std::size_t r = 0; r < weights.size(); ++r)
    for (std::size_t i = 0; i < I; ++i)
      for (std::size_t j = 0; j < J; ++j)
        for (std::size_t k = 0; k < K; ++k)
          data[(i * J + j) * K + k] += weights[r] * u[r](i) * v[r](j) * x[r](k);
  return NamedTensor({"a", "b", "c"}, {I, J, K}, data);
}

Eigen::VectorXd Vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double value : values) v(i++) = value;
  return v;
}

}  // namespace

TEST_CASE("named tensor validation") {
  CHECK_THROWS_AS(NamedTensor({"a", "a"}, {1, 2}, {1, 2}), Error);
  CHECK_THROWS_AS(NamedTensor({"a", "b"}, {2, 2}, {1, 2, 3}), Error);
  CHECK_THROWS_AS(NamedTensor({"a"}, {1}, {std::nan("")}), Error);
}

TEST_CASE("mode unfolding of a 2x2x2 tensor") {
  const NamedTensor x = Iota({2, 2, 2});
  const Eigen::MatrixXd expected = (Eigen::MatrixXd(2, 4) << 1, 2, 3, 4, 5, 6, 7, 8).finished();
  CHECK(ModeUnfold(x, 0) == expected);
  // Mode 1: rows j, columns (i, k) with k fastest.
  const Eigen::MatrixXd mode1 = (Eigen::MatrixXd(2, 4) << 1, 2, 5, 6, 3, 4, 7, 8).finished();
  CHECK(ModeUnfold(x, 1) == mode1);
  try {
    ModeUnfold(x, 3);
    FAIL("bad mode accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kBadMode);
  }
}

TEST_CASE("unfold then fold is the identity") {
  const NamedTensor x = Iota({3, 4, 2, 5});
  for (std::size_t mode = 0; mode < 4; ++mode) {
    const NamedTensor back = ModeFold(ModeUnfold(x, mode), mode, x.axis_names(), x.shape());
    CHECK(back.data() == x.data());
  }
  const NamedTensor vector = Iota({5});
  CHECK(ModeUnfold(vector, 0).rows() == 5);
  CHECK(ModeUnfold(vector, 0).cols() == 1);
}

TEST_CASE("mode product") {
  const NamedTensor x = Iota({3, 4, 2});
  CHECK(ModeProduct(x, Eigen::MatrixXd::Identity(4, 4), 1).data() == x.data());

  const NamedTensor sums = ModeProduct(x, Eigen::MatrixXd::Ones(1, 3), 0);
  CHECK(sums.shape() == std::vector<std::size_t>{1, 4, 2});
  for (std::size_t j = 0; j < 4; ++j) {
    for (std::size_t k = 0; k < 2; ++k) {
      double total = 0.0;
      for (std::size_t i = 0; i < 3; ++i) total += x.at(std::vector<std::size_t>{i, j, k});
      CHECK(sums.at(std::vector<std::size_t>{0, j, k}) == total);
    }
  }

  const Eigen::VectorXd u = Vec({1, -2, 3}), v = Vec({2, 1}), w = Vec({1, 0, -1, 4});
  const Eigen::MatrixXd m = (Eigen::MatrixXd(2, 3) << 1, 2, 0, -1, 0.5, 3).finished();
  const NamedTensor product = ModeProduct(Outer3({1.0}, {u}, {v}, {w}), m, 0);
  const NamedTensor expected = Outer3({1.0}, {m * u}, {v}, {w});
  for (std::size_t i = 0; i < product.size(); ++i) {
    CHECK(product.data()[i] == doctest::Approx(expected.data()[i]).epsilon(1e-14));
  }
  CHECK_THROWS_AS(ModeProduct(x, Eigen::MatrixXd::Ones(2, 5), 0), Error);
}

TEST_CASE("permute keeps entries at permuted indices") {
  const NamedTensor x = Iota({2, 3, 4});
  const std::vector<std::size_t> order = {2, 0, 1};
  const NamedTensor y = x.Permute(order);
  CHECK(y.shape() == std::vector<std::size_t>{4, 2, 3});
  CHECK(y.axis_names() == std::vector<std::string>{"m2", "m0", "m1"});
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 4; ++k)
        CHECK(y.at(std::vector<std::size_t>{k, i, j}) == x.at(std::vector<std::size_t>{i, j, k}));
  CHECK(y.FrobeniusNorm() == x.FrobeniusNorm());
}

TEST_CASE("CP-ALS on exact low-rank tensors") {
  SUBCASE("rank one") {
    const NamedTensor x = Outer3({1.0}, {Vec({1, 2})}, {Vec({1, 1})}, {Vec({1, 0})});
    CpOptions options;
    options.rank = 1;
    options.seed = 4;
    const CpModel model = CpAls(x, options);
    CHECK(1.0 - Fit(x, CpReconstruct(model)) <= 1e-10);
    CHECK(model.weights[0] == doctest::Approx(std::sqrt(5.0) * std::sqrt(2.0)));
  }
  SUBCASE("rank two, and rank one fits worse") {
    const NamedTensor x = Outer3({5.0, 2.0}, {Vec({1, 0, 1, 0}), Vec({0, 1, 0, 1})},
                                 {Vec({1, 1, 0}), Vec({0, 1, 1})}, {Vec({1, 2}), Vec({2, -1})});
    CpOptions options;
    options.rank = 2;
    options.tolerance = 1e-14;
    const CpModel two = CpAls(x, options);
    const double fit2 = Fit(x, CpReconstruct(two));
    CHECK(fit2 >= 1.0 - 1e-6);
    CHECK(fit2 == doctest::Approx(two.fit_history.back()).epsilon(1e-12));
    for (std::size_t k = 1; k < two.fit_history.size(); ++k) {
      CHECK(two.fit_history[k] >= two.fit_history[k - 1] - 1e-12);
    }
    CHECK(two.weights[0] >= two.weights[1]);
    for (const Eigen::MatrixXd& factor : two.factors) {
      for (Eigen::Index r = 0; r < factor.cols(); ++r) {
        CHECK(std::abs(factor.col(r).norm() - 1.0) <= 1e-10);
      }
    }
    options.rank = 1;
    CHECK(Fit(x, CpReconstruct(CpAls(x, options))) < fit2);
  }
  SUBCASE("seeded runs are reproducible") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> normal;
    std::vector<double> data(4 * 3 * 5);
    for (double& value : data) value = normal(rng);
    const NamedTensor x({"a", "b", "c"}, {4, 3, 5}, data);
    CpOptions options;
    options.rank = 3;
    options.max_sweeps = 50;
    options.seed = 17;
    const CpModel first = CpAls(x, options);
    const CpModel second = CpAls(x, options);
    CHECK(first.weights == second.weights);
    CHECK(first.factors[2] == second.factors[2]);
  }
}

TEST_CASE("CP reconstruct") {
  CpModel model;
  model.axis_names = {"a", "b"};
  model.weights = {0.0};
  model.factors = {Eigen::MatrixXd::Ones(2, 1), Eigen::MatrixXd::Ones(3, 1)};
  const NamedTensor zero = CpReconstruct(model);
  for (double value : zero.data()) CHECK(value == 0.0);
  model.weights = {2.0};
  model.factors = {Vec({1, 0}), Vec({0, 1, 0})};
  const NamedTensor single = CpReconstruct(model);
  CHECK(single.at(std::vector<std::size_t>{0, 1}) == 2.0);
  CHECK(single.FrobeniusNorm() == 2.0);
}

TEST_CASE("HOSVD") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal;
  std::vector<double> data(5 * 4 * 3);
  for (double& value : data) value = normal(rng);
  const NamedTensor x({"a", "b", "c"}, {5, 4, 3}, data);

  SUBCASE("full ranks reconstruct exactly with orthonormal factors") {
    const std::vector<std::size_t> ranks = {5, 4, 3};
    const TuckerModel model = TuckerHosvd(x, ranks);
    CHECK(1.0 - Fit(x, TuckerReconstruct(model)) <= 1e-10);
    for (const Eigen::MatrixXd& factor : model.factors) {
      const Eigen::MatrixXd gram = factor.transpose() * factor;
      CHECK((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() <=
            1e-10);
    }
  }
  SUBCASE("synthetic 2x2x2 core is recovered") {
    const NamedTensor core({"a", "b", "c"}, {2, 2, 2}, {3, 1, -1, 2, 0.5, -2, 1, 4});
    NamedTensor built = core;
    const std::vector<std::size_t> extents = {6, 5, 4};
    for (std::size_t mode = 0; mode < 3; ++mode) {
      Eigen::MatrixXd random(static_cast<Eigen::Index>(extents[mode]), 2);
      for (Eigen::Index i = 0; i < random.size(); ++i) random.data()[i] = normal(rng);
      const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(random).householderQ() *
                                Eigen::MatrixXd::Identity(random.rows(), 2);
      built = ModeProduct(built, q, mode);
    }
    const std::vector<std::size_t> ranks = {2, 2, 2};
    const NamedTensor approx = TuckerReconstruct(TuckerHosvd(built, ranks));
    double error = 0.0;
    for (std::size_t i = 0; i < built.size(); ++i) {
      error = std::max(error, std::abs(built.data()[i] - approx.data()[i]));
    }
    CHECK(error <= 1e-8);
  }
  SUBCASE("ranks larger than extents") {
    const std::vector<std::size_t> ranks = {6, 4, 3};
    try {
      TuckerHosvd(x, ranks);
      FAIL("bad ranks accepted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kBadRanks);
    }
  }
}

TEST_CASE("fit") {
  const NamedTensor x = Iota({2, 3});
  CHECK(Fit(x, x) == 1.0);
  CHECK(Fit(x, NamedTensor::Zeros(x.axis_names(), x.shape())) == 0.0);
  NamedTensor half = x;
  for (double& value : half.mutable_data()) value *= 0.5;
  CHECK(Fit(x, half) == doctest::Approx(0.5).epsilon(1e-15));
  try {
    Fit(NamedTensor::Zeros({"a"}, {3}), NamedTensor::Zeros({"a"}, {3}));
    FAIL("zero norm accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kZeroNorm);
  }
}
