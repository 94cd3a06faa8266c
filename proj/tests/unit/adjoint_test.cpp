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
#include <limits>
#include <random>
#include <vector>

#include "common/instances.hpp"
#include "doctest.h"
#include "ftt/adjoint.hpp"
#include "ftt/error.hpp"
#include "ftt/propagate.hpp"

using namespace ftt;

namespace {

BprParams OneLink(double t0, double alpha, double beta, double capacity) {
  return BprParams{{t0}, {capacity}, {alpha}, {beta}};
}

IncidenceSet Single() {
  return IncidenceSet::Make(SparseMatrix::Identity(1), SparseMatrix::Identity(1),
                            SparseMatrix::Identity(1));
}

// One OD, two paths each on its own link, split 0.4 / 0.6.
IncidenceSet TwoRoutes() {
  return IncidenceSet::Make(SparseMatrix::Identity(2),
                            SparseMatrix::FromDense((Eigen::MatrixXd(1, 2) << 0.4, 0.6).finished()),
                            SparseMatrix::FromDense(Eigen::MatrixXd::Ones(1, 2)));
}

}  // namespace

TEST_CASE("link time derivative") {
  CHECK(LinkTimeDerivative(std::vector<double>{500}, OneLink(1, 0.0, 4, 1000)).diagonal[0] == 0.0);
  for (double f : {0.0, 10.0, 5000.0}) {
    CHECK(LinkTimeDerivative(std::vector<double>{f}, OneLink(1, 0.15, 1, 1000)).diagonal[0] ==
          doctest::Approx(1.5e-4));
  }
  const BprParams params = OneLink(1, 0.15, 4, 1000);
  const double d = LinkTimeDerivative(std::vector<double>{1000}, params).diagonal[0];
  CHECK(d == doctest::Approx(6e-4).epsilon(1e-12));
  const double h = 1e-2;
  const double fd = (Bpr(std::vector<double>{1000 + h}, params)[0] -
                     Bpr(std::vector<double>{1000 - h}, params)[0]) /
                    (2 * h);
  CHECK(std::abs(fd - d) <= 1e-8);
}

TEST_CASE("OD sensitivity small cases") {
  const LinkTimeJacobian jac{{0.25}};
  const Eigen::MatrixXd single = OdSensitivity(Single(), jac);
  CHECK(single(0, 0) == 0.25);

  const LinkTimeJacobian zero{{0, 0, 0}};
  CHECK(OdSensitivity(testing::WorkedExample(), zero).isZero());
  CHECK_THROWS_AS(OdSensitivity(testing::WorkedExample(), LinkTimeJacobian{{1, 2}}), Error);
}

TEST_CASE("OD sensitivity on two routes matches central differences") {
  const IncidenceSet incidence = TwoRoutes();
  const BprParams params{{1, 2}, {1, 1.5}, {0.15, 0.3}, {4, 2}};
  const std::vector<double> od = {1.7};
  const auto t_od = [&](std::span<const double> x) {
    return FullChain(x, incidence, params).second.od;
  };
  const FlowState flows = ForwardFlows(incidence, od);
  const Eigen::MatrixXd analytic =
      OdSensitivity(incidence, LinkTimeDerivative(flows.link, params));
  CHECK(FiniteDiffCheck(t_od, od, analytic) <= 1e-6);
}

TEST_CASE("adjoint with flow-independent times has zero path-flow gradient") {
  const IncidenceSet incidence = testing::WorkedExample();
  ObjectiveGradients grads{{0, 0, 0}, {0, 0, 0}, {1, 1, 1, 1, 1}};
  const AdjointState adjoint = AdjointBackward(incidence, LinkTimeJacobian{{0, 0, 0}}, grads);
  for (double g : adjoint.grad_path_flow) CHECK(g == 0.0);
  for (double p : adjoint.p3) CHECK(p == 1.0);
}

TEST_CASE("adjoint gradient of one OD time equals that sensitivity row") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const testing::RandomChain chain = testing::MakeRandomChain(rng);
    const IncidenceSet& inc = chain.incidence;
    const FlowState flows = ForwardFlows(inc, chain.od_flows);
    const LinkTimeJacobian jac = LinkTimeDerivative(flows.link, chain.params);
    const Eigen::MatrixXd sensitivity = OdSensitivity(inc, jac);
    for (std::size_t od = 0; od < inc.od_count(); ++od) {
      // Z = t_od = sum_p b_{od,p} t_p.
      ObjectiveGradients grads{std::vector<double>(inc.link_count(), 0.0),
                               std::vector<double>(inc.link_count(), 0.0),
                               std::vector<double>(inc.path_count(), 0.0)};
      for (std::size_t p = 0; p < inc.path_count(); ++p) grads.d_path_time[p] = inc.od_path.at(od, p);
      const std::vector<double> grad = OdGradient(inc, AdjointBackward(inc, jac, grads));
      for (std::size_t k = 0; k < inc.od_count(); ++k) {
        CHECK(std::abs(grad[k] - sensitivity(static_cast<Eigen::Index>(od),
                                             static_cast<Eigen::Index>(k))) <=
              1e-10 * std::max(1.0, std::abs(grad[k])));
      }
    }
  }
}

TEST_CASE("adjoint of the Beckmann objective gives path times") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const testing::RandomChain chain = testing::MakeRandomChain(rng);
    const IncidenceSet& inc = chain.incidence;
    const auto [flows, times] = FullChain(chain.od_flows, inc, chain.params);
    ObjectiveGradients grads{times.link, std::vector<double>(inc.link_count(), 0.0),
                             std::vector<double>(inc.path_count(), 0.0)};
    const AdjointState adjoint =
        AdjointBackward(inc, LinkTimeDerivative(flows.link, chain.params), grads);
    for (std::size_t p = 0; p < inc.path_count(); ++p) {
      CHECK(adjoint.grad_path_flow[p] == doctest::Approx(times.path[p]).epsilon(1e-12));
    }
  }
}

TEST_CASE("finite-difference checker") {
  const Eigen::MatrixXd m = (Eigen::MatrixXd(2, 2) << 1, 2, -3, 0.5).finished();
  const auto linear = [&](std::span<const double> x) {
    return std::vector<double>{x[0] + 2 * x[1], -3 * x[0] + 0.5 * x[1]};
  };
  for (double h : {1e-7, 1e-5, 1e-3}) {
    CHECK(FiniteDiffCheck(linear, std::vector<double>{0.3, -1.2}, m, h) <= 1e-10 * 1e3);
  }
  CHECK(FiniteDiffCheck(linear, std::vector<double>{0.3, -1.2}, m, 1e-3) <= 1e-10);

  const auto constant = [](std::span<const double>) { return std::vector<double>{4.0}; };
  CHECK(FiniteDiffCheck(constant, std::vector<double>{1.0}, Eigen::MatrixXd::Zero(1, 1)) == 0.0);

  const BprParams params = OneLink(1, 0.15, 4, 1000);
  const auto bpr = [&](std::span<const double> x) { return Bpr(x, params); };
  const Eigen::MatrixXd d = Eigen::MatrixXd::Constant(1, 1, 6e-4);
  CHECK(FiniteDiffCheck(bpr, std::vector<double>{1000}, d, 1e-2) <= 1e-6);
  // At h = 10 the error is the truncation term h^2 t''' / 6 relative to t',
  // with t''' = 0.15 * 24 f / C^4.
  const double truncation = 100.0 * (0.15 * 24.0 * 1000.0 / 1e12) / 6.0 / 6e-4;
  CHECK(FiniteDiffCheck(bpr, std::vector<double>{1000}, d, 10.0) ==
        doctest::Approx(truncation).epsilon(1e-3));

  const auto broken = [](std::span<const double> x) {
    return std::vector<double>{x[0] > 1.0 ? std::numeric_limits<double>::infinity() : 0.0};
  };
  try {
    FiniteDiffCheck(broken, std::vector<double>{1.0}, Eigen::MatrixXd::Zero(1, 1), 0.1);
    FAIL("non-finite evaluation accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNonFiniteEvaluation);
  }
}
