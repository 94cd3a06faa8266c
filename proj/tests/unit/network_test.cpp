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
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "common/instances.hpp"
#include "doctest.h"
#include "ftt/error.hpp"
#include "ftt/network.hpp"

namespace fs = std::filesystem;
using namespace ftt;

namespace {

struct GmnsFiles {
  fs::path dir;
  explicit GmnsFiles(const std::string& name) : dir(fs::temp_directory_path() / name) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~GmnsFiles() { fs::remove_all(dir); }

  void Write(const char* file, const std::string& text) const {
    std::ofstream(dir / file, std::ios::binary) << text;
  }
  Network Load() const {
    return LoadGmns(dir / "node.csv", dir / "link.csv", dir / "demand.csv");
  }
};

const char* kNodes = "node_id,x_coord,y_coord\n1,0,0\n2,1,0\n3,2,0\n";
const char* kLinks =
    "link_id,from_node_id,to_node_id,free_flow_time,capacity,bpr_alpha,bpr_beta\n"
    "1,1,2,1,100,0.15,4\n2,2,3,1,100,0.15,4\n";

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an ftt::Error");
  return ErrorCode::kInvalidArgument;
}

// Two parallel links 1 -> 2 with the given ids.
Network Parallel(LinkId first, LinkId second) {
  std::vector<Node> nodes = {{1, std::nullopt}, {2, std::nullopt}};
  std::vector<Link> links(2);
  links[0].id = first;
  links[1].id = second;
  for (Link& link : links) {
    link.from_node = 1;
    link.to_node = 2;
  }
  return Network(nodes, links, {{1, 2, 1.0}});
}

Network Corridor() {
  const fs::path dir = fs::path(FTT_TEST_DATA_DIR) / "two_corridor";
  return LoadGmns(dir / "node.csv", dir / "link.csv", dir / "demand.csv");
}

}  // namespace

TEST_CASE("GMNS corridor files load with the four example demands") {
  const Network network = Corridor();
  CHECK(network.node_count() == 6);
  REQUIRE(network.od_count() == 4);
  const std::vector<double> demands = network.demands();
  CHECK(demands == std::vector<double>{4000, 1000, 2000, 2000});
}

TEST_CASE("empty demand file gives a valid network without OD pairs") {
  GmnsFiles files("ftt_unit_gmns_empty");
  files.Write("node.csv", kNodes);
  files.Write("link.csv", kLinks);
  files.Write("demand.csv", "o_zone_id,d_zone_id,volume\n");
  const Network network = files.Load();
  CHECK(network.od_count() == 0);
  CHECK(network.link_count() == 2);
}

TEST_CASE("GMNS error codes") {
  GmnsFiles files("ftt_unit_gmns_errors");
  files.Write("node.csv", kNodes);
  files.Write("demand.csv", "o_zone_id,d_zone_id,volume\n1,3,5\n");

  SUBCASE("capacity 0") {
    files.Write("link.csv",
                "link_id,from_node_id,to_node_id,free_flow_time,capacity,bpr_alpha,bpr_beta\n"
                "1,1,2,1,0,0.15,4\n");
    CHECK(CodeOf([&] { files.Load(); }) == ErrorCode::kNonPositiveCapacity);
    try {
      files.Load();
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("row") != std::string::npos);
    }
  }
  SUBCASE("missing column") {
    files.Write("link.csv", "link_id,from_node_id,to_node_id,capacity\n1,1,2,10\n");
    CHECK(CodeOf([&] { files.Load(); }) == ErrorCode::kMissingColumn);
  }
  SUBCASE("dangling node") {
    files.Write("link.csv",
                "link_id,from_node_id,to_node_id,free_flow_time,capacity,bpr_alpha,bpr_beta\n"
                "1,1,9,1,10,0.15,4\n");
    CHECK(CodeOf([&] { files.Load(); }) == ErrorCode::kDanglingNodeReference);
  }
  SUBCASE("missing file") {
    fs::remove(files.dir / "node.csv");
    files.Write("link.csv", kLinks);
    CHECK(CodeOf([&] { files.Load(); }) == ErrorCode::kIo);
  }
}

TEST_CASE("shortest path takes the cheaper parallel link") {
  const Network network = Parallel(1, 2);
  const ShortestPathTree tree = ShortestPath(network, std::vector<double>{1.0, 2.0}, 0);
  CHECK(tree.labels[1] == 1.0);
  CHECK(network.links()[tree.pred_link[1]].id == 1);
}

TEST_CASE("equal-cost parallel links break ties toward the smaller id") {
  const Network network = Parallel(7, 3);
  const ShortestPathTree tree = ShortestPath(network, std::vector<double>{2.0, 2.0}, 0);
  CHECK(network.links()[tree.pred_link[1]].id == 3);
}

TEST_CASE("negative link cost is rejected") {
  const Network network = Parallel(1, 2);
  CHECK(CodeOf([&] { ShortestPath(network, std::vector<double>{-1.0, 2.0}, 0); }) ==
        ErrorCode::kNegativeCost);
}

TEST_CASE("unreachable nodes have infinite labels") {
  std::vector<Node> nodes = {{1, std::nullopt}, {2, std::nullopt}, {3, std::nullopt}};
  Link link;
  link.id = 1;
  link.from_node = 1;
  link.to_node = 2;
  const Network network(nodes, {link}, {});
  const ShortestPathTree tree = ShortestPath(network, std::vector<double>{1.0}, 0);
  CHECK(std::isinf(tree.labels[2]));
  CHECK(TracePath(network, tree, 2).empty());
}

TEST_CASE("Dijkstra labels satisfy Bellman optimality on random networks") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Network network = testing::MakeRandomNetwork(rng);
    std::vector<double> costs;
    for (std::size_t l = 0; l < network.link_count(); ++l) {
      costs.push_back(testing::Uniform(rng, 0.0, 5.0));
    }
    const ShortestPathTree tree = ShortestPath(network, costs, 0);
    CHECK(tree.labels[0] == 0.0);
    for (std::size_t l = 0; l < network.link_count(); ++l) {
      CHECK(tree.labels[network.head(l)] <= tree.labels[network.tail(l)] + costs[l] + 1e-12);
    }
    for (std::size_t node = 1; node < network.node_count(); ++node) {
      const std::size_t l = tree.pred_link[node];
      REQUIRE(l != kNoIndex);
      CHECK(tree.labels[node] == doctest::Approx(tree.labels[network.tail(l)] + costs[l]));
    }
  }
}

TEST_CASE("corridor free-flow shortest paths and generated path set") {
  const Network network = Corridor();
  const PathSet rounds1 = GeneratePaths(network, 1);
  CHECK(rounds1.size() == network.od_count());

  const PathSet paths = GeneratePaths(network, 3);
  // Exhaustive enumeration is the oracle: five simple paths over these ODs.
  const PathSet all = testing::EnumerateSimplePaths(network);
  CHECK(all.size() == 5);
  CHECK(paths.size() == 5);
  std::set<std::vector<std::size_t>> expected, found;
  for (const Path& p : all.paths) expected.insert(p.links);
  for (const Path& p : paths.paths) {
    CHECK(IsValidPath(network, p));
    found.insert(p.links);
  }
  CHECK(found == expected);

  // The path-link incidence over the physical links (ids 1, 2, 3) is the
  // 5 x 3 worked-example matrix up to row order.
  const Eigen::MatrixXd a = BuildIncidence(paths, network.link_count()).ToDense();
  std::multiset<std::vector<int>> rows;
  for (Eigen::Index p = 0; p < a.rows(); ++p) {
    rows.insert({static_cast<int>(a(p, 0)), static_cast<int>(a(p, 1)), static_cast<int>(a(p, 2))});
  }
  const std::multiset<std::vector<int>> table = {
      {1, 1, 0}, {1, 1, 0}, {0, 1, 0}, {0, 1, 0}, {0, 0, 1}};
  CHECK(rows == table);
}

TEST_CASE("Pigou network yields both routes with two rounds") {
  const Network network = PigouNetwork(1.0);
  CHECK(GeneratePaths(network, 2).size() == 2);
  CHECK(GeneratePaths(network, 1).size() == 1);
}

TEST_CASE("disconnected positive-demand OD") {
  std::vector<Node> nodes = {{1, std::nullopt}, {2, std::nullopt}};
  const Network network(nodes, {}, {{1, 2, 5.0}});
  CHECK(CodeOf([&] { GeneratePaths(network, 1); }) == ErrorCode::kDisconnectedOD);
}

TEST_CASE("incidence edge cases") {
  PathSet empty;
  const SparseMatrix a = BuildIncidence(empty, 4);
  CHECK(a.rows() == 0);
  CHECK(a.cols() == 4);

  PathSet single;
  single.od_count = 1;
  single.paths.push_back({0, 0, {0, 1, 2}});
  CHECK(BuildIncidence(single, 3).ToDense() == Eigen::MatrixXd::Ones(1, 3));
}

TEST_CASE("choice matrix from per-path probabilities") {
  PathSet set;
  set.od_count = 4;
  set.paths = {{0, 0, {0, 1}}, {1, 1, {0, 1}}, {2, 2, {1}}, {3, 3, {1}}, {4, 3, {2}}};
  const ChoiceMatrices choice = BuildChoiceMatrix(set, std::vector<double>{1, 1, 1, 0.3, 0.7});
  const Eigen::MatrixXd b = choice.probabilities.ToDense();
  CHECK(b(3, 3) == 0.3);
  CHECK(b(3, 4) == 0.7);
  CHECK(b.row(0).sum() == 1.0);
  CHECK(choice.indicator.IsBinary());

  PathSet one_per_od;
  one_per_od.od_count = 2;
  one_per_od.paths = {{0, 0, {0}}, {1, 1, {1}}};
  CHECK(BuildChoiceMatrix(one_per_od, UniformProbabilities(one_per_od)).probabilities.ToDense() ==
        Eigen::MatrixXd::Identity(2, 2));

  PathSet two;
  two.od_count = 1;
  two.paths = {{0, 0, {0}}, {1, 0, {1}}};
  CHECK(CodeOf([&] { BuildChoiceMatrix(two, std::vector<double>{0.5, 0.6}); }) ==
        ErrorCode::kRowSumViolation);
}

TEST_CASE("link flows from path flows conserve flow at every node") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Network network = testing::MakeRandomNetwork(rng);
    const PathSet paths = testing::EnumerateSimplePaths(network);
    std::vector<double> link_flows(network.link_count(), 0.0);
    std::vector<double> expected(network.node_count(), 0.0);
    for (const Path& path : paths.paths) {
      const double flow = testing::Uniform(rng, 0.0, 2.0);
      for (std::size_t l : path.links) link_flows[l] += flow;
      const OdPair& od = network.od_pairs()[path.od_index];
      expected[network.node_index(od.origin)] += flow;
      expected[network.node_index(od.destination)] -= flow;
    }
    const std::vector<double> divergence = NodeDivergence(network, link_flows);
    for (std::size_t n = 0; n < network.node_count(); ++n) {
      CHECK(divergence[n] == doctest::Approx(expected[n]).epsilon(1e-12));
    }
  }
}

TEST_CASE("incidence validation") {
  const SparseMatrix a = SparseMatrix::FromDense(Eigen::MatrixXd::Identity(2, 2));
  const SparseMatrix support = SparseMatrix::FromDense(Eigen::MatrixXd::Ones(1, 2));
  SUBCASE("row sum") {
    const SparseMatrix b = SparseMatrix::FromDense((Eigen::MatrixXd(1, 2) << 0.5, 0.6).finished());
    CHECK(CodeOf([&] { IncidenceSet::Make(a, b, support); }) == ErrorCode::kRowSumViolation);
  }
  SUBCASE("non-binary A") {
    const SparseMatrix bad_a =
        SparseMatrix::FromDense((Eigen::MatrixXd(2, 2) << 2, 0, 0, 1).finished());
    const SparseMatrix b = SparseMatrix::FromDense((Eigen::MatrixXd(1, 2) << 0.5, 0.5).finished());
    CHECK_THROWS_AS(IncidenceSet::Make(bad_a, b, support), Error);
  }
  SUBCASE("support outside the indicator") {
    const SparseMatrix narrow = SparseMatrix::FromDense((Eigen::MatrixXd(1, 2) << 1, 0).finished());
    const SparseMatrix b = SparseMatrix::FromDense((Eigen::MatrixXd(1, 2) << 0.5, 0.5).finished());
    CHECK_THROWS_AS(IncidenceSet::Make(a, b, narrow), Error);
  }
  SUBCASE("shape mismatch") {
    const SparseMatrix b = SparseMatrix::FromDense(Eigen::MatrixXd::Ones(1, 3) / 3.0);
    CHECK(CodeOf([&] { IncidenceSet::Make(a, b, support); }) == ErrorCode::kDimensionMismatch);
  }
}

TEST_CASE("sparse matrix rejects duplicates and keeps explicit zeros") {
  CHECK_THROWS_AS(SparseMatrix::FromTriplets(2, 2, {{0, 0, 1.0}, {0, 0, 2.0}}), Error);
  CHECK_THROWS_AS(SparseMatrix::FromTriplets(2, 2, {{0, 0, std::nan("")}}), Error);
  const SparseMatrix m = SparseMatrix::FromTriplets(2, 2, {{1, 0, 0.0}});
  CHECK(m.contains(1, 0));
  CHECK(m.nonzeros() == 1);
  CHECK(m.Transpose().contains(0, 1));
}
