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

// Network data model: nodes, BPR links and an OD demand table, plus the
// path sets and incidence/choice matrices built on top of it.
//
// Indexing convention used throughout the library: links, nodes and OD
// pairs are addressed by their position after sorting by id ("index"),
// never by the raw id. A is |P| x |L|, B and its indicator are |OD| x |P|.

#ifndef FTT_NETWORK_HPP_
#define FTT_NETWORK_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ftt/sparse.hpp"

namespace ftt {

using NodeId = std::int64_t;
using LinkId = std::int64_t;

inline constexpr std::size_t kNoIndex = std::numeric_limits<std::size_t>::max();

struct Node {
  NodeId id = 0;
  std::optional<std::pair<double, double>> coordinates;
};

struct Link {
  LinkId id = 0;
  NodeId from_node = 0;
  NodeId to_node = 0;
  double free_flow_time = 1.0;  // minutes
  double capacity = 1.0;        // vehicles per period
  double bpr_alpha = 0.15;
  double bpr_beta = 4.0;
  bool connector = false;  // self-loops are only legal on connectors
};

struct OdPair {
  NodeId origin = 0;
  NodeId destination = 0;
  double demand = 0.0;  // trips per period
};

class Network {
 public:
  Network() = default;
  // Validates every record and sorts nodes and links by id, OD pairs by
  // (origin, destination).
  Network(std::vector<Node> nodes, std::vector<Link> links,
          std::vector<OdPair> od_pairs);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<OdPair>& od_pairs() const { return od_pairs_; }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t link_count() const { return links_.size(); }
  std::size_t od_count() const { return od_pairs_.size(); }

  // kNoIndex when the id is unknown.
  std::size_t node_index(NodeId id) const;
  std::size_t link_index(LinkId id) const;

  // Outgoing link indices of a node, ascending by link id.
  std::span<const std::size_t> out_links(std::size_t node) const;
  std::size_t tail(std::size_t link) const { return link_tail_[link]; }
  std::size_t head(std::size_t link) const { return link_head_[link]; }

  std::vector<double> demands() const;

 private:
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::vector<OdPair> od_pairs_;
  std::vector<std::size_t> link_tail_;
  std::vector<std::size_t> link_head_;
  std::vector<std::size_t> out_offsets_{0};
  std::vector<std::size_t> out_links_;
};

// Reads GMNS-style node.csv, link.csv and demand.csv. Errors carry the file
// and 1-based row number of the offending record.
Network LoadGmns(const std::filesystem::path& node_csv,
                 const std::filesystem::path& link_csv,
                 const std::filesystem::path& demand_csv);

// Two parallel routes between nodes 1 and 2 with unit demand. Route a (link
// 1) has constant time 1; route b (link 2) has time eps + x^beta, written in
// BPR form with free-flow time eps and alpha = 1/eps.
Network PigouNetwork(double beta, double eps = 1e-12);

struct ShortestPathTree {
  std::size_t origin = 0;
  std::vector<double> labels;            // +inf when unreachable
  std::vector<std::size_t> pred_link;    // kNoIndex at origin/unreachable
};

// Dijkstra over link_costs (indexed like network.links()). Equal labels are
// broken toward the smaller link id.
ShortestPathTree ShortestPath(const Network& network,
                              std::span<const double> link_costs,
                              std::size_t origin);

// Link indices from the tree origin to `destination`; empty when
// unreachable or when destination is the origin.
std::vector<std::size_t> TracePath(const Network& network,
                                   const ShortestPathTree& tree,
                                   std::size_t destination);

struct Path {
  std::size_t id = 0;
  std::size_t od_index = 0;
  std::vector<std::size_t> links;  // link indices, origin to destination
};

struct PathSet {
  std::size_t od_count = 0;
  std::vector<Path> paths;  // grouped by od_index, ids equal positions

  std::size_t size() const { return paths.size(); }
  std::vector<std::size_t> paths_of(std::size_t od) const;
};

// Seeds a static path set. Round 1 routes on free-flow times; every later
// round loads the network with a uniform split over the paths found so far
// and appends any new shortest path.
PathSet GeneratePaths(const Network& network, int rounds);

// True when the path is a simple connected walk from its OD origin to its
// OD destination.
bool IsValidPath(const Network& network, const Path& path);

// A[p, l] = 1 iff link l lies on path p.
SparseMatrix BuildIncidence(const PathSet& path_set, std::size_t link_count);

struct ChoiceMatrices {
  SparseMatrix probabilities;  // B
  SparseMatrix indicator;      // B^I
};

// B from per-path probabilities; each OD with at least one path must sum to
// one within 1e-12 (kRowSumViolation otherwise).
ChoiceMatrices BuildChoiceMatrix(const PathSet& path_set,
                                 std::span<const double> probabilities);

std::vector<double> UniformProbabilities(const PathSet& path_set);

struct IncidenceSet {
  SparseMatrix path_link;        // A, |P| x |L|
  SparseMatrix od_path;          // B, |OD| x |P|
  SparseMatrix od_path_support;  // B^I, |OD| x |P|

  std::size_t od_count() const { return od_path.rows(); }
  std::size_t path_count() const { return path_link.rows(); }
  std::size_t link_count() const { return path_link.cols(); }

  // Path indices serving an OD, from the indicator.
  std::span<const std::size_t> paths_of(std::size_t od) const {
    return od_path_support.row_indices(od);
  }

  // Checks shapes, binarity, row-stochasticity and support containment.
  static IncidenceSet Make(SparseMatrix path_link, SparseMatrix od_path,
                           SparseMatrix od_path_support);
};

IncidenceSet MakeIncidence(const PathSet& path_set, std::size_t link_count,
                           std::span<const double> probabilities);

// The same incidence with B replaced; support must stay inside B^I.
IncidenceSet WithChoice(const IncidenceSet& incidence, SparseMatrix od_path);

// Net outflow per node (out minus in) of a link flow vector.
std::vector<double> NodeDivergence(const Network& network,
                                   std::span<const double> link_flows);

}  // namespace ftt

#endif  // FTT_NETWORK_HPP_
