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

#include "ftt/network.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <string>

#include "ftt/error.hpp"
#include "ftt/propagate.hpp"

namespace ftt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string LinkLabel(const Link& link) {
  return "link " + std::to_string(link.id);
}

}  // namespace

Network::Network(std::vector<Node> nodes, std::vector<Link> links,
                 std::vector<OdPair> od_pairs)
    : nodes_(std::move(nodes)),
      links_(std::move(links)),
      od_pairs_(std::move(od_pairs)) {
  std::sort(nodes_.begin(), nodes_.end(),
            [](const Node& a, const Node& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    Require(nodes_[i].id != nodes_[i - 1].id, ErrorCode::kDuplicateId,
            "duplicate node " + std::to_string(nodes_[i].id));
  }

  std::sort(links_.begin(), links_.end(),
            [](const Link& a, const Link& b) { return a.id < b.id; });
  link_tail_.reserve(links_.size());
  link_head_.reserve(links_.size());
  for (std::size_t i = 0; i < links_.size(); ++i) {
    const Link& link = links_[i];
    Require(i == 0 || link.id != links_[i - 1].id, ErrorCode::kDuplicateId,
            "duplicate " + LinkLabel(link));
    const std::size_t tail = node_index(link.from_node);
    const std::size_t head = node_index(link.to_node);
    Require(tail != kNoIndex, ErrorCode::kDanglingNodeReference,
            LinkLabel(link) + ": unknown from_node " +
                std::to_string(link.from_node));
    Require(head != kNoIndex, ErrorCode::kDanglingNodeReference,
            LinkLabel(link) + ": unknown to_node " +
                std::to_string(link.to_node));
    Require(tail != head || link.connector, ErrorCode::kInvalidLink,
            LinkLabel(link) + ": self-loop on a non-connector link");
    Require(std::isfinite(link.free_flow_time) && link.free_flow_time > 0.0,
            ErrorCode::kNonPositiveFreeFlowTime,
            LinkLabel(link) + ": free_flow_time must be > 0");
    Require(std::isfinite(link.capacity) && link.capacity > 0.0,
            ErrorCode::kNonPositiveCapacity,
            LinkLabel(link) + ": capacity must be > 0");
    Require(std::isfinite(link.bpr_alpha) && link.bpr_alpha >= 0.0,
            ErrorCode::kInvalidLink, LinkLabel(link) + ": bpr_alpha must be >= 0");
    Require(std::isfinite(link.bpr_beta) && link.bpr_beta >= 1.0,
            ErrorCode::kInvalidLink, LinkLabel(link) + ": bpr_beta must be >= 1");
    link_tail_.push_back(tail);
    link_head_.push_back(head);
  }

  // Outgoing adjacency, ascending by link index within each node.
  out_offsets_.assign(nodes_.size() + 1, 0);
  for (std::size_t tail : link_tail_) ++out_offsets_[tail + 1];
  for (std::size_t n = 0; n < nodes_.size(); ++n) {
    out_offsets_[n + 1] += out_offsets_[n];
  }
  out_links_.resize(links_.size());
  std::vector<std::size_t> cursor(out_offsets_.begin(), out_offsets_.end() - 1);
  for (std::size_t l = 0; l < links_.size(); ++l) {
    out_links_[cursor[link_tail_[l]]++] = l;
  }

  std::sort(od_pairs_.begin(), od_pairs_.end(),
            [](const OdPair& a, const OdPair& b) {
              return a.origin != b.origin ? a.origin < b.origin
                                          : a.destination < b.destination;
            });
  for (std::size_t i = 0; i < od_pairs_.size(); ++i) {
    const OdPair& od = od_pairs_[i];
    const std::string label = "OD (" + std::to_string(od.origin) + "," +
                              std::to_string(od.destination) + ")";
    Require(node_index(od.origin) != kNoIndex,
            ErrorCode::kDanglingNodeReference, label + ": unknown origin");
    Require(node_index(od.destination) != kNoIndex,
            ErrorCode::kDanglingNodeReference, label + ": unknown destination");
    Require(std::isfinite(od.demand) && od.demand >= 0.0,
            ErrorCode::kNegativeDemand, label + ": demand must be >= 0");
    Require(i == 0 || od.origin != od_pairs_[i - 1].origin ||
                od.destination != od_pairs_[i - 1].destination,
            ErrorCode::kDuplicateId, "duplicate " + label);
  }
}

std::size_t Network::node_index(NodeId id) const {
  const auto it = std::lower_bound(
      nodes_.begin(), nodes_.end(), id,
      [](const Node& node, NodeId value) { return node.id < value; });
  if (it == nodes_.end() || it->id != id) return kNoIndex;
  return static_cast<std::size_t>(it - nodes_.begin());
}

std::size_t Network::link_index(LinkId id) const {
  const auto it = std::lower_bound(
      links_.begin(), links_.end(), id,
      [](const Link& link, LinkId value) { return link.id < value; });
  if (it == links_.end() || it->id != id) return kNoIndex;
  return static_cast<std::size_t>(it - links_.begin());
}

std::span<const std::size_t> Network::out_links(std::size_t node) const {
  return {out_links_.data() + out_offsets_[node],
          out_offsets_[node + 1] - out_offsets_[node]};
}

std::vector<double> Network::demands() const {
  std::vector<double> result;
  result.reserve(od_pairs_.size());
  for (const OdPair& od : od_pairs_) result.push_back(od.demand);
  return result;
}

Network PigouNetwork(double beta, double eps) {
  Require(beta >= 1.0, ErrorCode::kInvalidArgument, "Pigou beta must be >= 1");
  Require(eps > 0.0, ErrorCode::kInvalidArgument, "Pigou eps must be > 0");
  std::vector<Node> nodes = {{1, std::nullopt}, {2, std::nullopt}};
  std::vector<Link> links = {
      {1, 1, 2, 1.0, 1.0, 0.0, 1.0, false},
      {2, 1, 2, eps, 1.0, 1.0 / eps, beta, false},
  };
  return Network(std::move(nodes), std::move(links), {{1, 2, 1.0}});
}

ShortestPathTree ShortestPath(const Network& network,
                              std::span<const double> link_costs,
                              std::size_t origin) {
  Require(link_costs.size() == network.link_count(),
          ErrorCode::kDimensionMismatch, "link cost vector has wrong length");
  Require(origin < network.node_count(), ErrorCode::kInvalidArgument,
          "origin index out of range");
  for (std::size_t l = 0; l < link_costs.size(); ++l) {
    Require(std::isfinite(link_costs[l]), ErrorCode::kInvalidArgument,
            "cost of link " + std::to_string(network.links()[l].id) +
                " is not finite");
    Require(link_costs[l] >= 0.0, ErrorCode::kNegativeCost,
            "cost of link " + std::to_string(network.links()[l].id) +
                " is negative");
  }

  ShortestPathTree tree;
  tree.origin = origin;
  tree.labels.assign(network.node_count(), kInf);
  tree.pred_link.assign(network.node_count(), kNoIndex);
  std::vector<bool> settled(network.node_count(), false);

  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  tree.labels[origin] = 0.0;
  heap.emplace(0.0, origin);
  while (!heap.empty()) {
    const auto [label, node] = heap.top();
    heap.pop();
    if (settled[node] || label > tree.labels[node]) continue;
    settled[node] = true;
    for (std::size_t link : network.out_links(node)) {
      const std::size_t next = network.head(link);
      if (settled[next]) continue;
      const double candidate = label + link_costs[link];
      if (candidate < tree.labels[next]) {
        tree.labels[next] = candidate;
        tree.pred_link[next] = link;
        heap.emplace(candidate, next);
      } else if (candidate == tree.labels[next] &&
                 link < tree.pred_link[next]) {
        tree.pred_link[next] = link;
      }
    }
  }
  return tree;
}

std::vector<std::size_t> TracePath(const Network& network,
                                   const ShortestPathTree& tree,
                                   std::size_t destination) {
  std::vector<std::size_t> links;
  if (destination == tree.origin || !std::isfinite(tree.labels[destination])) {
    return links;
  }
  std::size_t node = destination;
  while (node != tree.origin) {
    const std::size_t link = tree.pred_link[node];
    links.push_back(link);
    node = network.tail(link);
  }
  std::reverse(links.begin(), links.end());
  return links;
}

std::vector<std::size_t> PathSet::paths_of(std::size_t od) const {
  std::vector<std::size_t> result;
  for (const Path& path : paths) {
    if (path.od_index == od) result.push_back(path.id);
  }
  return result;
}

PathSet GeneratePaths(const Network& network, int rounds) {
  Require(rounds >= 1, ErrorCode::kInvalidArgument, "rounds must be >= 1");
  const BprParams params = BprParams::FromNetwork(network);
  const auto& ods = network.od_pairs();
  std::vector<std::vector<std::vector<std::size_t>>> found(ods.size());

  std::vector<double> costs = params.free_flow_time;
  for (int round = 1; round <= rounds; ++round) {
    if (round > 1) {
      // Uniform split over the paths found so far.
      std::vector<double> link_flows(network.link_count(), 0.0);
      for (std::size_t od = 0; od < ods.size(); ++od) {
        if (found[od].empty()) continue;
        const double share = ods[od].demand / static_cast<double>(found[od].size());
        for (const auto& path : found[od]) {
          for (std::size_t link : path) link_flows[link] += share;
        }
      }
      costs = Bpr(link_flows, params);
    }

    // OD pairs are sorted by origin, so one tree serves a contiguous run.
    std::size_t od = 0;
    while (od < ods.size()) {
      const NodeId origin_id = ods[od].origin;
      const std::size_t origin = network.node_index(origin_id);
      const ShortestPathTree tree = ShortestPath(network, costs, origin);
      for (; od < ods.size() && ods[od].origin == origin_id; ++od) {
        const std::size_t dest = network.node_index(ods[od].destination);
        if (dest == origin || !std::isfinite(tree.labels[dest])) {
          Require(ods[od].demand <= 0.0, ErrorCode::kDisconnectedOD,
                  "no path from node " + std::to_string(ods[od].origin) +
                      " to node " + std::to_string(ods[od].destination));
          continue;
        }
        std::vector<std::size_t> path = TracePath(network, tree, dest);
        auto& known = found[od];
        if (std::find(known.begin(), known.end(), path) == known.end()) {
          known.push_back(std::move(path));
        }
      }
    }
  }

  PathSet result;
  result.od_count = ods.size();
  for (std::size_t od = 0; od < ods.size(); ++od) {
    for (auto& links : found[od]) {
      result.paths.push_back({result.paths.size(), od, std::move(links)});
    }
  }
  return result;
}

bool IsValidPath(const Network& network, const Path& path) {
  if (path.od_index >= network.od_count() || path.links.empty()) return false;
  const OdPair& od = network.od_pairs()[path.od_index];
  std::size_t at = network.node_index(od.origin);
  std::vector<std::size_t> seen;
  for (std::size_t link : path.links) {
    if (link >= network.link_count() || network.tail(link) != at) return false;
    if (std::find(seen.begin(), seen.end(), link) != seen.end()) return false;
    seen.push_back(link);
    at = network.head(link);
  }
  return at == network.node_index(od.destination);
}

SparseMatrix BuildIncidence(const PathSet& path_set, std::size_t link_count) {
  std::vector<Triplet> entries;
  for (std::size_t p = 0; p < path_set.paths.size(); ++p) {
    for (std::size_t link : path_set.paths[p].links) {
      Require(link < link_count, ErrorCode::kInvalidArgument,
              "path " + std::to_string(p) + " uses link index " +
                  std::to_string(link) + " >= " + std::to_string(link_count));
      entries.push_back({p, link, 1.0});
    }
  }
  return SparseMatrix::FromTriplets(path_set.paths.size(), link_count,
                                    std::move(entries));
}

ChoiceMatrices BuildChoiceMatrix(const PathSet& path_set,
                                 std::span<const double> probabilities) {
  const std::size_t n_paths = path_set.paths.size();
  Require(probabilities.size() == n_paths, ErrorCode::kDimensionMismatch,
          "expected " + std::to_string(n_paths) + " path probabilities, got " +
              std::to_string(probabilities.size()));
  std::vector<Triplet> values;
  std::vector<Triplet> support;
  std::vector<double> sums(path_set.od_count, 0.0);
  std::vector<bool> has_path(path_set.od_count, false);
  for (std::size_t p = 0; p < n_paths; ++p) {
    const std::size_t od = path_set.paths[p].od_index;
    Require(od < path_set.od_count, ErrorCode::kInvalidArgument,
            "path " + std::to_string(p) + " has OD index out of range");
    Require(std::isfinite(probabilities[p]) && probabilities[p] >= 0.0,
            ErrorCode::kInvalidArgument,
            "probability of path " + std::to_string(p) + " must be >= 0");
    values.push_back({od, p, probabilities[p]});
    support.push_back({od, p, 1.0});
    sums[od] += probabilities[p];
    has_path[od] = true;
  }
  for (std::size_t od = 0; od < path_set.od_count; ++od) {
    Require(!has_path[od] || std::abs(sums[od] - 1.0) <= 1e-12,
            ErrorCode::kRowSumViolation,
            "probabilities of OD " + std::to_string(od) + " sum to " +
                std::to_string(sums[od]));
  }
  return {SparseMatrix::FromTriplets(path_set.od_count, n_paths, std::move(values)),
          SparseMatrix::FromTriplets(path_set.od_count, n_paths, std::move(support))};
}

std::vector<double> UniformProbabilities(const PathSet& path_set) {
  std::vector<double> counts(path_set.od_count, 0.0);
  for (const Path& path : path_set.paths) counts[path.od_index] += 1.0;
  std::vector<double> probabilities;
  probabilities.reserve(path_set.paths.size());
  for (const Path& path : path_set.paths) {
    probabilities.push_back(1.0 / counts[path.od_index]);
  }
  return probabilities;
}

IncidenceSet IncidenceSet::Make(SparseMatrix path_link, SparseMatrix od_path,
                                SparseMatrix od_path_support) {
  Require(od_path.cols() == path_link.rows() &&
              od_path_support.cols() == path_link.rows() &&
              od_path_support.rows() == od_path.rows(),
          ErrorCode::kDimensionMismatch,
          "incidence shapes disagree: A " + std::to_string(path_link.rows()) +
              "x" + std::to_string(path_link.cols()) + ", B " +
              std::to_string(od_path.rows()) + "x" +
              std::to_string(od_path.cols()) + ", B^I " +
              std::to_string(od_path_support.rows()) + "x" +
              std::to_string(od_path_support.cols()));
  Require(path_link.IsBinary(), ErrorCode::kInvalidArgument,
          "path-link incidence must be binary");
  Require(od_path_support.IsBinary(), ErrorCode::kInvalidArgument,
          "OD-path indicator must be binary");
  std::vector<int> owners(path_link.rows(), 0);
  for (std::size_t od = 0; od < od_path.rows(); ++od) {
    const auto values = od_path.row_values(od);
    const auto cols = od_path.row_indices(od);
    double sum = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      Require(values[k] >= 0.0, ErrorCode::kInvalidArgument,
              "negative choice probability in OD " + std::to_string(od));
      Require(values[k] == 0.0 || od_path_support.at(od, cols[k]) == 1.0,
              ErrorCode::kInvalidArgument,
              "choice probability outside the OD's path set (OD " +
                  std::to_string(od) + ", path " + std::to_string(cols[k]) + ")");
      sum += values[k];
    }
    const auto support = od_path_support.row_indices(od);
    const auto flags = od_path_support.row_values(od);
    bool any = false;
    for (std::size_t k = 0; k < support.size(); ++k) {
      if (flags[k] == 1.0) {
        any = true;
        ++owners[support[k]];
      }
    }
    Require(!any || std::abs(sum - 1.0) <= 1e-12, ErrorCode::kRowSumViolation,
            "choice probabilities of OD " + std::to_string(od) + " sum to " +
                std::to_string(sum));
  }
  for (std::size_t p = 0; p < owners.size(); ++p) {
    Require(owners[p] <= 1, ErrorCode::kInvalidArgument,
            "path " + std::to_string(p) + " serves more than one OD");
  }
  return {std::move(path_link), std::move(od_path), std::move(od_path_support)};
}

IncidenceSet MakeIncidence(const PathSet& path_set, std::size_t link_count,
                           std::span<const double> probabilities) {
  ChoiceMatrices choice = BuildChoiceMatrix(path_set, probabilities);
  return IncidenceSet::Make(BuildIncidence(path_set, link_count),
                            std::move(choice.probabilities),
                            std::move(choice.indicator));
}

IncidenceSet WithChoice(const IncidenceSet& incidence, SparseMatrix od_path) {
  return IncidenceSet::Make(incidence.path_link, std::move(od_path),
                            incidence.od_path_support);
}

std::vector<double> NodeDivergence(const Network& network,
                                   std::span<const double> link_flows) {
  Require(link_flows.size() == network.link_count(),
          ErrorCode::kDimensionMismatch, "link flow vector has wrong length");
  std::vector<double> divergence(network.node_count(), 0.0);
  for (std::size_t l = 0; l < link_flows.size(); ++l) {
    divergence[network.tail(l)] += link_flows[l];
    divergence[network.head(l)] -= link_flows[l];
  }
  return divergence;
}

}  // namespace ftt
