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

#include <set>
#include <string>
#include <utility>

#include "csv.hpp"
#include "ftt/error.hpp"
#include "ftt/network.hpp"

namespace ftt {
namespace {

struct RowReader {
  const csv::Table& table;
  std::size_t line;
  const std::vector<std::string>& fields;

  std::string where() const {
    return table.source + " row " + std::to_string(line);
  }

  std::string_view field(std::size_t column) const {
    return column < fields.size() ? std::string_view(fields[column]) : "";
  }

  long long integer(std::size_t column, std::string_view name) const {
    const auto value = csv::ParseInteger(field(column));
    Require(value.has_value(), ErrorCode::kParse,
            where() + ": '" + std::string(name) + "' is not an integer");
    return *value;
  }

  double real(std::size_t column, std::string_view name) const {
    const auto value = csv::ParseDouble(field(column));
    Require(value.has_value(), ErrorCode::kParse,
            where() + ": '" + std::string(name) + "' is not a number");
    return *value;
  }
};

}  // namespace

Network LoadGmns(const std::filesystem::path& node_csv,
                 const std::filesystem::path& link_csv,
                 const std::filesystem::path& demand_csv) {
  const csv::Table node_table = csv::Read(node_csv);
  const std::size_t node_id_col = node_table.required_column("node_id");
  const std::size_t x_col = node_table.column("x_coord");
  const std::size_t y_col = node_table.column("y_coord");

  std::vector<Node> nodes;
  std::set<NodeId> node_ids;
  for (const auto& [line, fields] : node_table.rows) {
    const RowReader row{node_table, line, fields};
    Node node;
    node.id = row.integer(node_id_col, "node_id");
    Require(node_ids.insert(node.id).second, ErrorCode::kDuplicateId,
            row.where() + ": duplicate node_id " + std::to_string(node.id));
    if (x_col != csv::kNoColumn && y_col != csv::kNoColumn &&
        !row.field(x_col).empty() && !row.field(y_col).empty()) {
      node.coordinates = std::make_pair(row.real(x_col, "x_coord"),
                                        row.real(y_col, "y_coord"));
    }
    nodes.push_back(node);
  }

  const csv::Table link_table = csv::Read(link_csv);
  const std::size_t link_id_col = link_table.required_column("link_id");
  const std::size_t from_col = link_table.required_column("from_node_id");
  const std::size_t to_col = link_table.required_column("to_node_id");
  const std::size_t fft_col = link_table.required_column("free_flow_time");
  const std::size_t cap_col = link_table.required_column("capacity");
  const std::size_t alpha_col = link_table.required_column("bpr_alpha");
  const std::size_t beta_col = link_table.required_column("bpr_beta");
  const std::size_t connector_col = link_table.column("connector");

  std::vector<Link> links;
  std::set<LinkId> link_ids;
  for (const auto& [line, fields] : link_table.rows) {
    const RowReader row{link_table, line, fields};
    Link link;
    link.id = row.integer(link_id_col, "link_id");
    link.from_node = row.integer(from_col, "from_node_id");
    link.to_node = row.integer(to_col, "to_node_id");
    link.free_flow_time = row.real(fft_col, "free_flow_time");
    link.capacity = row.real(cap_col, "capacity");
    link.bpr_alpha = row.real(alpha_col, "bpr_alpha");
    link.bpr_beta = row.real(beta_col, "bpr_beta");
    if (connector_col != csv::kNoColumn && !row.field(connector_col).empty()) {
      link.connector = row.integer(connector_col, "connector") != 0;
    }
    const std::string where = row.where() + " (link_id " + std::to_string(link.id) + ")";
    Require(link_ids.insert(link.id).second, ErrorCode::kDuplicateId,
            where + ": duplicate link_id");
    Require(node_ids.count(link.from_node) == 1, ErrorCode::kDanglingNodeReference,
            where + ": from_node_id " + std::to_string(link.from_node) +
                " is not in " + node_table.source);
    Require(node_ids.count(link.to_node) == 1, ErrorCode::kDanglingNodeReference,
            where + ": to_node_id " + std::to_string(link.to_node) +
                " is not in " + node_table.source);
    Require(link.capacity > 0.0, ErrorCode::kNonPositiveCapacity,
            where + ": capacity must be > 0");
    Require(link.free_flow_time > 0.0, ErrorCode::kNonPositiveFreeFlowTime,
            where + ": free_flow_time must be > 0");
    Require(link.from_node != link.to_node || link.connector,
            ErrorCode::kInvalidLink, where + ": self-loop on a non-connector link");
    Require(link.bpr_alpha >= 0.0, ErrorCode::kInvalidLink,
            where + ": bpr_alpha must be >= 0");
    Require(link.bpr_beta >= 1.0, ErrorCode::kInvalidLink,
            where + ": bpr_beta must be >= 1");
    links.push_back(link);
  }

  std::vector<OdPair> od_pairs;
  const csv::Table demand_table = csv::Read(demand_csv);
  if (!demand_table.header.empty()) {
    const std::size_t o_col = demand_table.required_column("o_zone_id");
    const std::size_t d_col = demand_table.required_column("d_zone_id");
    const std::size_t v_col = demand_table.required_column("volume");
    std::set<std::pair<NodeId, NodeId>> seen;
    for (const auto& [line, fields] : demand_table.rows) {
      const RowReader row{demand_table, line, fields};
      OdPair od;
      od.origin = row.integer(o_col, "o_zone_id");
      od.destination = row.integer(d_col, "d_zone_id");
      od.demand = row.real(v_col, "volume");
      const std::string where = row.where();
      Require(node_ids.count(od.origin) == 1, ErrorCode::kDanglingNodeReference,
              where + ": o_zone_id " + std::to_string(od.origin) +
                  " is not in " + node_table.source);
      Require(node_ids.count(od.destination) == 1,
              ErrorCode::kDanglingNodeReference,
              where + ": d_zone_id " + std::to_string(od.destination) +
                  " is not in " + node_table.source);
      Require(od.demand >= 0.0, ErrorCode::kNegativeDemand,
              where + ": volume must be >= 0");
      Require(seen.emplace(od.origin, od.destination).second,
              ErrorCode::kDuplicateId, where + ": duplicate OD pair");
      od_pairs.push_back(od);
    }
  }

  return Network(std::move(nodes), std::move(links), std::move(od_pairs));
}

}  // namespace ftt
