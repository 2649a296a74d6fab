#pragma once

#include "walkaudit/geo.hpp"

#include <nlohmann/json_fwd.hpp>

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace walkaudit::graph {

enum class RoadType { residential, tertiary, secondary, primary, other };

/// Unknown highway tags map to RoadType::other.
RoadType road_type_from_string(std::string_view tag);
std::string_view to_string(RoadType type);

using NodeId = int;
using EdgeId = int;

struct Edge {
  std::string key;      ///< stable external id used in labels and reports
  NodeId a = 0;
  NodeId b = 0;
  geo::Polyline geometry;
  RoadType road_type = RoadType::other;
  double length_m = 0.0;
};

/// Undirected pedestrian road graph. Immutable after load; nodes sit at
/// feature endpoints, with endpoints closer than the merge tolerance fused
/// into one node.
class RoadNetwork {
public:
  static constexpr double kNodeMergeToleranceM = 0.5;

  /// Builds a network from a GeoJSON FeatureCollection of LineStrings with a
  /// "highway" property. Features of other geometry types are skipped with a
  /// warning. Throws SchemaError when no edge can be built.
  static RoadNetwork from_geojson(const nlohmann::json& doc);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const geo::GeoPoint& node(NodeId id) const;
  const Edge& edge(EdgeId id) const;
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::pair<EdgeId, NodeId>>& adjacency(NodeId id) const;

  /// Resolves an external edge key; throws ValidationError when unknown.
  EdgeId edge_by_key(const std::string& key) const;
  bool has_edge_key(const std::string& key) const;

  /// Node minimizing haversine distance to p; ties break toward the smaller
  /// node id. Throws ValidationError on an empty network.
  NodeId nearest_node(const geo::GeoPoint& p) const;

private:
  std::vector<geo::GeoPoint> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<EdgeId, NodeId>>> adjacency_;
  std::map<std::string, EdgeId> edge_keys_;
};

/// Edges reachable within a shortest-path budget from an origin node.
struct TracedPathSet {
  NodeId origin = 0;
  double budget_m = 0.0;
  std::vector<EdgeId> edges;                     ///< sorted, unique
  std::map<NodeId, double> frontier_distances;   ///< nodes within budget
};

/// Walks the network outward from `origin` and returns exactly the edges
/// having at least one endpoint whose shortest network distance from the
/// origin is <= budget. Edges are reported once regardless of cycles, and
/// the result does not depend on adjacency order.
TracedPathSet trace_paths(const RoadNetwork& net, NodeId origin,
                          double budget_m = 1000.0);

/// GeoJSON FeatureCollection of the traced edges with distance properties.
nlohmann::json traced_to_geojson(const RoadNetwork& net,
                                 const TracedPathSet& traced);

} // namespace walkaudit::graph
