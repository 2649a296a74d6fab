#include "walkaudit/road_graph.hpp"

#include "walkaudit/errors.hpp"
#include "walkaudit/log.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace walkaudit::graph {

RoadType road_type_from_string(std::string_view tag) {
  if (tag == "residential") return RoadType::residential;
  if (tag == "tertiary") return RoadType::tertiary;
  if (tag == "secondary") return RoadType::secondary;
  if (tag == "primary") return RoadType::primary;
  return RoadType::other;
}

std::string_view to_string(RoadType type) {
  switch (type) {
  case RoadType::residential: return "residential";
  case RoadType::tertiary: return "tertiary";
  case RoadType::secondary: return "secondary";
  case RoadType::primary: return "primary";
  case RoadType::other: return "other";
  }
  return "other";
}

namespace {

// Buckets endpoints on a coarse lat/lon lattice so merge candidates are only
// searched in the 3x3 neighborhood around a point.
class NodeMerger {
public:
  explicit NodeMerger(double tolerance_m) : tolerance_m_(tolerance_m) {}

  NodeId intern(const geo::GeoPoint& p, std::vector<geo::GeoPoint>& nodes) {
    const long cell_lat = bucket_lat(p.lat);
    const long cell_lon = bucket_lon(p.lon);
    for (long dr = -1; dr <= 1; ++dr) {
      for (long dc = -1; dc <= 1; ++dc) {
        auto it = buckets_.find(key(cell_lat + dr, cell_lon + dc));
        if (it == buckets_.end())
          continue;
        for (NodeId id : it->second) {
          if (geo::haversine_distance(nodes[static_cast<std::size_t>(id)], p) <=
              tolerance_m_)
            return id;
        }
      }
    }
    const NodeId id = static_cast<NodeId>(nodes.size());
    nodes.push_back(p);
    buckets_[key(cell_lat, cell_lon)].push_back(id);
    return id;
  }

private:
  long bucket_lat(double lat) const {
    return std::lround(lat * geo::kMetersPerDegree / (2.0 * tolerance_m_));
  }
  long bucket_lon(double lon) const {
    return std::lround(lon * geo::kMetersPerDegree / (2.0 * tolerance_m_));
  }
  static std::uint64_t key(long a, long b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
  }

  double tolerance_m_;
  std::unordered_map<std::uint64_t, std::vector<NodeId>> buckets_;
};

} // namespace

RoadNetwork RoadNetwork::from_geojson(const nlohmann::json& doc) {
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features"))
    throw SchemaError("road network: expected a GeoJSON FeatureCollection");

  RoadNetwork net;
  NodeMerger merger(kNodeMergeToleranceM);
  int index = 0;
  for (const auto& feature : doc.at("features")) {
    const auto& geometry = feature.at("geometry");
    const std::string type = geometry.value("type", "");
    if (type != "LineString") {
      log::warn("road network: skipping non-LineString feature",
                {{"feature_index", index}, {"type", type}});
      ++index;
      continue;
    }
    Edge edge;
    for (const auto& coord : geometry.at("coordinates"))
      edge.geometry.points.push_back(
          {coord.at(1).get<double>(), coord.at(0).get<double>()});
    if (edge.geometry.points.size() < 2) {
      log::warn("road network: skipping degenerate LineString",
                {{"feature_index", index}});
      ++index;
      continue;
    }
    const auto props = feature.value("properties", nlohmann::json::object());
    edge.road_type = road_type_from_string(props.value("highway", "other"));
    edge.key = props.contains("id")
                   ? (props.at("id").is_string()
                          ? props.at("id").get<std::string>()
                          : props.at("id").dump())
                   : "e" + std::to_string(net.edges_.size());
    edge.length_m = geo::polyline_length(edge.geometry);
    edge.a = merger.intern(edge.geometry.points.front(), net.nodes_);
    edge.b = merger.intern(edge.geometry.points.back(), net.nodes_);
    if (net.edge_keys_.count(edge.key))
      throw SchemaError("road network: duplicate edge id '" + edge.key + "'");
    const EdgeId id = static_cast<EdgeId>(net.edges_.size());
    net.edge_keys_[edge.key] = id;
    net.edges_.push_back(std::move(edge));
    ++index;
  }
  if (net.edges_.empty())
    throw SchemaError("road network: document has no LineString features");

  net.adjacency_.assign(net.nodes_.size(), {});
  for (EdgeId id = 0; id < static_cast<EdgeId>(net.edges_.size()); ++id) {
    const Edge& e = net.edges_[static_cast<std::size_t>(id)];
    net.adjacency_[static_cast<std::size_t>(e.a)].push_back({id, e.b});
    if (e.b != e.a)
      net.adjacency_[static_cast<std::size_t>(e.b)].push_back({id, e.a});
  }
  return net;
}

const geo::GeoPoint& RoadNetwork::node(NodeId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size())
    throw ValidationError("road network: unknown node id " + std::to_string(id));
  return nodes_[static_cast<std::size_t>(id)];
}

const Edge& RoadNetwork::edge(EdgeId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= edges_.size())
    throw ValidationError("road network: unknown edge id " + std::to_string(id));
  return edges_[static_cast<std::size_t>(id)];
}

const std::vector<std::pair<EdgeId, NodeId>>&
RoadNetwork::adjacency(NodeId id) const {
  node(id);
  return adjacency_[static_cast<std::size_t>(id)];
}

EdgeId RoadNetwork::edge_by_key(const std::string& key) const {
  auto it = edge_keys_.find(key);
  if (it == edge_keys_.end())
    throw ValidationError("road network: unknown edge key '" + key + "'");
  return it->second;
}

bool RoadNetwork::has_edge_key(const std::string& key) const {
  return edge_keys_.count(key) > 0;
}

NodeId RoadNetwork::nearest_node(const geo::GeoPoint& p) const {
  if (nodes_.empty())
    throw ValidationError("nearest_node: empty network");
  NodeId best = 0;
  double best_dist = geo::haversine_distance(nodes_[0], p);
  for (NodeId id = 1; id < static_cast<NodeId>(nodes_.size()); ++id) {
    const double d =
        geo::haversine_distance(nodes_[static_cast<std::size_t>(id)], p);
    if (d < best_dist) {
      best = id;
      best_dist = d;
    }
  }
  return best;
}

TracedPathSet trace_paths(const RoadNetwork& net, NodeId origin,
                          double budget_m) {
  net.node(origin); // validates
  if (!(budget_m > 0.0))
    throw ValidationError("trace_paths: budget must be positive");

  // Depth-first label-correcting walk. A node is (re)visited whenever a
  // shorter path to it is found; expansion stops at the budget, which is
  // exact for the <= budget decision because edge weights are non-negative.
  std::vector<double> dist(net.node_count(),
                           std::numeric_limits<double>::infinity());
  dist[static_cast<std::size_t>(origin)] = 0.0;
  std::vector<NodeId> stack{origin};
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    const double du = dist[static_cast<std::size_t>(u)];
    if (du > budget_m)
      continue;
    for (const auto& [eid, v] : net.adjacency(u)) {
      const double nd = du + net.edge(eid).length_m;
      if (nd < dist[static_cast<std::size_t>(v)] && nd <= budget_m) {
        dist[static_cast<std::size_t>(v)] = nd;
        stack.push_back(v);
      }
    }
  }

  TracedPathSet out;
  out.origin = origin;
  out.budget_m = budget_m;
  for (NodeId id = 0; id < static_cast<NodeId>(net.node_count()); ++id) {
    if (dist[static_cast<std::size_t>(id)] <= budget_m)
      out.frontier_distances[id] = dist[static_cast<std::size_t>(id)];
  }
  for (EdgeId id = 0; id < static_cast<EdgeId>(net.edge_count()); ++id) {
    const Edge& e = net.edge(id);
    if (std::min(dist[static_cast<std::size_t>(e.a)],
                 dist[static_cast<std::size_t>(e.b)]) <= budget_m)
      out.edges.push_back(id);
  }
  return out;
}

nlohmann::json traced_to_geojson(const RoadNetwork& net,
                                 const TracedPathSet& traced) {
  nlohmann::json features = nlohmann::json::array();
  for (EdgeId id : traced.edges) {
    const Edge& e = net.edge(id);
    nlohmann::json coords = nlohmann::json::array();
    for (const auto& p : e.geometry.points)
      coords.push_back({p.lon, p.lat});
    auto dist_of = [&](NodeId n) -> nlohmann::json {
      auto it = traced.frontier_distances.find(n);
      if (it == traced.frontier_distances.end())
        return nullptr;
      return it->second;
    };
    features.push_back(
        {{"type", "Feature"},
         {"properties",
          {{"id", e.key},
           {"highway", std::string(to_string(e.road_type))},
           {"length_m", e.length_m},
           {"distance_a_m", dist_of(e.a)},
           {"distance_b_m", dist_of(e.b)}}},
         {"geometry", {{"type", "LineString"}, {"coordinates", coords}}}});
  }
  return {{"type", "FeatureCollection"},
          {"properties",
           {{"origin_node", traced.origin}, {"budget_m", traced.budget_m}}},
          {"features", features}};
}

} // namespace walkaudit::graph
