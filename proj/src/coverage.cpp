#include "walkaudit/coverage.hpp"

#include "walkaudit/errors.hpp"
#include "walkaudit/log.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>

namespace walkaudit::coverage {

FixtureStreetViewClient FixtureStreetViewClient::from_json(const nlohmann::json& doc) {
  if (!doc.is_array())
    throw SchemaError("street-view fixture: expected an array of panoramas");
  FixtureStreetViewClient client;
  for (const auto& p : doc) {
    client.panoramas_.push_back({p.at("pano_id").get<std::string>(),
                                 {p.at("lat").get<double>(),
                                  p.at("lon").get<double>()}});
  }
  return client;
}

std::optional<Panorama> FixtureStreetViewClient::query(const geo::GeoPoint& point) {
  geo::validate_point(point);
  if (panoramas_.empty())
    return std::nullopt;
  const Panorama* best = nullptr;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& pano : panoramas_) {
    const double d = geo::haversine_distance(pano.location, point);
    if (d < best_dist) {
      best = &pano;
      best_dist = d;
    }
  }
  return *best;
}

std::vector<geo::GridCell> CoverageMap::covered_cells() const {
  std::vector<geo::GridCell> out;
  for (const auto& cell : cells) {
    if (cell.covered)
      out.push_back(cell);
  }
  return out;
}

CoverageMap build_coverage(StreetViewMetaClient& client,
                           const poi::PoiRecord& poi, double radius_m,
                           double cell_size_m, const geo::CellBand& band) {
  geo::validate_point(poi.location);
  if (!(radius_m > 0.0))
    throw ValidationError("build_coverage: radius must be positive");

  // Bounding square of side 2 x radius centered at the POI, expressed in
  // degrees at the POI's latitude.
  const double dlat = radius_m / geo::kMetersPerDegree;
  const double dlon =
      radius_m /
      (geo::kMetersPerDegree * std::cos(poi.location.lat * 3.14159265358979323846 / 180.0));
  const geo::LatLonRect region{poi.location.lat - dlat, poi.location.lon - dlon,
                               poi.location.lat + dlat, poi.location.lon + dlon};

  CoverageMap map;
  map.poi_id = poi.provider_id;
  map.radius_m = radius_m;
  map.cells = geo::make_grid(region, cell_size_m, band);

  const double circumradius = cell_size_m / std::sqrt(2.0);
  for (auto& cell : map.cells) {
    const geo::GeoPoint centroid = geo::cell_centroid(cell);
    try {
      const auto pano = client.query(centroid);
      cell.covered =
          pano.has_value() &&
          geo::haversine_distance(pano->location, centroid) <= circumradius;
    } catch (const std::exception& e) {
      cell.covered = false;
      log::warn("street-view query failed; cell marked uncovered",
                {{"poi_id", poi.provider_id},
                 {"row", cell.row},
                 {"col", cell.col},
                 {"reason", e.what()}});
    }
  }
  return map;
}

std::vector<CoverageVerdict> filter_segments(const graph::RoadNetwork& net,
                                             const graph::TracedPathSet& traced,
                                             const CoverageMap& map,
                                             double threshold) {
  if (!(threshold > 0.0) || threshold > 1.0)
    throw ValidationError("filter_segments: threshold must be in (0, 1]");
  const auto covered = map.covered_cells();
  std::vector<CoverageVerdict> verdicts;
  verdicts.reserve(traced.edges.size());
  for (graph::EdgeId id : traced.edges) {
    const graph::Edge& edge = net.edge(id);
    CoverageVerdict v;
    v.segment_id = edge.key;
    v.fraction = geo::covered_fraction(edge.geometry, covered);
    v.retained = v.fraction >= threshold;
    verdicts.push_back(std::move(v));
  }
  return verdicts;
}

nlohmann::json coverage_to_geojson(const CoverageMap& map) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& cell : map.cells) {
    if (!cell.covered)
      continue;
    const auto& b = cell.bounds;
    nlohmann::json ring = nlohmann::json::array(
        {{b.lon_min, b.lat_min},
         {b.lon_max, b.lat_min},
         {b.lon_max, b.lat_max},
         {b.lon_min, b.lat_max},
         {b.lon_min, b.lat_min}});
    features.push_back(
        {{"type", "Feature"},
         {"properties", {{"row", cell.row}, {"col", cell.col}}},
         {"geometry",
          {{"type", "Polygon"}, {"coordinates", nlohmann::json::array({ring})}}}});
  }
  return {{"type", "FeatureCollection"},
          {"properties", {{"poi_id", map.poi_id}, {"radius_m", map.radius_m}}},
          {"features", features}};
}

} // namespace walkaudit::coverage
