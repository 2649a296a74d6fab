#pragma once

#include "walkaudit/geo.hpp"
#include "walkaudit/poi.hpp"
#include "walkaudit/road_graph.hpp"

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <string>
#include <vector>

namespace walkaudit::coverage {

struct Panorama {
  std::string pano_id;
  geo::GeoPoint location;
};

class StreetViewMetaClient {
public:
  virtual ~StreetViewMetaClient() = default;
  /// Nearest available panorama to the point, if any.
  virtual std::optional<Panorama> query(const geo::GeoPoint& point) = 0;
};

/// Replays recorded panorama metadata: a JSON array of
/// {"pano_id", "lat", "lon"}. query() returns the nearest recorded panorama.
class FixtureStreetViewClient : public StreetViewMetaClient {
public:
  static FixtureStreetViewClient from_json(const nlohmann::json& doc);

  std::optional<Panorama> query(const geo::GeoPoint& point) override;

private:
  std::vector<Panorama> panoramas_;
};

/// Street-view coverage mask around one POI: cells tiling the POI's bounding
/// square of side 2 x radius, each flagged covered when a panorama sits
/// within the cell's circumradius of its centroid.
struct CoverageMap {
  std::string poi_id;
  double radius_m = 1000.0;
  std::vector<geo::GridCell> cells;

  std::vector<geo::GridCell> covered_cells() const;
};

/// Queries the client at every cell centroid. A cell is covered iff the
/// reported panorama lies within cell_size/sqrt(2) of the centroid; a client
/// failure marks that cell uncovered and logs a warning, so the audit
/// degrades rather than aborts.
CoverageMap build_coverage(StreetViewMetaClient& client,
                           const poi::PoiRecord& poi, double radius_m = 1000.0,
                           double cell_size_m = 70.0,
                           const geo::CellBand& band = {});

struct CoverageVerdict {
  std::string segment_id;
  double fraction = 0.0;
  bool retained = false; ///< fraction >= threshold (boundary inclusive)
};

/// Applies geo::covered_fraction to every traced edge. Samples outside the
/// map region simply fall in no covered cell and count as uncovered.
std::vector<CoverageVerdict> filter_segments(const graph::RoadNetwork& net,
                                             const graph::TracedPathSet& traced,
                                             const CoverageMap& map,
                                             double threshold = 0.75);

/// Covered cells as GeoJSON polygons, for visual QA.
nlohmann::json coverage_to_geojson(const CoverageMap& map);

} // namespace walkaudit::coverage
