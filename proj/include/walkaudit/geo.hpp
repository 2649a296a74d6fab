#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

namespace walkaudit::geo {

/// Spherical earth radius in meters, used by every distance in the toolkit.
inline constexpr double kEarthRadiusM = 6'371'000.0;

/// Meters spanned by one degree of latitude (or of longitude at the equator)
/// on the sphere above.
inline constexpr double kMetersPerDegree =
    kEarthRadiusM * 3.14159265358979323846 / 180.0;

/// A WGS-style coordinate pair in degrees. lat in [-90, 90], lon in [-180, 180].
struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  bool operator==(const GeoPoint&) const = default;
};

/// Throws ValidationError when a coordinate is non-finite or out of range.
void validate_point(const GeoPoint& p);

/// Great-circle distance in meters on a sphere of radius kEarthRadiusM.
/// Symmetric and non-negative; throws ValidationError on invalid points.
double haversine_distance(const GeoPoint& a, const GeoPoint& b);

/// Ordered vertex chain. A single vertex is a valid (zero-length) polyline.
struct Polyline {
  std::vector<GeoPoint> points;
};

/// Sum of consecutive haversine spans; zero for a single point.
/// Throws ValidationError on an empty polyline.
double polyline_length(const Polyline& p);

/// Axis-aligned lat/lon rectangle, min corner inclusive.
struct LatLonRect {
  double lat_min = 0.0;
  double lon_min = 0.0;
  double lat_max = 0.0;
  double lon_max = 0.0;

  bool contains(const GeoPoint& p) const {
    return p.lat >= lat_min && p.lat < lat_max && p.lon >= lon_min &&
           p.lon < lon_max;
  }
};

/// One tile of a rectangular grid. Bounds are half-open ([min, max)) on both
/// axes so cells of one grid are pairwise disjoint.
struct GridCell {
  int row = 0;
  int col = 0;
  LatLonRect bounds;
  bool covered = false;
};

GeoPoint cell_centroid(const GridCell& cell);

/// Allowed range for street-view grid cell sides, in meters.
struct CellBand {
  double min_m = 60.0;
  double max_m = 80.0;
};

/// Tiles `region` with square cells of side `cell_size_m` (exact in the local
/// equirectangular frame at the region's mid latitude). Cell count is
/// ceil(width/cell) x ceil(height/cell); the last row/column may overhang the
/// region so the union always covers it. No band restriction.
std::vector<GridCell> tile_region(const LatLonRect& region, double cell_size_m);

/// tile_region with the configured cell-size band enforced; throws
/// ValidationError when cell_size_m falls outside [band.min_m, band.max_m].
std::vector<GridCell> make_grid(const LatLonRect& region, double cell_size_m,
                                const CellBand& band = {});

/// Fraction of the polyline's length that lies inside covered cells.
///
/// The polyline is sampled at fixed arc-length steps (midpoints of
/// round(length/step) equal slices) and each sample is tested for cell
/// membership, so the result carries a ~step/length quantization error.
/// An empty cell set yields 0. Result is always within [0, 1].
double covered_fraction(const Polyline& line,
                        std::span<const GridCell> covered_cells,
                        double sample_step_m = 1.0);

/// Named polygon with an optional population attribute (wards) or land-use
/// tag (sectors). The ring is closed: first vertex equals the last.
struct ZonePolygon {
  std::string id;
  std::vector<GeoPoint> ring;
  double population = 0.0;
  std::string landuse;
};

/// Checks ring closure and simplicity (no self-intersection).
/// Throws SchemaError naming the zone when invalid.
void validate_zone(const ZonePolygon& zone);

bool point_in_zone(const GeoPoint& p, const ZonePolygon& zone);

/// Equirectangular projection anchored at a reference point; x is east and
/// y is north, both in meters.
struct LocalProjection {
  GeoPoint anchor;
  double cos_lat0 = 1.0;

  static LocalProjection anchored_at(const GeoPoint& anchor);
  /// Anchor at the centroid of the combined bounding box of all rings.
  static LocalProjection for_zones(std::span<const ZonePolygon> a,
                                   std::span<const ZonePolygon> b = {});

  std::pair<double, double> to_xy(const GeoPoint& p) const;
  GeoPoint to_geo(double x, double y) const;
};

double zone_area_m2(const ZonePolygon& zone, const LocalProjection& proj);
double zone_intersection_area_m2(const ZonePolygon& a, const ZonePolygon& b,
                                 const LocalProjection& proj);

struct PopulationAllocation {
  std::map<std::string, double> sector_population;
  double total_ward_population = 0.0;
  /// Population mass falling outside every sector.
  double dropped_population = 0.0;
};

/// Splits each ward's population across sectors proportionally to the
/// intersection area, assuming uniform density within the ward. Areas are
/// measured in a local equirectangular frame anchored at the centroid of the
/// combined extent. Throws ValidationError for a zero-area ward.
PopulationAllocation allocate_population(std::span<const ZonePolygon> wards,
                                         std::span<const ZonePolygon> sectors);

} // namespace walkaudit::geo
