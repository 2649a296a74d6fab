#include "walkaudit/geo.hpp"

#include "walkaudit/errors.hpp"

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bg = boost::geometry;

namespace walkaudit::geo {

namespace {

constexpr double kPi = 3.14159265358979323846;

double deg2rad(double deg) { return deg * kPi / 180.0; }

using PointXY = bg::model::d2::point_xy<double>;
using PolygonXY = bg::model::polygon<PointXY>;

PolygonXY zone_to_bg(const ZonePolygon& zone, const LocalProjection& proj) {
  PolygonXY poly;
  for (const auto& p : zone.ring) {
    auto [x, y] = proj.to_xy(p);
    bg::append(poly.outer(), PointXY(x, y));
  }
  bg::correct(poly);
  return poly;
}

} // namespace

void validate_point(const GeoPoint& p) {
  if (!std::isfinite(p.lat) || !std::isfinite(p.lon))
    throw ValidationError("geo point has non-finite coordinates");
  if (p.lat < -90.0 || p.lat > 90.0 || p.lon < -180.0 || p.lon > 180.0) {
    std::ostringstream os;
    os << "geo point out of range: lat=" << p.lat << " lon=" << p.lon;
    throw ValidationError(os.str());
  }
}

double haversine_distance(const GeoPoint& a, const GeoPoint& b) {
  validate_point(a);
  validate_point(b);
  const double phi1 = deg2rad(a.lat);
  const double phi2 = deg2rad(b.lat);
  const double dphi = deg2rad(b.lat - a.lat);
  const double dlam = deg2rad(b.lon - a.lon);
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlam / 2.0);
  const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

double polyline_length(const Polyline& p) {
  if (p.points.empty())
    throw ValidationError("polyline_length: empty polyline");
  double total = 0.0;
  for (std::size_t i = 1; i < p.points.size(); ++i)
    total += haversine_distance(p.points[i - 1], p.points[i]);
  return total;
}

GeoPoint cell_centroid(const GridCell& cell) {
  return {(cell.bounds.lat_min + cell.bounds.lat_max) / 2.0,
          (cell.bounds.lon_min + cell.bounds.lon_max) / 2.0};
}

std::vector<GridCell> tile_region(const LatLonRect& region,
                                  double cell_size_m) {
  if (!(cell_size_m > 0.0))
    throw ValidationError("tile_region: cell size must be positive");
  if (!(region.lat_max > region.lat_min) || !(region.lon_max > region.lon_min))
    throw ValidationError("tile_region: degenerate region");

  const double ref_lat = (region.lat_min + region.lat_max) / 2.0;
  const double dlat = cell_size_m / kMetersPerDegree;
  const double dlon =
      cell_size_m / (kMetersPerDegree * std::cos(deg2rad(ref_lat)));

  const int rows = std::max(
      1, static_cast<int>(std::ceil((region.lat_max - region.lat_min) / dlat)));
  const int cols = std::max(
      1, static_cast<int>(std::ceil((region.lon_max - region.lon_min) / dlon)));

  std::vector<GridCell> cells;
  cells.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      GridCell cell;
      cell.row = r;
      cell.col = c;
      cell.bounds = {region.lat_min + r * dlat, region.lon_min + c * dlon,
                     region.lat_min + (r + 1) * dlat,
                     region.lon_min + (c + 1) * dlon};
      cells.push_back(cell);
    }
  }
  return cells;
}

std::vector<GridCell> make_grid(const LatLonRect& region, double cell_size_m,
                                const CellBand& band) {
  if (cell_size_m < band.min_m || cell_size_m > band.max_m) {
    std::ostringstream os;
    os << "make_grid: cell size " << cell_size_m << " m outside band ["
       << band.min_m << ", " << band.max_m << "]";
    throw ValidationError(os.str());
  }
  return tile_region(region, cell_size_m);
}

double covered_fraction(const Polyline& line,
                        std::span<const GridCell> covered_cells,
                        double sample_step_m) {
  const double length = polyline_length(line);
  if (!(sample_step_m > 0.0))
    throw ValidationError("covered_fraction: step must be positive");
  if (covered_cells.empty())
    return 0.0;

  const long n_samples =
      std::max<long>(1, std::lround(length / sample_step_m));
  const double ds = length / static_cast<double>(n_samples);

  // Cumulative arc length per vertex.
  std::vector<double> cum(line.points.size(), 0.0);
  for (std::size_t i = 1; i < line.points.size(); ++i)
    cum[i] =
        cum[i - 1] + haversine_distance(line.points[i - 1], line.points[i]);

  auto point_at = [&](double s) -> GeoPoint {
    if (line.points.size() == 1 || length == 0.0)
      return line.points.front();
    std::size_t seg = 1;
    while (seg + 1 < line.points.size() && cum[seg] < s)
      ++seg;
    const double seg_len = cum[seg] - cum[seg - 1];
    const double t =
        seg_len > 0.0 ? std::clamp((s - cum[seg - 1]) / seg_len, 0.0, 1.0)
                      : 0.0;
    const GeoPoint& a = line.points[seg - 1];
    const GeoPoint& b = line.points[seg];
    return {a.lat + t * (b.lat - a.lat), a.lon + t * (b.lon - a.lon)};
  };

  long covered = 0;
  for (long i = 0; i < n_samples; ++i) {
    const GeoPoint sample = point_at((static_cast<double>(i) + 0.5) * ds);
    for (const auto& cell : covered_cells) {
      if (cell.bounds.contains(sample)) {
        ++covered;
        break;
      }
    }
  }
  return static_cast<double>(covered) / static_cast<double>(n_samples);
}

void validate_zone(const ZonePolygon& zone) {
  if (zone.ring.size() < 4)
    throw SchemaError("zone '" + zone.id + "': ring must have at least 4 points");
  if (!(zone.ring.front() == zone.ring.back()))
    throw SchemaError("zone '" + zone.id + "': ring is not closed");
  for (const auto& p : zone.ring)
    validate_point(p);

  // Simplicity check in a frame anchored at the ring itself.
  const ZonePolygon zones[] = {zone};
  const auto proj = LocalProjection::for_zones(zones);
  const auto poly = zone_to_bg(zone, proj);
  if (!bg::is_valid(poly))
    throw SchemaError("zone '" + zone.id + "': ring is self-intersecting or degenerate");
}

bool point_in_zone(const GeoPoint& p, const ZonePolygon& zone) {
  // Topology is projection-invariant for equirectangular frames, so raw
  // lon/lat coordinates serve as the cartesian plane here.
  PolygonXY poly;
  for (const auto& q : zone.ring)
    bg::append(poly.outer(), PointXY(q.lon, q.lat));
  bg::correct(poly);
  return bg::covered_by(PointXY(p.lon, p.lat), poly);
}

LocalProjection LocalProjection::anchored_at(const GeoPoint& anchor) {
  validate_point(anchor);
  LocalProjection proj;
  proj.anchor = anchor;
  proj.cos_lat0 = std::cos(deg2rad(anchor.lat));
  return proj;
}

LocalProjection LocalProjection::for_zones(std::span<const ZonePolygon> a,
                                           std::span<const ZonePolygon> b) {
  double lat_min = std::numeric_limits<double>::infinity();
  double lat_max = -std::numeric_limits<double>::infinity();
  double lon_min = std::numeric_limits<double>::infinity();
  double lon_max = -std::numeric_limits<double>::infinity();
  auto extend = [&](std::span<const ZonePolygon> zones) {
    for (const auto& z : zones) {
      for (const auto& p : z.ring) {
        lat_min = std::min(lat_min, p.lat);
        lat_max = std::max(lat_max, p.lat);
        lon_min = std::min(lon_min, p.lon);
        lon_max = std::max(lon_max, p.lon);
      }
    }
  };
  extend(a);
  extend(b);
  if (!std::isfinite(lat_min))
    throw ValidationError("local projection: no zone vertices to anchor at");
  return anchored_at({(lat_min + lat_max) / 2.0, (lon_min + lon_max) / 2.0});
}

std::pair<double, double> LocalProjection::to_xy(const GeoPoint& p) const {
  const double x = (p.lon - anchor.lon) * kMetersPerDegree * cos_lat0;
  const double y = (p.lat - anchor.lat) * kMetersPerDegree;
  return {x, y};
}

GeoPoint LocalProjection::to_geo(double x, double y) const {
  return {anchor.lat + y / kMetersPerDegree,
          anchor.lon + x / (kMetersPerDegree * cos_lat0)};
}

double zone_area_m2(const ZonePolygon& zone, const LocalProjection& proj) {
  return std::abs(bg::area(zone_to_bg(zone, proj)));
}

double zone_intersection_area_m2(const ZonePolygon& a, const ZonePolygon& b,
                                 const LocalProjection& proj) {
  std::vector<PolygonXY> pieces;
  bg::intersection(zone_to_bg(a, proj), zone_to_bg(b, proj), pieces);
  double area = 0.0;
  for (const auto& piece : pieces)
    area += std::abs(bg::area(piece));
  return area;
}

PopulationAllocation allocate_population(std::span<const ZonePolygon> wards,
                                         std::span<const ZonePolygon> sectors) {
  for (const auto& w : wards)
    validate_zone(w);
  for (const auto& s : sectors)
    validate_zone(s);

  const auto proj = LocalProjection::for_zones(wards, sectors);

  PopulationAllocation out;
  for (const auto& s : sectors)
    out.sector_population[s.id] = 0.0;

  for (const auto& ward : wards) {
    const double ward_area = zone_area_m2(ward, proj);
    if (ward_area <= 0.0)
      throw ValidationError("allocate_population: ward '" + ward.id +
                            "' has zero area");
    out.total_ward_population += ward.population;
    double allocated = 0.0;
    for (const auto& sector : sectors) {
      const double shared = zone_intersection_area_m2(ward, sector, proj);
      const double share = ward.population * (shared / ward_area);
      out.sector_population[sector.id] += share;
      allocated += share;
    }
    out.dropped_population += std::max(0.0, ward.population - allocated);
  }
  return out;
}

} // namespace walkaudit::geo
