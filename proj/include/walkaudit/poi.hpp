#pragma once

#include "walkaudit/geo.hpp"

#include <nlohmann/json_fwd.hpp>

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace walkaudit::poi {

/// The ten audit categories plus Uncategorized for provider types the
/// taxonomy does not know.
enum class Category {
  FinancialServices,
  Education,
  Healthcare,
  PublicService,
  Transport,
  Food,
  Religious,
  Utilities,
  Commercial,
  Social,
  Uncategorized,
};

/// Display name, e.g. "Financial services".
std::string_view to_string(Category c);
Category category_from_string(std::string_view name);
std::span<const Category> all_categories(); ///< the ten real categories

struct PoiRecord {
  std::string provider_id;
  geo::GeoPoint location;
  std::vector<std::string> raw_types;
  Category category = Category::Uncategorized;
  std::string sector_id; ///< assigned by point-in-polygon; "unassigned" otherwise
};

struct PlacesQuery {
  geo::GeoPoint center;
  double radius_m = 400.0;
};

/// Category -> provider type list, shipped as an editable JSON file.
class PoiTaxonomy {
public:
  /// Loads {"categories": {"<category>": ["type", ...], ...}}; throws
  /// SchemaError when a type string appears under two categories.
  static PoiTaxonomy from_json(const nlohmann::json& doc);

  /// Category of a provider type string; Uncategorized when unmapped.
  Category categorize_type(std::string_view raw_type) const;

  const std::map<std::string, Category>& type_map() const { return types_; }

private:
  std::map<std::string, Category> types_;
};

/// Transient provider failure; fetch_pois retries these.
class TransportError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Provider quota exhausted; fatal for the run.
class QuotaError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class PlacesClient {
public:
  virtual ~PlacesClient() = default;
  virtual std::vector<PoiRecord> nearby(const PlacesQuery& query) = 0;
};

/// Replays recorded query responses from a JSON file:
/// [{"center": {"lat", "lon"}, "radius_m", "results": [...]}, ...].
/// Queries are keyed by center coordinates rounded to 6 decimal places plus
/// the radius; an unrecorded query throws IoError.
class FixturePlacesClient : public PlacesClient {
public:
  static FixturePlacesClient from_json(const nlohmann::json& doc);

  std::vector<PoiRecord> nearby(const PlacesQuery& query) override;

private:
  std::map<std::string, std::vector<PoiRecord>> recordings_;
};

/// One grid sample point per cell whose centroid falls inside the sector.
/// Deterministic: cells are visited row-major from the south-west corner.
std::vector<geo::GeoPoint> sample_points(const geo::ZonePolygon& sector,
                                         double spacing_m);

/// Thin fetch wrapper: retries TransportError up to max_attempts, rethrows
/// QuotaError annotated with the query context.
std::vector<PoiRecord> fetch_pois(PlacesClient& client, const PlacesQuery& query,
                                  int max_attempts = 3);

/// Drops records whose (lat, lon) — each rounded to 6 decimal places —
/// repeats an earlier record. Keeps first occurrences in input order;
/// idempotent.
std::vector<PoiRecord> dedup(std::vector<PoiRecord> records);

/// Sets the record's category to that of its first taxonomy-mapped raw type;
/// Uncategorized when none match. Throws ValidationError on empty raw_types.
PoiRecord categorize(PoiRecord record, const PoiTaxonomy& taxonomy);

/// Point-in-polygon sector assignment; POIs outside all sectors get
/// "unassigned".
void assign_sectors(std::vector<PoiRecord>& records,
                    std::span<const geo::ZonePolygon> sectors);

/// Per-sector counts of POIs in one category ("unassigned" included).
std::map<std::string, int> count_by_category(std::span<const PoiRecord> records,
                                             Category category);

/// Sector with the highest count; ties break toward the smaller sector id.
/// Throws ValidationError on an empty table.
std::string select_sector(const std::map<std::string, int>& counts);

/// CSV: provider_id,lat,lon,raw_types(;-joined),category,sector_id.
std::string pois_to_csv(std::span<const PoiRecord> records);
std::vector<PoiRecord> pois_from_csv(std::istream& in);

} // namespace walkaudit::poi
