#include "walkaudit/poi.hpp"

#include "walkaudit/errors.hpp"
#include "walkaudit/log.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <set>
#include <sstream>

namespace walkaudit::poi {

namespace {

constexpr std::array<Category, 10> kRealCategories = {
    Category::FinancialServices, Category::Education, Category::Healthcare,
    Category::PublicService,     Category::Transport, Category::Food,
    Category::Religious,         Category::Utilities, Category::Commercial,
    Category::Social};

long round6(double v) { return std::lround(v * 1e6); }

std::string query_key(const PlacesQuery& q) {
  std::ostringstream os;
  os << round6(q.center.lat) << "," << round6(q.center.lon) << ","
     << std::llround(q.radius_m);
  return os.str();
}

std::vector<PoiRecord> records_from_json(const nlohmann::json& results) {
  std::vector<PoiRecord> records;
  for (const auto& r : results) {
    PoiRecord rec;
    rec.provider_id = r.at("provider_id").get<std::string>();
    rec.location = {r.at("lat").get<double>(), r.at("lon").get<double>()};
    for (const auto& t : r.at("types"))
      rec.raw_types.push_back(t.get<std::string>());
    if (rec.raw_types.empty())
      throw SchemaError("places fixture: record '" + rec.provider_id +
                        "' has no types");
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(text);
  while (std::getline(ss, field, sep))
    out.push_back(field);
  return out;
}

} // namespace

std::string_view to_string(Category c) {
  switch (c) {
  case Category::FinancialServices: return "Financial services";
  case Category::Education: return "Education";
  case Category::Healthcare: return "Healthcare";
  case Category::PublicService: return "Public service";
  case Category::Transport: return "Transport";
  case Category::Food: return "Food";
  case Category::Religious: return "Religious";
  case Category::Utilities: return "Utilities";
  case Category::Commercial: return "Commercial";
  case Category::Social: return "Social";
  case Category::Uncategorized: return "Uncategorized";
  }
  return "Uncategorized";
}

Category category_from_string(std::string_view name) {
  for (Category c : kRealCategories) {
    if (to_string(c) == name)
      return c;
  }
  if (name == to_string(Category::Uncategorized))
    return Category::Uncategorized;
  throw SchemaError("unknown POI category '" + std::string(name) + "'");
}

std::span<const Category> all_categories() { return kRealCategories; }

PoiTaxonomy PoiTaxonomy::from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("categories"))
    throw SchemaError("POI taxonomy: expected {\"categories\": {...}}");
  PoiTaxonomy taxonomy;
  for (const auto& [cat_name, types] : doc.at("categories").items()) {
    const Category cat = category_from_string(cat_name);
    for (const auto& t : types) {
      const std::string type = t.get<std::string>();
      auto [it, inserted] = taxonomy.types_.emplace(type, cat);
      if (!inserted)
        throw SchemaError("POI taxonomy: type '" + type +
                          "' mapped to two categories");
    }
  }
  if (taxonomy.types_.empty())
    throw SchemaError("POI taxonomy: no types defined");
  return taxonomy;
}

Category PoiTaxonomy::categorize_type(std::string_view raw_type) const {
  auto it = types_.find(std::string(raw_type));
  return it == types_.end() ? Category::Uncategorized : it->second;
}

FixturePlacesClient FixturePlacesClient::from_json(const nlohmann::json& doc) {
  if (!doc.is_array())
    throw SchemaError("places fixture: expected an array of recordings");
  FixturePlacesClient client;
  for (const auto& rec : doc) {
    PlacesQuery q;
    q.center = {rec.at("center").at("lat").get<double>(),
                rec.at("center").at("lon").get<double>()};
    q.radius_m = rec.at("radius_m").get<double>();
    client.recordings_[query_key(q)] = records_from_json(rec.at("results"));
  }
  return client;
}

std::vector<PoiRecord> FixturePlacesClient::nearby(const PlacesQuery& query) {
  auto it = recordings_.find(query_key(query));
  if (it == recordings_.end())
    throw IoError("places fixture: no recording for query at lat=" +
                  std::to_string(query.center.lat) +
                  " lon=" + std::to_string(query.center.lon));
  return it->second;
}

std::vector<geo::GeoPoint> sample_points(const geo::ZonePolygon& sector,
                                         double spacing_m) {
  if (!(spacing_m > 0.0))
    throw ValidationError("sample_points: spacing must be positive");
  geo::validate_zone(sector);

  geo::LatLonRect bbox{90.0, 180.0, -90.0, -180.0};
  for (const auto& p : sector.ring) {
    bbox.lat_min = std::min(bbox.lat_min, p.lat);
    bbox.lat_max = std::max(bbox.lat_max, p.lat);
    bbox.lon_min = std::min(bbox.lon_min, p.lon);
    bbox.lon_max = std::max(bbox.lon_max, p.lon);
  }

  std::vector<geo::GeoPoint> points;
  for (const auto& cell : geo::tile_region(bbox, spacing_m)) {
    // Edge cells overhang the bounding box; the sample point is the centroid
    // of the part inside it.
    const geo::LatLonRect clipped{
        cell.bounds.lat_min, cell.bounds.lon_min,
        std::min(cell.bounds.lat_max, bbox.lat_max),
        std::min(cell.bounds.lon_max, bbox.lon_max)};
    const geo::GeoPoint centroid{(clipped.lat_min + clipped.lat_max) / 2.0,
                                 (clipped.lon_min + clipped.lon_max) / 2.0};
    if (geo::point_in_zone(centroid, sector))
      points.push_back(centroid);
  }
  return points;
}

std::vector<PoiRecord> fetch_pois(PlacesClient& client, const PlacesQuery& query,
                                  int max_attempts) {
  geo::validate_point(query.center);
  if (!(query.radius_m > 0.0))
    throw ValidationError("fetch_pois: radius must be positive");
  if (max_attempts < 1)
    throw ValidationError("fetch_pois: max_attempts must be >= 1");

  for (int attempt = 1;; ++attempt) {
    try {
      return client.nearby(query);
    } catch (const QuotaError& e) {
      std::ostringstream os;
      os << "places quota exhausted at lat=" << query.center.lat
         << " lon=" << query.center.lon << " radius=" << query.radius_m << ": "
         << e.what();
      throw QuotaError(os.str());
    } catch (const TransportError& e) {
      if (attempt >= max_attempts)
        throw;
      log::warn("places transport error, retrying",
                {{"attempt", attempt}, {"reason", e.what()}});
    }
  }
}

std::vector<PoiRecord> dedup(std::vector<PoiRecord> records) {
  std::set<std::pair<long, long>> seen;
  std::vector<PoiRecord> out;
  out.reserve(records.size());
  for (auto& rec : records) {
    const std::pair<long, long> key{round6(rec.location.lat),
                                    round6(rec.location.lon)};
    if (seen.insert(key).second)
      out.push_back(std::move(rec));
  }
  return out;
}

PoiRecord categorize(PoiRecord record, const PoiTaxonomy& taxonomy) {
  if (record.raw_types.empty())
    throw ValidationError("categorize: record '" + record.provider_id +
                          "' has no raw types");
  record.category = Category::Uncategorized;
  for (const auto& type : record.raw_types) {
    const Category c = taxonomy.categorize_type(type);
    if (c != Category::Uncategorized) {
      record.category = c;
      break;
    }
  }
  return record;
}

void assign_sectors(std::vector<PoiRecord>& records,
                    std::span<const geo::ZonePolygon> sectors) {
  for (auto& rec : records) {
    rec.sector_id = "unassigned";
    for (const auto& sector : sectors) {
      if (geo::point_in_zone(rec.location, sector)) {
        rec.sector_id = sector.id;
        break;
      }
    }
  }
}

std::map<std::string, int> count_by_category(std::span<const PoiRecord> records,
                                             Category category) {
  std::map<std::string, int> counts;
  for (const auto& rec : records) {
    if (rec.category != category)
      continue;
    const std::string sector =
        rec.sector_id.empty() ? "unassigned" : rec.sector_id;
    ++counts[sector];
  }
  return counts;
}

std::string select_sector(const std::map<std::string, int>& counts) {
  if (counts.empty())
    throw ValidationError("select_sector: empty count table");
  // std::map iterates ids in order, so the first maximum is the smallest id.
  auto best = counts.begin();
  for (auto it = std::next(counts.begin()); it != counts.end(); ++it) {
    if (it->second > best->second)
      best = it;
  }
  return best->first;
}

std::string pois_to_csv(std::span<const PoiRecord> records) {
  std::ostringstream os;
  os << "provider_id,lat,lon,raw_types,category,sector_id\n";
  os.precision(10);
  for (const auto& rec : records) {
    os << rec.provider_id << "," << rec.location.lat << "," << rec.location.lon
       << ",";
    for (std::size_t i = 0; i < rec.raw_types.size(); ++i) {
      if (i > 0)
        os << ";";
      os << rec.raw_types[i];
    }
    os << "," << to_string(rec.category) << "," << rec.sector_id << "\n";
  }
  return os.str();
}

std::vector<PoiRecord> pois_from_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw SchemaError("POI CSV: empty file");
  std::vector<PoiRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n'))
      line.pop_back();
    if (line.empty())
      continue;
    const auto fields = split(line, ',');
    if (fields.size() != 6)
      throw SchemaError("POI CSV line " + std::to_string(line_no) +
                        ": expected 6 fields");
    PoiRecord rec;
    rec.provider_id = fields[0];
    rec.location = {std::stod(fields[1]), std::stod(fields[2])};
    rec.raw_types = split(fields[3], ';');
    rec.category = category_from_string(fields[4]);
    rec.sector_id = fields[5];
    records.push_back(std::move(rec));
  }
  return records;
}

} // namespace walkaudit::poi
