#include "walkaudit/io.hpp"

#include "walkaudit/errors.hpp"
#include "walkaudit/log.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace walkaudit::io {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open file: " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError("cannot write file: " + path.string());
  out << content;
}

nlohmann::json load_json(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

std::vector<geo::ZonePolygon> zones_from_geojson(const nlohmann::json& doc) {
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features"))
    throw SchemaError("expected a GeoJSON FeatureCollection of polygons");

  std::vector<geo::ZonePolygon> zones;
  int index = 0;
  for (const auto& feature : doc.at("features")) {
    const auto& geometry = feature.at("geometry");
    const std::string type = geometry.value("type", "");
    if (type != "Polygon") {
      log::warn("skipping non-Polygon feature",
                {{"feature_index", index}, {"type", type}});
      ++index;
      continue;
    }
    geo::ZonePolygon zone;
    const auto props = feature.value("properties", nlohmann::json::object());
    if (props.contains("id"))
      zone.id = props.at("id").is_string() ? props.at("id").get<std::string>()
                                           : props.at("id").dump();
    else if (props.contains("name"))
      zone.id = props.at("name").get<std::string>();
    else
      zone.id = "zone" + std::to_string(index);
    zone.population = props.value("population", 0.0);
    zone.landuse = props.value("landuse", "");

    const auto& rings = geometry.at("coordinates");
    if (rings.empty())
      throw SchemaError("polygon feature '" + zone.id + "' has no rings");
    for (const auto& coord : rings.at(0)) {
      // GeoJSON order is [lon, lat].
      zone.ring.push_back({coord.at(1).get<double>(), coord.at(0).get<double>()});
    }
    geo::validate_zone(zone);
    zones.push_back(std::move(zone));
    ++index;
  }
  if (zones.empty())
    throw SchemaError("FeatureCollection contains no usable Polygon features");
  return zones;
}

nlohmann::json zones_to_geojson(const std::vector<geo::ZonePolygon>& zones) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& zone : zones) {
    nlohmann::json ring = nlohmann::json::array();
    for (const auto& p : zone.ring)
      ring.push_back({p.lon, p.lat});
    features.push_back(
        {{"type", "Feature"},
         {"properties",
          {{"id", zone.id},
           {"population", zone.population},
           {"landuse", zone.landuse}}},
         {"geometry",
          {{"type", "Polygon"}, {"coordinates", nlohmann::json::array({ring})}}}});
  }
  return {{"type", "FeatureCollection"}, {"features", features}};
}

} // namespace walkaudit::io
