#pragma once

#include "walkaudit/geo.hpp"

#include <nlohmann/json_fwd.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace walkaudit::io {

/// Reads a whole file; throws IoError with the path when missing/unreadable.
std::string read_file(const std::filesystem::path& path);

void write_file(const std::filesystem::path& path, const std::string& content);

/// Parses a JSON document from disk. IoError for a missing file,
/// SchemaError for malformed JSON.
nlohmann::json load_json(const std::filesystem::path& path);

/// Extracts Polygon features from a GeoJSON FeatureCollection. The zone id
/// comes from feature properties "id" (or "name"); ward population from
/// property "population"; land use from "landuse".
std::vector<geo::ZonePolygon> zones_from_geojson(const nlohmann::json& doc);

nlohmann::json zones_to_geojson(const std::vector<geo::ZonePolygon>& zones);

} // namespace walkaudit::io
