#include "walkaudit/config.hpp"

#include "walkaudit/errors.hpp"
#include "walkaudit/io.hpp"

#include <sstream>

namespace walkaudit {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos)
    return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double to_double(const std::string& key, const std::string& value) {
  try {
    return std::stod(value);
  } catch (const std::exception&) {
    throw SchemaError("config: bad numeric value for '" + key + "': " + value);
  }
}

int to_int(const std::string& key, const std::string& value) {
  try {
    return std::stoi(value);
  } catch (const std::exception&) {
    throw SchemaError("config: bad integer value for '" + key + "': " + value);
  }
}

} // namespace

AuditConfig AuditConfig::from_file(const std::filesystem::path& path) {
  AuditConfig config;
  std::istringstream in(io::read_file(path));
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw SchemaError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    config.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

void AuditConfig::set(const std::string& key, const std::string& value) {
  if (key == "network") network_path = value;
  else if (key == "sectors") sectors_path = value;
  else if (key == "wards") wards_path = value;
  else if (key == "poi_taxonomy") poi_taxonomy_path = value;
  else if (key == "label_taxonomy") label_taxonomy_path = value;
  else if (key == "labels") labels_path = value;
  else if (key == "places_fixture") places_fixture_path = value;
  else if (key == "streetview_fixture") streetview_fixture_path = value;
  else if (key == "ratings") ratings_path = value;
  else if (key == "segments") segments_path = value;
  else if (key == "events") events_path = value;
  else if (key == "commercial_counts") commercial_counts_path = value;
  else if (key == "pois") pois_path = value;
  else if (key == "out_dir") out_dir = value;
  else if (key == "query_radius_m") query_radius_m = to_double(key, value);
  else if (key == "sample_spacing_m") sample_spacing_m = to_double(key, value);
  else if (key == "trace_budget_m") trace_budget_m = to_double(key, value);
  else if (key == "coverage_radius_m") coverage_radius_m = to_double(key, value);
  else if (key == "cell_size_m") cell_size_m = to_double(key, value);
  else if (key == "cell_band_min_m") cell_band_min_m = to_double(key, value);
  else if (key == "cell_band_max_m") cell_band_max_m = to_double(key, value);
  else if (key == "coverage_threshold") coverage_threshold = to_double(key, value);
  else if (key == "findings_severity") findings_severity = to_int(key, value);
  else if (key == "poi_aggregation") poi_aggregation = value;
  else if (key == "straight_line_radius_m") straight_line_radius_m = to_double(key, value);
  else if (key == "client_mode") client_mode = value;
  else if (key == "model_id") model_id = value;
  else if (key == "vlm_endpoint") vlm_endpoint = value;
  else if (key == "workers") workers = to_int(key, value);
  else if (key == "client_rate_per_s") client_rate_per_s = to_double(key, value);
  else if (key == "fixed_clock") fixed_clock = to_int(key, value);
  else throw SchemaError("config: unknown key '" + key + "'");
}

void AuditConfig::validate() const {
  if (!(query_radius_m > 0.0))
    throw ValidationError("config: query_radius_m must be positive");
  if (!(sample_spacing_m > 0.0))
    throw ValidationError("config: sample_spacing_m must be positive");
  if (!(trace_budget_m > 0.0))
    throw ValidationError("config: trace_budget_m must be positive");
  if (!(coverage_radius_m > 0.0))
    throw ValidationError("config: coverage_radius_m must be positive");
  if (cell_size_m < cell_band_min_m || cell_size_m > cell_band_max_m)
    throw ValidationError("config: cell_size_m outside the configured band");
  if (!(coverage_threshold > 0.0) || coverage_threshold > 1.0)
    throw ValidationError("config: coverage_threshold must be in (0, 1]");
  if (findings_severity < 1 || findings_severity > 3)
    throw ValidationError("config: findings_severity must be 1..3");
  if (poi_aggregation != "network" && poi_aggregation != "straight_line")
    throw ValidationError("config: poi_aggregation must be network or straight_line");
  if (client_mode != "fixture" && client_mode != "live")
    throw ValidationError("config: client_mode must be fixture or live");
  if (workers < 1)
    throw ValidationError("config: workers must be >= 1");
}

} // namespace walkaudit
