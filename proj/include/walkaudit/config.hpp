#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace walkaudit {

/// Pipeline configuration: input paths plus the audit parameters. Defaults
/// follow the deployment the toolkit reproduces (400 m POI queries, 1 km
/// trace budget, 70 m coverage cells, 75% coverage threshold, severity >= 2
/// findings).
struct AuditConfig {
  // Inputs
  std::string network_path;
  std::string sectors_path;
  std::string wards_path;
  std::string poi_taxonomy_path;
  std::string label_taxonomy_path;
  std::string labels_path;
  std::string places_fixture_path;
  std::string streetview_fixture_path;
  std::string ratings_path;
  std::string segments_path;
  std::string events_path;
  std::string commercial_counts_path;
  std::string pois_path;
  std::string out_dir = "out";

  // Parameters
  double query_radius_m = 400.0;
  double sample_spacing_m = 400.0;
  double trace_budget_m = 1000.0;
  double coverage_radius_m = 1000.0;
  double cell_size_m = 70.0;
  double cell_band_min_m = 60.0;
  double cell_band_max_m = 80.0;
  double coverage_threshold = 0.75;
  int findings_severity = 2;
  std::string poi_aggregation = "network"; ///< or "straight_line"
  double straight_line_radius_m = 1000.0;

  // Clients
  std::string client_mode = "fixture"; ///< or "live"
  std::string model_id = "gemini-2.5-flash";
  std::string vlm_endpoint = "https://generativelanguage.googleapis.com";
  int workers = 4;
  double client_rate_per_s = 50.0;
  /// When >= 0, guidance timestamps use this fixed value (hermetic runs).
  std::int64_t fixed_clock = -1;

  /// Loads `key = value` lines; '#' starts a comment. Unknown keys throw
  /// SchemaError.
  static AuditConfig from_file(const std::filesystem::path& path);

  /// Applies one key/value pair (same keys as the config file).
  void set(const std::string& key, const std::string& value);

  /// Cross-field checks: thresholds within documented bands, fixture mode
  /// requires fixture paths where a client is involved.
  void validate() const;
};

} // namespace walkaudit
