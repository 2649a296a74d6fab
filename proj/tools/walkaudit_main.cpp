// walkaudit: POI-centric sidewalk accessibility audit pipeline.
//
// Subcommands map 1:1 onto pipeline stages; stages couple through files in
// the output directory so any stage can be rerun in isolation.

#include "walkaudit/config.hpp"
#include "walkaudit/errors.hpp"
#include "walkaudit/io.hpp"
#include "walkaudit/log.hpp"
#include "walkaudit/pipeline.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using walkaudit::AuditConfig;

struct CliOverrides {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> values;
};

void add_option(CLI::App& app, CliOverrides& overrides, const std::string& flag,
                const std::string& key, const std::string& description) {
  app.add_option_function<std::string>(
         flag,
         [&overrides, key](const std::string& value) {
           overrides.values.emplace_back(key, value);
         },
         description)
      ->type_name("TEXT");
}

AuditConfig resolve_config(const CliOverrides& overrides) {
  AuditConfig config;
  if (!overrides.config_path.empty())
    config = AuditConfig::from_file(overrides.config_path);
  for (const auto& [key, value] : overrides.values)
    config.set(key, value);
  config.validate();
  return config;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"POI-centric sidewalk accessibility audit toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  CliOverrides overrides;
  app.add_option("--config", overrides.config_path,
                 "Key-value config file (flags override it)");
  bool verbose = false;
  app.add_flag("--verbose", verbose, "Enable debug logging");

  add_option(app, overrides, "--network", "network", "Road network GeoJSON");
  add_option(app, overrides, "--sectors", "sectors", "Sector polygons GeoJSON");
  add_option(app, overrides, "--wards", "wards", "Ward polygons GeoJSON");
  add_option(app, overrides, "--poi-taxonomy", "poi_taxonomy",
             "POI category taxonomy JSON");
  add_option(app, overrides, "--label-taxonomy", "label_taxonomy",
             "Label/tag taxonomy JSON");
  add_option(app, overrides, "--labels", "labels", "Annotation label CSV");
  add_option(app, overrides, "--places-fixture", "places_fixture",
             "Recorded places responses JSON");
  add_option(app, overrides, "--streetview-fixture", "streetview_fixture",
             "Recorded panorama metadata JSON");
  add_option(app, overrides, "--ratings", "ratings", "Guidance ratings CSV");
  add_option(app, overrides, "--segments", "segments",
             "Guidance segment table JSON");
  add_option(app, overrides, "--events", "events", "Session events JSONL");
  add_option(app, overrides, "--commercial-counts", "commercial_counts",
             "Commercial POI counts CSV");
  add_option(app, overrides, "--pois", "pois", "POI CSV from the pois stage");
  add_option(app, overrides, "--out", "out_dir", "Output directory");
  add_option(app, overrides, "--query-radius", "query_radius_m",
             "Places query radius in meters");
  add_option(app, overrides, "--spacing", "sample_spacing_m",
             "Sample point spacing in meters");
  add_option(app, overrides, "--budget", "trace_budget_m",
             "Trace budget in meters");
  add_option(app, overrides, "--coverage-radius", "coverage_radius_m",
             "Coverage map radius in meters");
  add_option(app, overrides, "--cell-size", "cell_size_m",
             "Coverage cell size in meters");
  add_option(app, overrides, "--coverage-threshold", "coverage_threshold",
             "Retention threshold (default 0.75)");
  add_option(app, overrides, "--findings-severity", "findings_severity",
             "Severity threshold for findings (default 2)");
  add_option(app, overrides, "--client-mode", "client_mode",
             "fixture (default) or live");
  add_option(app, overrides, "--model-id", "model_id", "VLM model id");
  add_option(app, overrides, "--workers", "workers", "Worker pool size");
  add_option(app, overrides, "--fixed-clock", "fixed_clock",
             "Fixed timestamp for hermetic guidance runs");
  add_option(app, overrides, "--poi-aggregation", "poi_aggregation",
             "network (default) or straight_line");

  auto* pois = app.add_subcommand("pois", "Sample, fetch, dedup and categorize POIs");
  auto* trace = app.add_subcommand("trace", "Trace walkable paths around POIs");
  auto* cover = app.add_subcommand("coverage", "Build coverage maps and filter segments");
  auto* score = app.add_subcommand("score", "Score labeled segments and emit reports");
  auto* guide = app.add_subcommand("guidance", "Generate mission guidance from events");
  auto* rate = app.add_subcommand("rate", "Compute inter-rater statistics");
  auto* sectors = app.add_subcommand("sectors", "Allocate population and select sectors");
  auto* audit = app.add_subcommand("audit", "Run the full chain: pois -> trace -> coverage -> score");

  CLI11_PARSE(app, argc, argv);

  if (verbose)
    walkaudit::log::set_min_level(walkaudit::log::Level::debug);

  try {
    const AuditConfig config = resolve_config(overrides);
    namespace pl = walkaudit::pipeline;

    if (pois->parsed()) {
      pl::run_pois(config);
    } else if (trace->parsed() || cover->parsed() || score->parsed()) {
      if (config.network_path.empty())
        throw walkaudit::ValidationError("stage requires network");
      const auto net = walkaudit::graph::RoadNetwork::from_geojson(
          walkaudit::io::load_json(config.network_path));
      if (config.pois_path.empty())
        throw walkaudit::ValidationError("stage requires pois CSV");
      std::ifstream poi_stream(config.pois_path);
      if (!poi_stream)
        throw walkaudit::IoError("cannot open file: " + config.pois_path);
      const auto poi_records = walkaudit::poi::pois_from_csv(poi_stream);

      if (trace->parsed()) {
        pl::run_trace(config, net, poi_records);
      } else if (cover->parsed()) {
        const auto traces = pl::traces_from_dir(
            net, std::filesystem::path(config.out_dir) / "traces", poi_records);
        pl::run_coverage(config, net, poi_records, traces);
      } else {
        std::ifstream retained_stream(
            std::filesystem::path(config.out_dir) / "retained.csv");
        if (!retained_stream)
          throw walkaudit::IoError("cannot open file: " + config.out_dir +
                                   "/retained.csv (run the coverage stage first)");
        const auto verdicts = pl::retained_from_csv(retained_stream);
        const auto report = pl::run_score(config, net, poi_records, verdicts);
        std::cout << "findings: " << report.findings_count << "\n";
      }
    } else if (guide->parsed()) {
      pl::run_guidance(config);
    } else if (rate->parsed()) {
      pl::run_rate(config);
    } else if (sectors->parsed()) {
      pl::run_sectors(config);
    } else if (audit->parsed()) {
      const auto report = pl::run_audit(config);
      std::cout << "findings: " << report.findings_count << "\n";
    }
    return 0;
  } catch (const walkaudit::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const walkaudit::SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
