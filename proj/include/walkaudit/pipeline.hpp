#pragma once

#include "walkaudit/config.hpp"
#include "walkaudit/coverage.hpp"
#include "walkaudit/poi.hpp"
#include "walkaudit/road_graph.hpp"
#include "walkaudit/scoring.hpp"

#include <map>
#include <string>
#include <vector>

namespace walkaudit::pipeline {

/// Sample -> fetch -> dedup -> categorize -> sector assignment.
/// Writes <out>/pois.csv.
std::vector<poi::PoiRecord> run_pois(const AuditConfig& config);

/// Per-POI reachable edge sets within the trace budget.
/// Writes <out>/traces/<poi_id>.geojson.
std::map<std::string, graph::TracedPathSet>
run_trace(const AuditConfig& config, const graph::RoadNetwork& net,
          const std::vector<poi::PoiRecord>& pois);

/// Per-POI coverage maps and segment verdicts.
/// Writes <out>/coverage/<poi_id>.geojson and <out>/retained.csv.
std::map<std::string, std::vector<coverage::CoverageVerdict>>
run_coverage(const AuditConfig& config, const graph::RoadNetwork& net,
             const std::vector<poi::PoiRecord>& pois,
             const std::map<std::string, graph::TracedPathSet>& traces);

/// Labels -> ScoreSet -> reports. Writes <out>/heatmap.geojson,
/// <out>/summary.csv and <out>/audit_summary.json.
scoring::Report
run_score(const AuditConfig& config, const graph::RoadNetwork& net,
          const std::vector<poi::PoiRecord>& pois,
          const std::map<std::string, std::vector<coverage::CoverageVerdict>>&
              verdicts);

/// Full chain: pois -> trace -> coverage -> score.
scoring::Report run_audit(const AuditConfig& config);

/// Ward population allocation and/or commercial-count sector selection.
/// Writes <out>/population_by_sector.csv and/or <out>/sector_selection.csv.
void run_sectors(const AuditConfig& config);

/// Session event log -> guidance log (<out>/guidance.jsonl).
void run_guidance(const AuditConfig& config);

/// Ratings CSV -> <out>/stats_descriptive.csv + <out>/stats_agreement.csv.
void run_rate(const AuditConfig& config);

// File-format helpers shared by stages and tests.
std::string retained_to_csv(
    const std::map<std::string, std::vector<coverage::CoverageVerdict>>& verdicts);
std::map<std::string, std::vector<coverage::CoverageVerdict>>
retained_from_csv(std::istream& in);

/// Rebuilds per-POI traced path sets from the files run_trace wrote.
std::map<std::string, graph::TracedPathSet>
traces_from_dir(const graph::RoadNetwork& net,
                const std::filesystem::path& traces_dir,
                const std::vector<poi::PoiRecord>& pois);

} // namespace walkaudit::pipeline
