#pragma once

#include "walkaudit/geo.hpp"
#include "walkaudit/labels.hpp"
#include "walkaudit/poi.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace walkaudit::scoring {

/// Per-segment accumulation of signed severity weights by label type.
struct FeatureVector {
  std::string segment_id;
  std::map<std::string, double> entries;
};

/// Signed contribution of one label. Negative types contribute
/// -severity_weight(severity); positive types contribute
/// +(1.2 - severity_weight(severity)), so a pristine positive feature
/// (severity 1) adds +1.0 while a badly degraded one (severity 3) still adds
/// +0.2. Throws ValidationError for a label type missing from the taxonomy.
double feature_contribution(const labels::SegmentLabel& label,
                            const labels::LabelTaxonomy& taxonomy);

FeatureVector build_feature_vector(std::span<const labels::SegmentLabel> labels,
                                   const labels::LabelTaxonomy& taxonomy);

/// Sum of feature contributions over one segment's labels; zero labels give
/// zero. Throws ValidationError when labels carry mixed segment ids.
double raw_segment_score(std::span<const labels::SegmentLabel> labels,
                         const labels::LabelTaxonomy& taxonomy);

/// Corpus normalization: (1) winsorize the negative tail — raw scores below
/// -T are raised to -T, where T is the linearly interpolated 95th percentile
/// of the magnitudes of negative scores (skipped when no score is negative);
/// (2) standardize to mean 0 / variance 1 (population variance; a
/// zero-variance corpus standardizes to all zeros); (3) logistic sigmoid.
/// Output values are strictly inside (0, 1) and preserve the weak ordering
/// of the raw scores. Throws ValidationError on an empty input.
std::map<std::string, double>
normalize_scores(const std::map<std::string, double>& raw);

/// Linearly interpolated percentile of a sample (p in [0, 1]).
double percentile_linear(std::vector<double> values, double p);

/// Length-weighted mean of segment scores; the POI-level score.
/// Requires n >= 1 and positive lengths; throws ValidationError otherwise.
double poi_sec_score(std::span<const double> seg_scores,
                     std::span<const double> lengths_m);

/// One POI group contributing to a category's across-sector score.
struct CategoryGroup {
  poi::Category category = poi::Category::Uncategorized;
  double score = 0.0;
  double poi_count = 0.0;
};

/// POI-count-weighted mean of POI scores per category. Categories present in
/// `requested` but with zero contributing POIs map to nullopt ("no data").
std::map<poi::Category, std::optional<double>>
poi_across_sector_score(std::span<const CategoryGroup> groups,
                        std::span<const poi::Category> requested = {});

struct PoiScoreEntry {
  double score = 0.0;
  double total_length_m = 0.0;
  std::string sector_id;
  poi::Category category = poi::Category::Uncategorized;
};

struct CategoryScoreEntry {
  std::optional<double> score;
  int poi_count = 0;
};

/// Raw and normalized segment scores plus the POI and category aggregates,
/// with the weights used to form them.
struct ScoreSet {
  std::map<std::string, double> raw;             ///< segment -> raw score
  std::map<std::string, double> seg;             ///< segment -> (0,1)
  std::map<std::string, std::string> segment_sector;
  std::map<std::string, PoiScoreEntry> poi;      ///< poi id -> entry
  std::map<poi::Category, CategoryScoreEntry> across_sector;
};

struct Report {
  nlohmann::json heatmap;      ///< GeoJSON; seg_score 0 = least accessible
  std::string summary_csv;     ///< level,id,score,weight,sector_id
  int findings_count = 0;      ///< labels at or above the severity threshold
};

/// Renders the heatmap GeoJSON and summary CSV and counts findings (labels
/// with severity >= severity_threshold). Scored segments without geometry
/// still get a CSV row; the GeoJSON feature is skipped with a warning.
/// Throws ValidationError when the ScoreSet has no segment scores.
Report emit_reports(const ScoreSet& scores,
                    const std::map<std::string, geo::Polyline>& geometries,
                    std::span<const labels::SegmentLabel> labels,
                    int severity_threshold = 2);

} // namespace walkaudit::scoring
