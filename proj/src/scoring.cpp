#include "walkaudit/scoring.hpp"

#include "walkaudit/errors.hpp"
#include "walkaudit/log.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace walkaudit::scoring {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::string fmt(double v, const char* spec = "%.9f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

} // namespace

double feature_contribution(const labels::SegmentLabel& label,
                            const labels::LabelTaxonomy& taxonomy) {
  const labels::LabelType* type = taxonomy.find(label.label_type);
  if (type == nullptr)
    throw ValidationError("feature_contribution: unknown label type '" +
                          label.label_type + "'");
  const double weight = labels::severity_weight(label.severity);
  return type->polarity == labels::Polarity::negative ? -weight
                                                      : 1.2 - weight;
}

FeatureVector build_feature_vector(std::span<const labels::SegmentLabel> labels,
                                   const labels::LabelTaxonomy& taxonomy) {
  FeatureVector fv;
  for (const auto& label : labels) {
    if (fv.segment_id.empty())
      fv.segment_id = label.segment_id;
    else if (fv.segment_id != label.segment_id)
      throw ValidationError("feature vector: mixed segment ids '" +
                            fv.segment_id + "' and '" + label.segment_id + "'");
    fv.entries[label.label_type] += feature_contribution(label, taxonomy);
  }
  return fv;
}

double raw_segment_score(std::span<const labels::SegmentLabel> labels,
                         const labels::LabelTaxonomy& taxonomy) {
  if (labels.empty())
    return 0.0;
  double score = 0.0;
  const std::string& segment = labels.front().segment_id;
  for (const auto& label : labels) {
    if (label.segment_id != segment)
      throw ValidationError("raw_segment_score: mixed segment ids '" + segment +
                            "' and '" + label.segment_id + "'");
    score += feature_contribution(label, taxonomy);
  }
  return score;
}

double percentile_linear(std::vector<double> values, double p) {
  if (values.empty())
    throw ValidationError("percentile: empty sample");
  if (p < 0.0 || p > 1.0)
    throw ValidationError("percentile: p outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = h - std::floor(h);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::map<std::string, double>
normalize_scores(const std::map<std::string, double>& raw) {
  if (raw.empty())
    throw ValidationError("normalize_scores: empty corpus");

  std::vector<double> values;
  values.reserve(raw.size());
  for (const auto& [id, r] : raw)
    values.push_back(r);

  std::vector<double> negative_magnitudes;
  for (double r : values) {
    if (r < 0.0)
      negative_magnitudes.push_back(-r);
  }
  if (!negative_magnitudes.empty()) {
    const double tail = percentile_linear(negative_magnitudes, 0.95);
    for (double& r : values) {
      if (r < -tail)
        r = -tail;
    }
  }

  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double r : values)
    mean += r;
  mean /= n;
  double variance = 0.0;
  for (double r : values)
    variance += (r - mean) * (r - mean);
  variance /= n;
  const double sd = std::sqrt(variance);

  std::map<std::string, double> out;
  std::size_t i = 0;
  for (const auto& [id, unused] : raw) {
    const double z = sd > 0.0 ? (values[i] - mean) / sd : 0.0;
    out[id] = sigmoid(z);
    ++i;
  }
  return out;
}

double poi_sec_score(std::span<const double> seg_scores,
                     std::span<const double> lengths_m) {
  if (seg_scores.empty() || seg_scores.size() != lengths_m.size())
    throw ValidationError("poi_sec_score: need n >= 1 scores with matching lengths");
  double weighted = 0.0;
  double total = 0.0;
  double lo = seg_scores.front();
  double hi = seg_scores.front();
  for (std::size_t i = 0; i < seg_scores.size(); ++i) {
    if (!(lengths_m[i] > 0.0))
      throw ValidationError("poi_sec_score: segment lengths must be positive");
    weighted += seg_scores[i] * lengths_m[i];
    total += lengths_m[i];
    lo = std::min(lo, seg_scores[i]);
    hi = std::max(hi, seg_scores[i]);
  }
  if (!(total > 0.0))
    throw ValidationError("poi_sec_score: zero total length");
  // A convex combination stays within the input envelope; clamp away the
  // last-ulp rounding of the division.
  return std::clamp(weighted / total, lo, hi);
}

std::map<poi::Category, std::optional<double>>
poi_across_sector_score(std::span<const CategoryGroup> groups,
                        std::span<const poi::Category> requested) {
  std::map<poi::Category, double> weighted;
  std::map<poi::Category, double> counts;
  std::map<poi::Category, std::pair<double, double>> envelope;
  for (const auto& g : groups) {
    if (!(g.poi_count >= 1.0))
      throw ValidationError("poi_across_sector_score: group counts must be >= 1");
    weighted[g.category] += g.score * g.poi_count;
    counts[g.category] += g.poi_count;
    auto [it, fresh] = envelope.emplace(g.category, std::pair{g.score, g.score});
    if (!fresh) {
      it->second.first = std::min(it->second.first, g.score);
      it->second.second = std::max(it->second.second, g.score);
    }
  }

  std::map<poi::Category, std::optional<double>> out;
  for (const auto& [cat, total] : counts)
    out[cat] = std::clamp(weighted[cat] / total, envelope[cat].first,
                          envelope[cat].second);
  for (poi::Category cat : requested) {
    if (!out.count(cat))
      out[cat] = std::nullopt; // the "no data" gray cell
  }
  return out;
}

Report emit_reports(const ScoreSet& scores,
                    const std::map<std::string, geo::Polyline>& geometries,
                    std::span<const labels::SegmentLabel> labels,
                    int severity_threshold) {
  if (scores.seg.empty())
    throw ValidationError("emit_reports: empty score set");

  Report report;

  nlohmann::json features = nlohmann::json::array();
  for (const auto& [segment_id, seg_score] : scores.seg) {
    auto geom = geometries.find(segment_id);
    if (geom == geometries.end()) {
      log::warn("emit_reports: no geometry for scored segment",
                {{"segment_id", segment_id}});
      continue;
    }
    nlohmann::json coords = nlohmann::json::array();
    for (const auto& p : geom->second.points)
      coords.push_back({p.lon, p.lat});
    auto raw_it = scores.raw.find(segment_id);
    auto sector_it = scores.segment_sector.find(segment_id);
    features.push_back(
        {{"type", "Feature"},
         {"properties",
          {{"id", segment_id},
           {"seg_score", seg_score},
           {"raw_score", raw_it == scores.raw.end() ? 0.0 : raw_it->second},
           {"sector_id", sector_it == scores.segment_sector.end()
                             ? "unassigned"
                             : sector_it->second}}},
         {"geometry", {{"type", "LineString"}, {"coordinates", coords}}}});
  }
  report.heatmap = {{"type", "FeatureCollection"}, {"features", features}};

  std::ostringstream csv;
  csv << "level,id,score,weight,sector_id\n";
  for (const auto& [segment_id, seg_score] : scores.seg) {
    auto geom = geometries.find(segment_id);
    const double length =
        geom == geometries.end() ? 0.0 : geo::polyline_length(geom->second);
    auto sector_it = scores.segment_sector.find(segment_id);
    csv << "segment," << segment_id << "," << fmt(seg_score) << ","
        << fmt(length, "%.3f") << ","
        << (sector_it == scores.segment_sector.end() ? "unassigned"
                                                     : sector_it->second)
        << "\n";
  }
  for (const auto& [poi_id, entry] : scores.poi) {
    csv << "poi," << poi_id << "," << fmt(entry.score) << ","
        << fmt(entry.total_length_m, "%.3f") << "," << entry.sector_id << "\n";
  }
  for (const auto& [category, entry] : scores.across_sector) {
    csv << "category," << poi::to_string(category) << ","
        << (entry.score ? fmt(*entry.score) : "n/a") << "," << entry.poi_count
        << ",all\n";
  }
  report.summary_csv = csv.str();

  for (const auto& label : labels) {
    if (label.severity >= severity_threshold)
      ++report.findings_count;
  }
  return report;
}

} // namespace walkaudit::scoring
