#include "walkaudit/pipeline.hpp"

#include "walkaudit/concurrency.hpp"
#include "walkaudit/errors.hpp"
#include "walkaudit/guidance.hpp"
#include "walkaudit/http_clients.hpp"
#include "walkaudit/io.hpp"
#include "walkaudit/labels.hpp"
#include "walkaudit/log.hpp"
#include "walkaudit/ratings.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

namespace walkaudit::pipeline {

namespace {

namespace fs = std::filesystem;

std::unique_ptr<poi::PlacesClient> make_places_client(const AuditConfig& config) {
  if (config.client_mode == "live")
    return std::make_unique<http::HttpPlacesClient>();
  if (config.places_fixture_path.empty())
    throw ValidationError("fixture mode requires places_fixture");
  return std::make_unique<poi::FixturePlacesClient>(
      poi::FixturePlacesClient::from_json(
          io::load_json(config.places_fixture_path)));
}

std::unique_ptr<coverage::StreetViewMetaClient>
make_streetview_client(const AuditConfig& config) {
  if (config.client_mode == "live")
    return std::make_unique<http::HttpStreetViewClient>();
  if (config.streetview_fixture_path.empty())
    throw ValidationError("fixture mode requires streetview_fixture");
  return std::make_unique<coverage::FixtureStreetViewClient>(
      coverage::FixtureStreetViewClient::from_json(
          io::load_json(config.streetview_fixture_path)));
}

std::string fmt(double v, const char* spec = "%.9f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(text);
  while (std::getline(ss, field, sep))
    out.push_back(field);
  return out;
}

geo::GeoPoint polyline_midpoint(const geo::Polyline& line) {
  const auto& pts = line.points;
  return pts[pts.size() / 2];
}

double min_vertex_distance(const geo::Polyline& line, const geo::GeoPoint& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& q : line.points)
    best = std::min(best, geo::haversine_distance(q, p));
  return best;
}

} // namespace

std::vector<poi::PoiRecord> run_pois(const AuditConfig& config) {
  if (config.sectors_path.empty())
    throw ValidationError("pois stage requires sectors");
  if (config.poi_taxonomy_path.empty())
    throw ValidationError("pois stage requires poi_taxonomy");

  const auto sectors = io::zones_from_geojson(io::load_json(config.sectors_path));
  const auto taxonomy =
      poi::PoiTaxonomy::from_json(io::load_json(config.poi_taxonomy_path));
  auto client = make_places_client(config);

  std::vector<poi::PlacesQuery> queries;
  for (const auto& sector : sectors) {
    for (const auto& point : poi::sample_points(sector, config.sample_spacing_m))
      queries.push_back({point, config.query_radius_m});
  }
  log::info("pois: sampled query points", {{"count", queries.size()}});

  // Fixture replay is local; only live HTTP traffic is rate limited.
  std::unique_ptr<util::TokenBucket> limiter;
  if (config.client_mode == "live")
    limiter = std::make_unique<util::TokenBucket>(
        config.client_rate_per_s, std::max(1.0, config.client_rate_per_s));
  std::vector<std::vector<poi::PoiRecord>> batches(queries.size());
  util::parallel_for(queries.size(), config.workers, [&](std::size_t i) {
    if (limiter)
      limiter->acquire();
    batches[i] = poi::fetch_pois(*client, queries[i]);
  });

  std::vector<poi::PoiRecord> records;
  for (auto& batch : batches) {
    for (auto& rec : batch)
      records.push_back(std::move(rec));
  }
  log::info("pois: fetched records", {{"count", records.size()}});

  records = poi::dedup(std::move(records));
  for (auto& rec : records)
    rec = poi::categorize(std::move(rec), taxonomy);
  poi::assign_sectors(records, sectors);
  log::info("pois: unique records", {{"count", records.size()}});

  io::write_file(fs::path(config.out_dir) / "pois.csv", poi::pois_to_csv(records));
  return records;
}

std::map<std::string, graph::TracedPathSet>
run_trace(const AuditConfig& config, const graph::RoadNetwork& net,
          const std::vector<poi::PoiRecord>& pois) {
  std::vector<graph::TracedPathSet> traced(pois.size());
  util::parallel_for(pois.size(), config.workers, [&](std::size_t i) {
    const graph::NodeId origin = net.nearest_node(pois[i].location);
    traced[i] = graph::trace_paths(net, origin, config.trace_budget_m);
  });

  std::map<std::string, graph::TracedPathSet> out;
  for (std::size_t i = 0; i < pois.size(); ++i) {
    const auto& id = pois[i].provider_id;
    if (!out.emplace(id, std::move(traced[i])).second)
      throw ValidationError("trace stage: duplicate POI id '" + id + "'");
    io::write_file(fs::path(config.out_dir) / "traces" / (id + ".geojson"),
                   graph::traced_to_geojson(net, out.at(id)).dump(2) + "\n");
  }
  return out;
}

std::map<std::string, std::vector<coverage::CoverageVerdict>>
run_coverage(const AuditConfig& config, const graph::RoadNetwork& net,
             const std::vector<poi::PoiRecord>& pois,
             const std::map<std::string, graph::TracedPathSet>& traces) {
  auto client = make_streetview_client(config);

  // The fixture client is a shared read-only lookup; live clients are
  // stateless per request. Only live traffic is rate limited.
  std::unique_ptr<util::TokenBucket> limiter;
  if (config.client_mode == "live")
    limiter = std::make_unique<util::TokenBucket>(
        config.client_rate_per_s, std::max(1.0, config.client_rate_per_s));
  struct LimitedClient : coverage::StreetViewMetaClient {
    coverage::StreetViewMetaClient* inner = nullptr;
    util::TokenBucket* limiter = nullptr;
    std::optional<coverage::Panorama> query(const geo::GeoPoint& p) override {
      if (limiter)
        limiter->acquire();
      return inner->query(p);
    }
  };
  LimitedClient limited;
  limited.inner = client.get();
  limited.limiter = limiter.get();

  const geo::CellBand band{config.cell_band_min_m, config.cell_band_max_m};
  std::vector<std::vector<coverage::CoverageVerdict>> verdicts(pois.size());
  std::vector<nlohmann::json> cell_docs(pois.size());
  util::parallel_for(pois.size(), config.workers, [&](std::size_t i) {
    const auto& record = pois[i];
    auto traced = traces.find(record.provider_id);
    if (traced == traces.end())
      throw ValidationError("coverage stage: no trace for POI '" +
                            record.provider_id + "'");
    const auto map =
        coverage::build_coverage(limited, record, config.coverage_radius_m,
                                 config.cell_size_m, band);
    verdicts[i] =
        coverage::filter_segments(net, traced->second, map,
                                  config.coverage_threshold);
    cell_docs[i] = coverage::coverage_to_geojson(map);
  });

  std::map<std::string, std::vector<coverage::CoverageVerdict>> out;
  for (std::size_t i = 0; i < pois.size(); ++i) {
    const auto& id = pois[i].provider_id;
    out[id] = std::move(verdicts[i]);
    io::write_file(fs::path(config.out_dir) / "coverage" / (id + ".geojson"),
                   cell_docs[i].dump(2) + "\n");
  }
  io::write_file(fs::path(config.out_dir) / "retained.csv", retained_to_csv(out));
  return out;
}

std::string retained_to_csv(
    const std::map<std::string, std::vector<coverage::CoverageVerdict>>& verdicts) {
  std::ostringstream os;
  os << "poi_id,segment_id,fraction,retained\n";
  for (const auto& [poi_id, list] : verdicts) {
    auto sorted = list;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) {
                return a.segment_id < b.segment_id;
              });
    for (const auto& v : sorted) {
      os << poi_id << "," << v.segment_id << "," << fmt(v.fraction, "%.6f")
         << "," << (v.retained ? "true" : "false") << "\n";
    }
  }
  return os.str();
}

std::map<std::string, std::vector<coverage::CoverageVerdict>>
retained_from_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw SchemaError("retained CSV: empty file");
  std::map<std::string, std::vector<coverage::CoverageVerdict>> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n'))
      line.pop_back();
    if (line.empty())
      continue;
    const auto fields = split(line, ',');
    if (fields.size() != 4)
      throw SchemaError("retained CSV line " + std::to_string(line_no) +
                        ": expected 4 fields");
    coverage::CoverageVerdict v;
    v.segment_id = fields[1];
    v.fraction = std::stod(fields[2]);
    v.retained = fields[3] == "true";
    out[fields[0]].push_back(std::move(v));
  }
  return out;
}

std::map<std::string, graph::TracedPathSet>
traces_from_dir(const graph::RoadNetwork& net,
                const std::filesystem::path& traces_dir,
                const std::vector<poi::PoiRecord>& pois) {
  std::map<std::string, graph::TracedPathSet> out;
  for (const auto& rec : pois) {
    const auto path = traces_dir / (rec.provider_id + ".geojson");
    const auto doc = io::load_json(path);
    graph::TracedPathSet traced;
    const auto props = doc.value("properties", nlohmann::json::object());
    traced.origin = props.value("origin_node", 0);
    traced.budget_m = props.value("budget_m", 0.0);
    for (const auto& feature : doc.at("features")) {
      const auto& fprops = feature.at("properties");
      const std::string key = fprops.at("id").get<std::string>();
      const graph::EdgeId id = net.edge_by_key(key);
      traced.edges.push_back(id);
      const auto& edge = net.edge(id);
      if (!fprops.at("distance_a_m").is_null())
        traced.frontier_distances[edge.a] = fprops.at("distance_a_m").get<double>();
      if (!fprops.at("distance_b_m").is_null())
        traced.frontier_distances[edge.b] = fprops.at("distance_b_m").get<double>();
    }
    std::sort(traced.edges.begin(), traced.edges.end());
    out[rec.provider_id] = std::move(traced);
  }
  return out;
}

scoring::Report
run_score(const AuditConfig& config, const graph::RoadNetwork& net,
          const std::vector<poi::PoiRecord>& pois,
          const std::map<std::string, std::vector<coverage::CoverageVerdict>>&
              verdicts) {
  if (config.label_taxonomy_path.empty())
    throw ValidationError("score stage requires label_taxonomy");
  if (config.labels_path.empty())
    throw ValidationError("score stage requires labels");

  const auto taxonomy =
      labels::LabelTaxonomy::from_json(io::load_json(config.label_taxonomy_path));
  std::ifstream label_stream(config.labels_path);
  if (!label_stream)
    throw IoError("cannot open file: " + config.labels_path);
  const auto parsed = labels::parse_labels(label_stream, taxonomy);

  // Corpus: union of retained segments across POIs.
  std::set<std::string> corpus;
  for (const auto& [poi_id, list] : verdicts) {
    for (const auto& v : list) {
      if (v.retained)
        corpus.insert(v.segment_id);
    }
  }
  if (corpus.empty())
    throw ValidationError("score stage: no retained segments to score");

  std::map<std::string, std::vector<labels::SegmentLabel>> by_segment;
  std::vector<labels::SegmentLabel> used_labels;
  for (const auto& label : parsed.labels) {
    if (!corpus.count(label.segment_id)) {
      log::warn("score: label on unscored segment ignored",
                {{"label_id", label.label_id}, {"segment_id", label.segment_id}});
      continue;
    }
    by_segment[label.segment_id].push_back(label);
    used_labels.push_back(label);
  }

  scoring::ScoreSet scores;
  for (const auto& segment : corpus) {
    auto it = by_segment.find(segment);
    scores.raw[segment] =
        it == by_segment.end()
            ? 0.0
            : scoring::raw_segment_score(it->second, taxonomy);
  }
  scores.seg = scoring::normalize_scores(scores.raw);

  // Segment sector assignment by geometry midpoint.
  std::vector<geo::ZonePolygon> sectors;
  if (!config.sectors_path.empty())
    sectors = io::zones_from_geojson(io::load_json(config.sectors_path));
  std::map<std::string, geo::Polyline> geometries;
  for (const auto& segment : corpus) {
    if (!net.has_edge_key(segment)) {
      log::warn("score: segment missing from network", {{"segment_id", segment}});
      continue;
    }
    const auto& edge = net.edge(net.edge_by_key(segment));
    geometries[segment] = edge.geometry;
    std::string sector_id = "unassigned";
    const geo::GeoPoint mid = polyline_midpoint(edge.geometry);
    for (const auto& sector : sectors) {
      if (geo::point_in_zone(mid, sector)) {
        sector_id = sector.id;
        break;
      }
    }
    scores.segment_sector[segment] = sector_id;
  }

  // POI aggregation over that POI's retained segments (network tracing by
  // default; straight-line buffer behind the config flag).
  std::map<std::string, const poi::PoiRecord*> poi_by_id;
  for (const auto& rec : pois)
    poi_by_id[rec.provider_id] = &rec;

  std::vector<scoring::CategoryGroup> groups;
  for (const auto& [poi_id, list] : verdicts) {
    std::vector<double> seg_scores;
    std::vector<double> lengths;
    double total_length = 0.0;
    for (const auto& v : list) {
      if (!v.retained || !scores.seg.count(v.segment_id))
        continue;
      if (!net.has_edge_key(v.segment_id))
        continue;
      const auto& edge = net.edge(net.edge_by_key(v.segment_id));
      if (config.poi_aggregation == "straight_line") {
        auto rec = poi_by_id.find(poi_id);
        if (rec != poi_by_id.end() &&
            min_vertex_distance(edge.geometry, rec->second->location) >
                config.straight_line_radius_m)
          continue;
      }
      seg_scores.push_back(scores.seg.at(v.segment_id));
      lengths.push_back(edge.length_m);
      total_length += edge.length_m;
    }
    if (seg_scores.empty()) {
      log::warn("score: POI has no retained segments", {{"poi_id", poi_id}});
      continue;
    }
    scoring::PoiScoreEntry entry;
    entry.score = scoring::poi_sec_score(seg_scores, lengths);
    entry.total_length_m = total_length;
    auto rec = poi_by_id.find(poi_id);
    entry.sector_id = rec == poi_by_id.end() ? "unassigned" : rec->second->sector_id;
    entry.category = rec == poi_by_id.end() ? poi::Category::Uncategorized
                                            : rec->second->category;
    scores.poi[poi_id] = entry;
    groups.push_back({entry.category, entry.score, 1.0});
  }

  const auto across =
      scoring::poi_across_sector_score(groups, poi::all_categories());
  std::map<poi::Category, int> category_counts;
  for (const auto& g : groups)
    category_counts[g.category] += static_cast<int>(g.poi_count);
  for (const auto& [category, score] : across) {
    scoring::CategoryScoreEntry entry;
    entry.score = score;
    entry.poi_count = category_counts.count(category)
                          ? category_counts.at(category)
                          : 0;
    scores.across_sector[category] = entry;
  }

  auto report = scoring::emit_reports(scores, geometries, used_labels,
                                      config.findings_severity);
  io::write_file(fs::path(config.out_dir) / "heatmap.geojson",
                 report.heatmap.dump(2) + "\n");
  io::write_file(fs::path(config.out_dir) / "summary.csv", report.summary_csv);
  const nlohmann::json audit_summary = {
      {"findings_count", report.findings_count},
      {"findings_severity_threshold", config.findings_severity},
      {"segments_scored", scores.seg.size()},
      {"pois_scored", scores.poi.size()},
      {"labels_used", used_labels.size()},
      {"labels_rejected", parsed.rejected.size()}};
  io::write_file(fs::path(config.out_dir) / "audit_summary.json",
                 audit_summary.dump(2) + "\n");
  return report;
}

scoring::Report run_audit(const AuditConfig& config) {
  if (config.network_path.empty())
    throw ValidationError("audit requires network");
  const auto net = graph::RoadNetwork::from_geojson(io::load_json(config.network_path));
  const auto pois = run_pois(config);
  const auto traces = run_trace(config, net, pois);
  const auto verdicts = run_coverage(config, net, pois, traces);
  return run_score(config, net, pois, verdicts);
}

void run_sectors(const AuditConfig& config) {
  bool did_anything = false;
  if (!config.wards_path.empty() && !config.sectors_path.empty()) {
    const auto wards = io::zones_from_geojson(io::load_json(config.wards_path));
    const auto sectors = io::zones_from_geojson(io::load_json(config.sectors_path));
    const auto allocation = geo::allocate_population(wards, sectors);
    std::ostringstream os;
    os << "sector_id,population\n";
    for (const auto& [sector, population] : allocation.sector_population)
      os << sector << "," << fmt(population, "%.3f") << "\n";
    io::write_file(fs::path(config.out_dir) / "population_by_sector.csv", os.str());
    log::info("sectors: population allocated",
              {{"total", allocation.total_ward_population},
               {"dropped", allocation.dropped_population}});
    did_anything = true;
  }

  std::map<std::string, int> counts;
  if (!config.commercial_counts_path.empty()) {
    std::istringstream in(io::read_file(config.commercial_counts_path));
    std::string line;
    if (!std::getline(in, line))
      throw SchemaError("commercial counts CSV: empty file");
    int line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      while (!line.empty() && (line.back() == '\r' || line.back() == '\n'))
        line.pop_back();
      if (line.empty())
        continue;
      const auto fields = split(line, ',');
      if (fields.size() != 2)
        throw SchemaError("commercial counts CSV line " +
                          std::to_string(line_no) + ": expected 2 fields");
      counts[fields[0]] = std::stoi(fields[1]);
    }
  } else if (!config.pois_path.empty()) {
    std::ifstream in(config.pois_path);
    if (!in)
      throw IoError("cannot open file: " + config.pois_path);
    const auto pois = poi::pois_from_csv(in);
    counts = poi::count_by_category(pois, poi::Category::Commercial);
  }

  if (!counts.empty()) {
    const std::string selected = poi::select_sector(counts);
    std::ostringstream os;
    os << "sector_id,commercial_count,selected\n";
    for (const auto& [sector, count] : counts)
      os << sector << "," << count << "," << (sector == selected ? "true" : "false")
         << "\n";
    io::write_file(fs::path(config.out_dir) / "sector_selection.csv", os.str());
    log::info("sectors: commercial argmax", {{"selected", selected}});
    did_anything = true;
  }

  if (!did_anything)
    throw ValidationError(
        "sectors stage needs wards+sectors or commercial_counts/pois input");
}

void run_guidance(const AuditConfig& config) {
  if (config.segments_path.empty() || config.events_path.empty())
    throw ValidationError("guidance stage requires segments and events");
  if (config.label_taxonomy_path.empty())
    throw ValidationError("guidance stage requires label_taxonomy");

  const auto taxonomy =
      labels::LabelTaxonomy::from_json(io::load_json(config.label_taxonomy_path));

  std::vector<guidance::GuidanceRequest> segments;
  std::map<std::string, graph::RoadType> road_types;
  for (const auto& seg : io::load_json(config.segments_path)) {
    guidance::GuidanceRequest req;
    req.segment_id = seg.at("segment_id").get<std::string>();
    req.road_type =
        graph::road_type_from_string(seg.at("road_type").get<std::string>());
    req.start_pano = {seg.at("start_pano").value("pano_id", ""),
                      seg.at("start_pano").value("image_ref", "")};
    req.end_pano = {seg.at("end_pano").value("pano_id", ""),
                    seg.at("end_pano").value("image_ref", "")};
    road_types[req.segment_id] = req.road_type;
    segments.push_back(std::move(req));
  }

  std::unique_ptr<guidance::VlmClient> client;
  if (config.client_mode == "live")
    client = std::make_unique<http::HttpVlmClient>(config.model_id,
                                                   config.vlm_endpoint);
  else
    client = std::make_unique<guidance::MockVlmClient>();

  std::function<std::int64_t()> now;
  if (config.fixed_clock >= 0)
    now = [t = config.fixed_clock] { return t; };

  guidance::GuidanceSession session(std::move(segments), taxonomy, *client,
                                    config.client_mode == "live"
                                        ? config.model_id
                                        : "mock",
                                    now);

  std::ostringstream out;
  std::istringstream events(io::read_file(config.events_path));
  std::string line;
  int line_no = 0;
  while (std::getline(events, line)) {
    ++line_no;
    if (line.empty())
      continue;
    nlohmann::json event_json;
    try {
      event_json = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw SchemaError("events line " + std::to_string(line_no) + ": " + e.what());
    }
    guidance::SessionEvent event{
        guidance::event_kind_from_string(event_json.at("kind").get<std::string>()),
        event_json.at("segment_id").get<std::string>()};
    const auto message = session.on_event(event);
    if (message)
      out << guidance::to_log_json(*message, road_types.at(message->segment_id))
                 .dump()
          << "\n";
  }
  io::write_file(fs::path(config.out_dir) / "guidance.jsonl", out.str());
  log::info("guidance: events processed",
            {{"events", line_no}, {"client_calls", session.client_calls()}});
}

void run_rate(const AuditConfig& config) {
  if (config.ratings_path.empty())
    throw ValidationError("rate stage requires ratings");
  std::ifstream in(config.ratings_path);
  if (!in)
    throw IoError("cannot open file: " + config.ratings_path);
  const auto matrix = ratings::RatingMatrix::from_csv(in);
  io::write_file(fs::path(config.out_dir) / "stats_descriptive.csv",
                 ratings::descriptive_report_csv(matrix));
  io::write_file(fs::path(config.out_dir) / "stats_agreement.csv",
                 ratings::agreement_report_csv(matrix));
}

} // namespace walkaudit::pipeline
