// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Oracles here are written independently of the library code paths
// they check.

#include "walkaudit/config.hpp"
#include "walkaudit/coverage.hpp"
#include "walkaudit/errors.hpp"
#include "walkaudit/geo.hpp"
#include "walkaudit/guidance.hpp"
#include "walkaudit/io.hpp"
#include "walkaudit/labels.hpp"
#include "walkaudit/pipeline.hpp"
#include "walkaudit/poi.hpp"
#include "walkaudit/ratings.hpp"
#include "walkaudit/road_graph.hpp"
#include "walkaudit/scoring.hpp"

#include "scoring_reference.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <queue>
#include <random>
#include <set>
#include <sstream>

using namespace walkaudit;
namespace fs = std::filesystem;

namespace {

const std::string kData = WALKAUDIT_DATA_DIR;
const std::string kFixtures = WALKAUDIT_FIXTURES_DIR;
const std::string kTmp = WALKAUDIT_TEST_TMP;

int g_failures = 0;

void report(int criterion, const std::string& name, bool pass, double seconds,
            const std::string& detail = "") {
  std::printf("%s  criterion %2d  (%6.2fs)  %s%s%s\n", pass ? "PASS" : "FAIL",
              criterion, seconds, name.c_str(), detail.empty() ? "" : " -- ",
              detail.c_str());
  if (!pass)
    ++g_failures;
}

void run(int criterion, const std::string& name,
         const std::function<bool(std::string&)>& body) {
  const auto start = std::chrono::steady_clock::now();
  std::string detail;
  bool pass = false;
  try {
    pass = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  report(criterion, name, pass, seconds, detail);
}

const labels::LabelTaxonomy& label_taxonomy() {
  static labels::LabelTaxonomy tax = labels::LabelTaxonomy::from_json(
      io::load_json(kData + "/label_schema.json"));
  return tax;
}

labels::SegmentLabel make_label(const std::string& segment,
                                const std::string& type, int severity) {
  labels::SegmentLabel label;
  label.label_id = "l";
  label.segment_id = segment;
  label.label_type = type;
  label.severity = severity;
  label.location = {0.001, 0.001};
  label.pano_id = "p";
  return label;
}

// --------------------------------------------------------------- criterion 1

bool severity_exactness(std::string& detail) {
  const bool ok = labels::severity_weight(1) == 0.2 &&
                  labels::severity_weight(2) == 0.6 &&
                  labels::severity_weight(3) == 1.0;
  bool rejects = false;
  try {
    labels::severity_weight(4);
  } catch (const ValidationError&) {
    rejects = true;
  }
  detail = "0.2/0.6/1.0 exact equality";
  return ok && rejects;
}

// --------------------------------------------------------------- criterion 2

struct TypeInfo {
  const char* name;
  bool positive;
};

constexpr TypeInfo kTypes[] = {
    {"Curb Style", true},      {"Missing Curb Ramp", false},
    {"Obstacle in Path", false}, {"Surface Problem", false},
    {"No Sidewalk", false},    {"Crosswalk", true},
    {"Pedestrian Signal", true}};

bool scoring_oracle_equivalence(std::string& detail) {
  std::mt19937 rng(20240801);
  for (int corpus_i = 0; corpus_i < 100; ++corpus_i) {
    const int n_segments = 1 + static_cast<int>(rng() % 50);

    std::map<std::string, double> raw;
    std::map<std::string, double> reference_raw;
    for (int s = 0; s < n_segments; ++s) {
      char id[16];
      std::snprintf(id, sizeof(id), "seg%02d", s);
      std::vector<labels::SegmentLabel> seg_labels;
      double ref = 0.0;
      const int n_labels = static_cast<int>(rng() % 7); // up to 6
      for (int l = 0; l < n_labels; ++l) {
        const TypeInfo& type = kTypes[rng() % 7];
        const int severity = 1 + static_cast<int>(rng() % 3);
        seg_labels.push_back(make_label(id, type.name, severity));
        ref += reference::contribution(type.positive, severity);
      }
      raw[id] = scoring::raw_segment_score(seg_labels, label_taxonomy());
      reference_raw[id] = ref;
      if (std::abs(raw[id] - ref) > 1e-12) {
        detail = "raw score mismatch";
        return false;
      }
    }

    const auto seg = scoring::normalize_scores(raw);
    std::vector<double> flat;
    for (const auto& [id, r] : reference_raw)
      flat.push_back(r);
    const auto ref_seg = reference::normalize(flat);
    std::size_t i = 0;
    for (const auto& [id, got] : seg) {
      if (std::abs(got - ref_seg[i]) > 1e-9) {
        detail = "normalized score mismatch at " + id;
        return false;
      }
      ++i;
    }

    // Ordering preservation on every corpus.
    for (const auto& [id1, r1] : raw) {
      for (const auto& [id2, r2] : raw) {
        if (r1 <= r2 && seg.at(id1) > seg.at(id2) + 1e-15) {
          detail = "ordering violated";
          return false;
        }
      }
    }

    // POI layer: random grouping of segments with lengths.
    std::uniform_real_distribution<double> len(1.0, 500.0);
    std::vector<double> scores, lengths;
    for (const auto& [id, score] : seg) {
      scores.push_back(score);
      lengths.push_back(len(rng));
    }
    const double poi = scoring::poi_sec_score(scores, lengths);
    if (std::abs(poi - reference::weighted_mean(scores, lengths)) > 1e-9) {
      detail = "poi_sec_score mismatch";
      return false;
    }

    // Across-sector layer with random POI counts per category.
    std::vector<scoring::CategoryGroup> groups;
    std::map<poi::Category, std::vector<double>> ref_scores;
    std::map<poi::Category, std::vector<double>> ref_counts;
    const auto cats = poi::all_categories();
    const int n_groups = 1 + static_cast<int>(rng() % 6);
    for (int g = 0; g < n_groups; ++g) {
      const poi::Category cat = cats[rng() % cats.size()];
      const double score = scores[rng() % scores.size()];
      const double count = 1.0 + static_cast<double>(rng() % 9);
      groups.push_back({cat, score, count});
      ref_scores[cat].push_back(score);
      ref_counts[cat].push_back(count);
    }
    const auto across = scoring::poi_across_sector_score(groups);
    for (const auto& [cat, got] : across) {
      const double want =
          reference::weighted_mean(ref_scores.at(cat), ref_counts.at(cat));
      if (!got || std::abs(*got - want) > 1e-9) {
        detail = "across-sector mismatch";
        return false;
      }
    }
  }
  detail = "100 random corpora, full chain vs reference, 1e-9";
  return true;
}

// --------------------------------------------------------------- criterion 3

bool convexity_and_scaling(std::string& detail) {
  std::mt19937 rng(7777);
  std::uniform_real_distribution<double> score(0.0, 1.0);
  std::uniform_real_distribution<double> weight(0.01, 900.0);
  std::uniform_real_distribution<double> scale(0.001, 1000.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 12);
    std::vector<double> scores, weights, scaled;
    for (int i = 0; i < n; ++i) {
      scores.push_back(score(rng));
      weights.push_back(weight(rng));
    }
    const double k = scale(rng);
    for (double w : weights)
      scaled.push_back(w * k);

    const double v = scoring::poi_sec_score(scores, weights);
    const double lo = *std::min_element(scores.begin(), scores.end());
    const double hi = *std::max_element(scores.begin(), scores.end());
    if (v < lo || v > hi) {
      detail = "poi_sec_score outside input envelope";
      return false;
    }
    if (std::abs(v - scoring::poi_sec_score(scores, scaled)) > 1e-9) {
      detail = "poi_sec_score not scale invariant";
      return false;
    }

    std::vector<scoring::CategoryGroup> groups, groups_scaled;
    for (int i = 0; i < n; ++i) {
      const double count = 1.0 + static_cast<double>(rng() % 20);
      groups.push_back({poi::Category::Food, scores[static_cast<std::size_t>(i)], count});
      groups_scaled.push_back({poi::Category::Food,
                               scores[static_cast<std::size_t>(i)], count * 4.0});
    }
    const auto a = scoring::poi_across_sector_score(groups);
    const auto b = scoring::poi_across_sector_score(groups_scaled);
    const double va = a.at(poi::Category::Food).value();
    if (va < lo || va > hi) {
      detail = "across-sector outside envelope";
      return false;
    }
    if (std::abs(va - b.at(poi::Category::Food).value()) > 1e-9) {
      detail = "across-sector not scale invariant";
      return false;
    }
  }
  detail = "1000 random cases, bounds + uniform-scaling invariance";
  return true;
}

// --------------------------------------------------------------- criterion 4

nlohmann::json random_graph(std::mt19937& rng) {
  std::uniform_int_distribution<int> n_nodes(2, 30);
  const int n = n_nodes(rng);
  std::vector<std::pair<double, double>> coords;
  std::uniform_real_distribution<double> u(0.0, 0.05);
  for (int i = 0; i < n; ++i)
    coords.push_back({u(rng), u(rng) * 0.4});
  std::uniform_int_distribution<int> n_edges(1, 60);
  std::uniform_int_distribution<int> pick(0, n - 1);
  nlohmann::json features = nlohmann::json::array();
  const int m = n_edges(rng);
  for (int e = 0; e < m; ++e) {
    const int a = pick(rng);
    int b = pick(rng);
    if (a == b)
      b = (b + 1) % n;
    features.push_back(
        {{"type", "Feature"},
         {"properties", {{"highway", "residential"}, {"id", "e" + std::to_string(e)}}},
         {"geometry",
          {{"type", "LineString"},
           {"coordinates",
            {{coords[static_cast<std::size_t>(a)].first,
              coords[static_cast<std::size_t>(a)].second},
             {coords[static_cast<std::size_t>(b)].first,
              coords[static_cast<std::size_t>(b)].second}}}}}});
  }
  return {{"type", "FeatureCollection"}, {"features", features}};
}

std::set<graph::EdgeId> oracle_dijkstra(const graph::RoadNetwork& net,
                                        graph::NodeId origin, double budget) {
  std::vector<double> dist(net.node_count(),
                           std::numeric_limits<double>::infinity());
  using Item = std::pair<double, graph::NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[static_cast<std::size_t>(origin)] = 0.0;
  queue.push({0.0, origin});
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[static_cast<std::size_t>(u)])
      continue;
    for (const auto& [eid, v] : net.adjacency(u)) {
      const double nd = d + net.edge(eid).length_m;
      if (nd < dist[static_cast<std::size_t>(v)]) {
        dist[static_cast<std::size_t>(v)] = nd;
        queue.push({nd, v});
      }
    }
  }
  std::set<graph::EdgeId> edges;
  for (graph::EdgeId id = 0; id < static_cast<graph::EdgeId>(net.edge_count());
       ++id) {
    const auto& e = net.edge(id);
    if (std::min(dist[static_cast<std::size_t>(e.a)],
                 dist[static_cast<std::size_t>(e.b)]) <= budget)
      edges.insert(id);
  }
  return edges;
}

bool tracing_oracle(std::string& detail) {
  std::mt19937 rng(424242);
  std::uniform_real_distribution<double> budget_pick(100.0, 5000.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto doc = random_graph(rng);
    const auto net = graph::RoadNetwork::from_geojson(doc);
    const auto origin = static_cast<graph::NodeId>(
        rng() % static_cast<unsigned>(net.node_count()));
    const double budget = budget_pick(rng);

    const auto traced = graph::trace_paths(net, origin, budget);
    const std::set<graph::EdgeId> got(traced.edges.begin(), traced.edges.end());
    if (got != oracle_dijkstra(net, origin, budget)) {
      detail = "reachable edge set differs from Dijkstra oracle";
      return false;
    }

    // Monotone in budget.
    const auto smaller = graph::trace_paths(net, origin, budget * 0.5);
    const std::set<graph::EdgeId> small_set(smaller.edges.begin(),
                                            smaller.edges.end());
    if (!std::includes(got.begin(), got.end(), small_set.begin(),
                       small_set.end())) {
      detail = "budget monotonicity violated";
      return false;
    }

    // Order independence under shuffled feature insertion.
    auto features = doc.at("features");
    std::vector<nlohmann::json> shuffled(features.begin(), features.end());
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto net2 = graph::RoadNetwork::from_geojson(
        {{"type", "FeatureCollection"}, {"features", shuffled}});
    const auto traced2 =
        graph::trace_paths(net2, net2.nearest_node(net.node(origin)), budget);
    std::set<std::string> keys1, keys2;
    for (auto id : traced.edges)
      keys1.insert(net.edge(id).key);
    for (auto id : traced2.edges)
      keys2.insert(net2.edge(id).key);
    if (keys1 != keys2) {
      detail = "result depends on insertion order";
      return false;
    }
  }
  detail = "200 random graphs vs bounded-Dijkstra oracle";
  return true;
}

// --------------------------------------------------------------- criterion 5

bool coverage_threshold_semantics(std::string& detail) {
  const double deg100 = 100.0 / geo::kMetersPerDegree;
  nlohmann::json features = nlohmann::json::array();
  features.push_back(
      {{"type", "Feature"},
       {"properties", {{"highway", "residential"}, {"id", "seg"}}},
       {"geometry",
        {{"type", "LineString"}, {"coordinates", {{0.0, 0.0}, {deg100, 0.0}}}}}});
  const auto net = graph::RoadNetwork::from_geojson(
      {{"type", "FeatureCollection"}, {"features", features}});
  const auto traced = graph::trace_paths(net, 0, 1000.0);

  auto mask = [](double covered_meters) {
    coverage::CoverageMap map;
    map.poi_id = "p";
    geo::GridCell cell;
    cell.covered = true;
    cell.bounds = {-0.001, -0.001, 0.001,
                   covered_meters / geo::kMetersPerDegree};
    map.cells = {cell};
    return map;
  };

  const auto at75 = coverage::filter_segments(net, traced, mask(75.0), 0.75);
  if (!(std::abs(at75[0].fraction - 0.75) < 1e-12 && at75[0].retained)) {
    detail = "exact 75% not retained";
    return false;
  }
  const auto at74 = coverage::filter_segments(net, traced, mask(74.0), 0.75);
  if (at74[0].retained) {
    detail = "74% wrongly retained";
    return false;
  }

  // Monotonicity under added covered cells on 100 random masks.
  std::mt19937 rng(1234);
  const geo::LatLonRect region{-0.002, -0.002, 0.002, deg100 + 0.002};
  const auto grid = geo::tile_region(region, 70.0);
  for (int trial = 0; trial < 100; ++trial) {
    auto order = grid;
    std::shuffle(order.begin(), order.end(), rng);
    coverage::CoverageMap map;
    map.poi_id = "p";
    bool was_retained = false;
    for (std::size_t i = 0; i < order.size(); i += 3) {
      for (std::size_t k = i; k < std::min(i + 3, order.size()); ++k) {
        auto cell = order[k];
        cell.covered = true;
        map.cells.push_back(cell);
      }
      const auto verdicts = coverage::filter_segments(net, traced, map, 0.75);
      if (was_retained && !verdicts[0].retained) {
        detail = "adding cells flipped a retained verdict";
        return false;
      }
      was_retained = verdicts[0].retained;
    }
  }
  detail = "boundary-inclusive 75% plus monotonicity on 100 masks";
  return true;
}

// --------------------------------------------------------------- criterion 6

bool dedup_and_taxonomies(std::string& detail) {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(0.0, 0.0005);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<poi::PoiRecord> records;
    const int n = static_cast<int>(rng() % 60);
    for (int i = 0; i < n; ++i) {
      poi::PoiRecord rec;
      rec.provider_id = "r" + std::to_string(i);
      rec.location = {u(rng), u(rng)};
      rec.raw_types = {"store"};
      records.push_back(rec);
    }
    const auto once = poi::dedup(records);
    const auto twice = poi::dedup(once);
    if (once.size() != twice.size() || once.size() > records.size()) {
      detail = "dedup not idempotent";
      return false;
    }
    std::set<std::pair<long, long>> keys;
    for (const auto& rec : once) {
      if (!keys.insert({std::lround(rec.location.lat * 1e6),
                        std::lround(rec.location.lon * 1e6)})
               .second) {
        detail = "duplicate coordinate key survived dedup";
        return false;
      }
    }
  }

  // Every shipped provider type maps to exactly one category.
  const auto doc = io::load_json(kData + "/poi_categories.json");
  const auto taxonomy = poi::PoiTaxonomy::from_json(doc);
  std::size_t total = 0;
  for (const auto& [cat, types] : doc.at("categories").items()) {
    for (const auto& t : types) {
      ++total;
      if (taxonomy.categorize_type(t.get<std::string>()) !=
          poi::category_from_string(cat)) {
        detail = "type maps to the wrong category";
        return false;
      }
    }
  }
  if (total != taxonomy.type_map().size()) {
    detail = "type table size mismatch";
    return false;
  }

  // Tag validation: removed tag rejected, new tag accepted.
  std::istringstream csv(
      "label_id,segment_id,label_type,severity,tags,lat,lon,pano_id\n"
      "a,e1,Obstacle in Path,2,mailbox,0.001,0.001,p\n"
      "b,e1,Obstacle in Path,2,drainage,0.001,0.001,p\n");
  const auto parsed = labels::parse_labels(csv, label_taxonomy());
  if (parsed.labels.size() != 1 || parsed.rejected.size() != 1 ||
      parsed.labels[0].label_id != "b") {
    detail = "tag adaptation not enforced";
    return false;
  }
  detail = "dedup fuzz + both taxonomies validated";
  return true;
}

// --------------------------------------------------------------- criterion 7

std::vector<double> oracle_ranks(const std::vector<double>& v) {
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    int smaller = 0, equal = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] < v[i])
        ++smaller;
      else if (v[j] == v[i])
        ++equal;
    }
    ranks[i] = 1.0 + smaller + (equal - 1) / 2.0;
  }
  return ranks;
}

double oracle_rho(const std::vector<double>& a, const std::vector<double>& b) {
  const auto x = oracle_ranks(a);
  const auto y = oracle_ranks(b);
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxy += x[i] * y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
  }
  return (sxy - sx * sy / n) /
         std::sqrt((sxx - sx * sx / n) * (syy - sy * sy / n));
}

double oracle_kappa(const std::vector<int>& a, const std::vector<int>& b, int k) {
  const double n = static_cast<double>(a.size());
  const double scale = static_cast<double>((k - 1) * (k - 1));
  auto w = [&](int i, int j) {
    return static_cast<double>((i - j) * (i - j)) / scale;
  };
  double po = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t)
    po += w(a[t], b[t]);
  po /= n;
  double pe = 0.0;
  for (std::size_t s = 0; s < a.size(); ++s)
    for (std::size_t t = 0; t < b.size(); ++t)
      pe += w(a[s], b[t]);
  pe /= n * n;
  if (pe <= 0.0)
    return 0.0;
  return 1.0 - po / pe;
}

bool statistics_oracles(std::string& detail) {
  // Exhaustive length-4 vectors over {1..3}.
  std::vector<std::vector<int>> all;
  for (int a = 1; a <= 3; ++a)
    for (int b = 1; b <= 3; ++b)
      for (int c = 1; c <= 3; ++c)
        for (int d = 1; d <= 3; ++d)
          all.push_back({a, b, c, d});
  for (const auto& x : all) {
    for (const auto& y : all) {
      if (std::abs(ratings::weighted_kappa(x, y, 3) - oracle_kappa(x, y, 3)) >
          1e-12) {
        detail = "kappa differs from oracle (exhaustive)";
        return false;
      }
      const std::vector<double> dx(x.begin(), x.end()), dy(y.begin(), y.end());
      const auto sp = ratings::spearman(dx, dy);
      const bool cx = x[1] == x[0] && x[2] == x[0] && x[3] == x[0];
      const bool cy = y[1] == y[0] && y[2] == y[0] && y[3] == y[0];
      if (cx || cy) {
        if (sp.rho.has_value()) {
          detail = "constant vector did not yield the undefined marker";
          return false;
        }
      } else if (std::abs(*sp.rho - oracle_rho(dx, dy)) > 1e-12) {
        detail = "rho differs from oracle (exhaustive)";
        return false;
      }
    }
  }

  // 1000 random length-50 vectors over {1..5}.
  std::mt19937 rng(50505);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<int> a(50), b(50);
    for (int i = 0; i < 50; ++i) {
      a[static_cast<std::size_t>(i)] = 1 + static_cast<int>(rng() % 5);
      b[static_cast<std::size_t>(i)] = 1 + static_cast<int>(rng() % 5);
    }
    if (std::abs(ratings::weighted_kappa(a, b) - oracle_kappa(a, b, 5)) > 1e-12) {
      detail = "kappa differs from oracle (random)";
      return false;
    }
    const std::vector<double> da(a.begin(), a.end()), db(b.begin(), b.end());
    const auto sp = ratings::spearman(da, db);
    if (!sp.rho || std::abs(*sp.rho - oracle_rho(da, db)) > 1e-12) {
      detail = "rho differs from oracle (random)";
      return false;
    }
  }

  // Identical non-constant vectors; constant vectors.
  const std::vector<int> v{1, 3, 5, 2, 4, 4, 1, 5};
  const std::vector<double> dv(v.begin(), v.end());
  const auto same = ratings::spearman(dv, dv);
  if (!same.rho || *same.rho != 1.0 || ratings::weighted_kappa(v, v) != 1.0) {
    detail = "identical vectors: rho/kappa not 1";
    return false;
  }
  const std::vector<double> constant(8, 5.0);
  if (ratings::spearman(dv, constant).rho.has_value()) {
    detail = "constant vector: missing n/a marker";
    return false;
  }
  detail = "exhaustive + 1000 random vectors vs brute-force oracles, 1e-12";
  return true;
}

// --------------------------------------------------------------- criterion 8

bool guidance_protocol(std::string& detail) {
  std::mt19937 rng(606060);
  std::vector<guidance::GuidanceRequest> segments;
  for (int i = 0; i < 25; ++i) {
    guidance::GuidanceRequest req;
    req.segment_id = "seg" + std::to_string(i);
    req.road_type = static_cast<graph::RoadType>(i % 5);
    req.start_pano = {"sp" + std::to_string(i), ""};
    req.end_pano = {"ep" + std::to_string(i), ""};
    segments.push_back(req);
  }

  int total_events = 0;
  while (total_events < 10000) {
    guidance::MockVlmClient client;
    guidance::GuidanceSession session(segments, label_taxonomy(), client,
                                      "mock", [] { return std::int64_t{7}; });
    std::set<std::string> visited;
    std::optional<std::string> last_triggered;
    const int session_events = 500;
    for (int e = 0; e < session_events; ++e) {
      const auto kind = static_cast<guidance::EventKind>(rng() % 3);
      const std::string id = "seg" + std::to_string(rng() % 25);
      const auto msg = session.on_event({kind, id});
      if (msg) {
        if (last_triggered && *last_triggered == id) {
          detail = "double trigger without segment change";
          return false;
        }
        last_triggered = id;
        visited.insert(id);
      }
    }
    total_events += session_events;
    if (client.calls() > static_cast<int>(visited.size())) {
      detail = "client calls exceed distinct segments";
      return false;
    }
  }

  const auto residential = guidance::build_prompt(
      {"s", graph::RoadType::residential, {"a", ""}, {"b", ""}}, label_taxonomy());
  const auto secondary = guidance::build_prompt(
      {"s", graph::RoadType::secondary, {"a", ""}, {"b", ""}}, label_taxonomy());
  if (residential.find("treat the road itself as the pedestrian path") ==
          std::string::npos ||
      residential.find("surface problems") == std::string::npos) {
    detail = "residential prompt missing the obstacle/surface clause";
    return false;
  }
  if (secondary.find("missing curb ramps") == std::string::npos ||
      secondary.find("crosswalk") == std::string::npos) {
    detail = "secondary prompt missing the curb/crosswalk clause";
    return false;
  }
  detail = "10000 events: call bound, no double triggers, prompt clauses";
  return true;
}

// --------------------------------------------------------------- criterion 9

AuditConfig fixture_config(const std::string& out_dir) {
  AuditConfig config;
  config.network_path = kFixtures + "/mini_sector/network.geojson";
  config.sectors_path = kFixtures + "/mini_sector/sectors.geojson";
  config.poi_taxonomy_path = kData + "/poi_categories.json";
  config.label_taxonomy_path = kData + "/label_schema.json";
  config.labels_path = kFixtures + "/mini_sector/labels.csv";
  config.places_fixture_path = kFixtures + "/mini_sector/places_fixture.json";
  config.streetview_fixture_path =
      kFixtures + "/mini_sector/streetview_fixture.json";
  config.coverage_radius_m = 1700.0;
  config.out_dir = out_dir;
  config.validate();
  return config;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool end_to_end_determinism(std::string& detail) {
  const fs::path out1 = fs::path(kTmp) / "acc_audit1";
  const fs::path out2 = fs::path(kTmp) / "acc_audit2";
  fs::remove_all(out1);
  fs::remove_all(out2);

  const auto report1 = pipeline::run_audit(fixture_config(out1.string()));
  const auto report2 = pipeline::run_audit(fixture_config(out2.string()));

  if (report1.findings_count != 7 || report2.findings_count != 7) {
    detail = "findings count != 7";
    return false;
  }
  for (const char* name :
       {"summary.csv", "heatmap.geojson", "retained.csv", "pois.csv"}) {
    if (slurp(out1 / name) != slurp(out2 / name)) {
      detail = std::string("artifact differs between runs: ") + name;
      return false;
    }
  }

  const auto expected =
      io::load_json(kFixtures + "/mini_sector/expected_scoreset.json");
  const auto heatmap = io::load_json(out1 / "heatmap.geojson");
  std::size_t checked = 0;
  for (const auto& feature : heatmap.at("features")) {
    const std::string id = feature.at("properties").at("id").get<std::string>();
    const double got = feature.at("properties").at("seg_score").get<double>();
    const double want = expected.at("seg").at(id).get<double>();
    if (std::abs(got - want) > 1e-9) {
      detail = "seg score differs from the precomputed oracle at " + id;
      return false;
    }
    ++checked;
  }
  if (checked != expected.at("corpus_segments").size()) {
    detail = "scored segment set differs from the oracle corpus";
    return false;
  }
  detail = "oracle score set reproduced; two runs byte-identical";
  return true;
}

// -------------------------------------------------------------- criterion 10

bool reference_fixtures(std::string& detail) {
  // Commercial-count argmax over the reference table.
  std::istringstream counts_csv(
      slurp(kFixtures + "/aux/commercial_counts.csv"));
  std::string line;
  std::getline(counts_csv, line); // header
  std::map<std::string, int> counts;
  while (std::getline(counts_csv, line)) {
    if (line.empty())
      continue;
    const auto comma = line.find(',');
    counts[line.substr(0, comma)] = std::stoi(line.substr(comma + 1));
  }
  if (counts != std::map<std::string, int>{{"sector-26", 162},
                                           {"sector-34", 171},
                                           {"sector-43", 164}} ||
      poi::select_sector(counts) != "sector-34") {
    detail = "argmax over {162, 171, 164} did not select sector 34";
    return false;
  }

  // Descriptive stats on the bundled synthetic ratings vs the oracle.
  std::ifstream ratings_file(kFixtures + "/aux/ratings_sample.csv");
  const auto matrix = ratings::RatingMatrix::from_csv(ratings_file);
  const auto expected = io::load_json(kFixtures + "/aux/expected_ratings.json");
  for (const auto& criterion : matrix.criteria) {
    std::vector<double> cells;
    for (const auto& rater : matrix.raters) {
      for (int v : matrix.scores.at(criterion).at(rater))
        cells.push_back(static_cast<double>(v));
    }
    const auto stats = ratings::descriptive_stats(cells);
    const auto& want = expected.at("descriptive").at(criterion);
    if (std::abs(stats.mean - want.at("mean").get<double>()) > 1e-9 ||
        std::abs(stats.sd - want.at("sd").get<double>()) > 1e-9 ||
        stats.n != want.at("n").get<int>()) {
      detail = "descriptive stats differ from the oracle for " + criterion;
      return false;
    }
  }
  detail = "sector-34 argmax + ratings descriptive stats at 1e-9";
  return true;
}

} // namespace

int main() {
  run(1, "severity mapping exactness", severity_exactness);
  run(2, "scoring oracle equivalence", scoring_oracle_equivalence);
  run(3, "convex-combination bounds", convexity_and_scaling);
  run(4, "graph tracing oracle", tracing_oracle);
  run(5, "coverage threshold semantics", coverage_threshold_semantics);
  run(6, "dedup and taxonomy", dedup_and_taxonomies);
  run(7, "statistics oracles", statistics_oracles);
  run(8, "guidance protocol", guidance_protocol);
  run(9, "end-to-end determinism", end_to_end_determinism);
  run(10, "reference fixtures", reference_fixtures);

  if (g_failures == 0) {
    std::printf("all 10 criteria passed\n");
    return 0;
  }
  std::printf("%d criteria failed\n", g_failures);
  return 1;
}
