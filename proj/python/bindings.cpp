// Python bindings for the core audit operations.

#include "walkaudit/geo.hpp"
#include "walkaudit/guidance.hpp"
#include "walkaudit/io.hpp"
#include "walkaudit/labels.hpp"
#include "walkaudit/poi.hpp"
#include "walkaudit/ratings.hpp"
#include "walkaudit/road_graph.hpp"
#include "walkaudit/scoring.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

namespace py = pybind11;
using namespace walkaudit;

namespace {

geo::Polyline to_polyline(const std::vector<std::pair<double, double>>& latlon) {
  geo::Polyline line;
  for (auto [lat, lon] : latlon)
    line.points.push_back({lat, lon});
  return line;
}

labels::LabelTaxonomy load_label_taxonomy(const std::string& path) {
  return labels::LabelTaxonomy::from_json(io::load_json(path));
}

poi::PoiTaxonomy load_poi_taxonomy(const std::string& path) {
  return poi::PoiTaxonomy::from_json(io::load_json(path));
}

graph::RoadNetwork load_network(const std::string& path) {
  return graph::RoadNetwork::from_geojson(io::load_json(path));
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "POI-centric sidewalk accessibility audit toolkit";

  // geo
  m.def(
      "haversine_distance",
      [](double lat1, double lon1, double lat2, double lon2) {
        return geo::haversine_distance({lat1, lon1}, {lat2, lon2});
      },
      py::arg("lat1"), py::arg("lon1"), py::arg("lat2"), py::arg("lon2"),
      "Great-circle distance in meters (sphere radius 6371 km)");
  m.def(
      "polyline_length",
      [](const std::vector<std::pair<double, double>>& pts) {
        return geo::polyline_length(to_polyline(pts));
      },
      py::arg("points"), "Length in meters of a [(lat, lon), ...] chain");

  // labels / scoring
  m.def("severity_weight", &labels::severity_weight, py::arg("severity"));

  py::class_<labels::LabelTaxonomy>(m, "LabelTaxonomy")
      .def_static("load", &load_label_taxonomy, py::arg("path"))
      .def("label_names", [](const labels::LabelTaxonomy& tax) {
        std::vector<std::string> names;
        for (const auto& t : tax.types())
          names.push_back(t.name);
        return names;
      });

  m.def(
      "feature_contribution",
      [](const std::string& label_type, int severity,
         const labels::LabelTaxonomy& taxonomy) {
        labels::SegmentLabel label;
        label.segment_id = "s";
        label.label_type = label_type;
        label.severity = severity;
        return scoring::feature_contribution(label, taxonomy);
      },
      py::arg("label_type"), py::arg("severity"), py::arg("taxonomy"));
  m.def(
      "raw_segment_score",
      [](const std::vector<std::pair<std::string, int>>& typed_severities,
         const labels::LabelTaxonomy& taxonomy) {
        std::vector<labels::SegmentLabel> ls;
        for (const auto& [type, severity] : typed_severities) {
          labels::SegmentLabel label;
          label.segment_id = "s";
          label.label_type = type;
          label.severity = severity;
          ls.push_back(label);
        }
        return scoring::raw_segment_score(ls, taxonomy);
      },
      py::arg("labels"), py::arg("taxonomy"),
      "Sum of signed contributions for [(label_type, severity), ...]");
  m.def(
      "normalize_scores",
      [](const std::map<std::string, double>& raw) {
        return scoring::normalize_scores(raw);
      },
      py::arg("raw"),
      "Winsorize the negative tail, standardize, sigmoid; keys preserved");
  m.def(
      "poi_sec_score",
      [](const std::vector<double>& scores, const std::vector<double>& lengths) {
        return scoring::poi_sec_score(scores, lengths);
      },
      py::arg("seg_scores"), py::arg("lengths_m"));
  m.def(
      "poi_across_sector_score",
      [](const std::vector<std::pair<double, double>>& score_counts) {
        std::vector<scoring::CategoryGroup> groups;
        for (auto [score, count] : score_counts)
          groups.push_back({poi::Category::Uncategorized, score, count});
        return scoring::poi_across_sector_score(groups)
            .at(poi::Category::Uncategorized)
            .value();
      },
      py::arg("score_counts"),
      "POI-count-weighted mean of [(score, count), ...] for one category");

  // poi
  py::class_<poi::PoiTaxonomy>(m, "PoiTaxonomy")
      .def_static("load", &load_poi_taxonomy, py::arg("path"))
      .def("categorize_type", [](const poi::PoiTaxonomy& tax,
                                 const std::string& raw_type) {
        return std::string(poi::to_string(tax.categorize_type(raw_type)));
      });
  m.def(
      "dedup_coordinates",
      [](const std::vector<std::pair<double, double>>& coords) {
        std::vector<poi::PoiRecord> records;
        int i = 0;
        for (auto [lat, lon] : coords) {
          poi::PoiRecord rec;
          rec.provider_id = std::to_string(i++);
          rec.location = {lat, lon};
          rec.raw_types = {"x"};
          records.push_back(rec);
        }
        std::vector<std::size_t> kept;
        for (const auto& rec : poi::dedup(records))
          kept.push_back(static_cast<std::size_t>(std::stoul(rec.provider_id)));
        return kept;
      },
      py::arg("coords"),
      "Indices of first occurrences under 6-decimal coordinate dedup");

  // road graph
  py::class_<graph::RoadNetwork>(m, "RoadNetwork")
      .def_static("load", &load_network, py::arg("path"))
      .def_property_readonly("node_count", &graph::RoadNetwork::node_count)
      .def_property_readonly("edge_count", &graph::RoadNetwork::edge_count)
      .def("nearest_node",
           [](const graph::RoadNetwork& net, double lat, double lon) {
             return net.nearest_node({lat, lon});
           })
      .def(
          "trace_paths",
          [](const graph::RoadNetwork& net, int origin, double budget_m) {
            const auto traced = graph::trace_paths(net, origin, budget_m);
            std::vector<std::string> keys;
            for (auto id : traced.edges)
              keys.push_back(net.edge(id).key);
            return keys;
          },
          py::arg("origin"), py::arg("budget_m") = 1000.0,
          "Edge keys reachable within the shortest-path budget");

  // ratings
  m.def(
      "descriptive_stats",
      [](const std::vector<double>& values) {
        const auto s = ratings::descriptive_stats(values);
        return py::make_tuple(s.mean, s.sd, s.min, s.max, s.n);
      },
      py::arg("values"), "(mean, sample_sd, min, max, n)");
  m.def(
      "spearman",
      [](const std::vector<double>& a, const std::vector<double>& b)
          -> py::object {
        const auto r = ratings::spearman(a, b);
        if (!r.rho)
          return py::none();
        return py::make_tuple(*r.rho, *r.p);
      },
      py::arg("r1"), py::arg("r2"),
      "(rho, p) or None when a vector is constant");
  m.def(
      "weighted_kappa",
      [](const std::vector<int>& a, const std::vector<int>& b, int categories) {
        return ratings::weighted_kappa(a, b, categories);
      },
      py::arg("r1"), py::arg("r2"), py::arg("categories") = 5);

  // guidance
  m.def(
      "build_prompt",
      [](const std::string& road_type, const labels::LabelTaxonomy& taxonomy) {
        guidance::GuidanceRequest req;
        req.segment_id = "s";
        req.road_type = graph::road_type_from_string(road_type);
        return guidance::build_prompt(req, taxonomy);
      },
      py::arg("road_type"), py::arg("taxonomy"));

  m.attr("__version__") = "0.1.0";
}
