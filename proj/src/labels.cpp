#include "walkaudit/labels.hpp"

#include "walkaudit/errors.hpp"
#include "walkaudit/log.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <charconv>
#include <istream>
#include <sstream>

namespace walkaudit::labels {

Polarity polarity_from_string(std::string_view s) {
  if (s == "positive") return Polarity::positive;
  if (s == "negative") return Polarity::negative;
  throw SchemaError("unknown polarity '" + std::string(s) + "'");
}

std::string_view to_string(Polarity p) {
  return p == Polarity::positive ? "positive" : "negative";
}

std::string normalize_label_name(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c)))
      out.push_back(
          static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

LabelTaxonomy LabelTaxonomy::from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("labels") || !doc.at("labels").is_array())
    throw SchemaError("label taxonomy: expected {\"labels\": [...]}");

  LabelTaxonomy taxonomy;
  std::set<std::string> seen_names;
  for (const auto& entry : doc.at("labels")) {
    LabelType type;
    type.name = entry.at("name").get<std::string>();
    type.polarity = polarity_from_string(entry.at("polarity").get<std::string>());
    const std::string norm = normalize_label_name(type.name);
    if (!seen_names.insert(norm).second)
      throw SchemaError("label taxonomy: duplicate label type '" + type.name + "'");
    for (const auto& tag : entry.at("tags")) {
      const std::string t = tag.get<std::string>();
      if (!type.allowed_tags.insert(t).second)
        throw SchemaError("label taxonomy: duplicate tag '" + t + "' under '" +
                          type.name + "'");
    }
    taxonomy.types_.push_back(std::move(type));
  }
  if (taxonomy.types_.empty())
    throw SchemaError("label taxonomy: no label types defined");
  return taxonomy;
}

const LabelType* LabelTaxonomy::find(std::string_view name) const {
  const std::string norm = normalize_label_name(name);
  for (const auto& type : types_) {
    if (normalize_label_name(type.name) == norm)
      return &type;
  }
  return nullptr;
}

nlohmann::json LabelTaxonomy::to_json() const {
  nlohmann::json labels = nlohmann::json::array();
  for (const auto& type : types_) {
    labels.push_back({{"name", type.name},
                      {"polarity", std::string(to_string(type.polarity))},
                      {"tags", type.allowed_tags}});
  }
  return {{"labels", labels}};
}

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(text);
  while (std::getline(ss, field, sep))
    out.push_back(field);
  if (!text.empty() && text.back() == sep)
    out.emplace_back();
  return out;
}

std::string strip_cr(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == '\n'))
    s.pop_back();
  return s;
}

} // namespace

ParseResult parse_labels(std::istream& in, const LabelTaxonomy& taxonomy) {
  ParseResult result;
  std::string line;
  int line_no = 0;

  if (!std::getline(in, line))
    throw SchemaError("label CSV: empty file");
  ++line_no;
  if (strip_cr(line) != "label_id,segment_id,label_type,severity,tags,lat,lon,pano_id")
    throw SchemaError("label CSV: unexpected header row");

  auto reject = [&](int at_line, const std::string& reason) {
    std::ostringstream os;
    os << "line " << at_line << ": " << reason;
    result.rejected.push_back({at_line, os.str()});
    log::warn("label CSV row rejected", {{"line", at_line}, {"reason", reason}});
  };

  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty())
      continue;
    const auto fields = split(line, ',');
    if (fields.size() != 8) {
      reject(line_no, "expected 8 fields, got " + std::to_string(fields.size()));
      continue;
    }
    SegmentLabel label;
    label.label_id = fields[0];
    label.segment_id = fields[1];
    const LabelType* type = taxonomy.find(fields[2]);
    if (type == nullptr) {
      reject(line_no, "unknown label_type '" + fields[2] + "'");
      continue;
    }
    label.label_type = type->name;

    int severity = 0;
    const auto [ptr, ec] = std::from_chars(
        fields[3].data(), fields[3].data() + fields[3].size(), severity);
    if (ec != std::errc() || ptr != fields[3].data() + fields[3].size() ||
        severity < 1 || severity > 3) {
      reject(line_no, "severity '" + fields[3] + "' outside 1-3");
      continue;
    }
    label.severity = severity;

    bool tags_ok = true;
    if (!fields[4].empty()) {
      for (const auto& tag : split(fields[4], ';')) {
        if (!type->allowed_tags.count(tag)) {
          reject(line_no, "tag '" + tag + "' not allowed for '" + type->name + "'");
          tags_ok = false;
          break;
        }
        label.tags.insert(tag);
      }
    }
    if (!tags_ok)
      continue;

    try {
      label.location = {std::stod(fields[5]), std::stod(fields[6])};
      geo::validate_point(label.location);
    } catch (const std::exception& e) {
      reject(line_no, std::string("bad coordinates: ") + e.what());
      continue;
    }
    label.pano_id = fields[7];
    result.labels.push_back(std::move(label));
  }

  if (result.labels.empty())
    throw SchemaError("label CSV: no valid rows" +
                      (result.rejected.empty()
                           ? std::string()
                           : " (first reject: " + result.rejected.front().reason +
                                 ")"));
  return result;
}

double severity_weight(int severity) {
  switch (severity) {
  case 1: return 0.2;
  case 2: return 0.6;
  case 3: return 1.0;
  default:
    throw ValidationError("severity_weight: severity " +
                          std::to_string(severity) + " outside 1-3");
  }
}

} // namespace walkaudit::labels
