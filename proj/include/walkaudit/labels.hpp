#pragma once

#include "walkaudit/geo.hpp"

#include <nlohmann/json_fwd.hpp>

#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace walkaudit::labels {

/// Whether the presence of this feature type helps (crosswalks, signals,
/// navigable curbs) or hurts (obstacles, surface problems) accessibility.
enum class Polarity { positive, negative };

Polarity polarity_from_string(std::string_view s);
std::string_view to_string(Polarity p);

struct LabelType {
  std::string name;            ///< display name, e.g. "Curb Style"
  Polarity polarity = Polarity::negative;
  std::set<std::string> allowed_tags;
};

/// The city-adapted label/tag vocabulary. Tag sets are data, not code, so a
/// new deployment only swaps the schema file.
class LabelTaxonomy {
public:
  /// Loads {"labels": [{"name","polarity","tags":[...]}]}. Throws SchemaError
  /// on duplicate tags within a type, duplicate type names, or an unknown
  /// polarity value.
  static LabelTaxonomy from_json(const nlohmann::json& doc);

  /// Lookup tolerant to spacing and case: "Curb Style", "CurbStyle" and
  /// "curb style" all resolve to the same type. Returns nullptr when absent.
  const LabelType* find(std::string_view name) const;

  const std::vector<LabelType>& types() const { return types_; }

  nlohmann::json to_json() const;

private:
  std::vector<LabelType> types_;
};

/// Normalized lookup key: lowercase alphanumerics only.
std::string normalize_label_name(std::string_view name);

/// One annotation on a road segment.
struct SegmentLabel {
  std::string label_id;
  std::string segment_id;
  std::string label_type;      ///< display name as in the taxonomy
  int severity = 1;            ///< 1 (mild) .. 3 (severe)
  std::set<std::string> tags;
  geo::GeoPoint location;
  std::string pano_id;
};

struct RowError {
  int line = 0;
  std::string reason;
};

struct ParseResult {
  std::vector<SegmentLabel> labels;
  std::vector<RowError> rejected;
};

/// Parses the label export CSV
/// (label_id,segment_id,label_type,severity,tags,lat,lon,pano_id; tags are
/// ';'-joined). Invalid rows are rejected individually with their line
/// number; a file yielding zero valid rows throws SchemaError.
ParseResult parse_labels(std::istream& in, const LabelTaxonomy& taxonomy);

/// Severity-to-weight mapping: 1 -> 0.2, 2 -> 0.6, 3 -> 1.0.
/// Any other severity throws ValidationError.
double severity_weight(int severity);

} // namespace walkaudit::labels
