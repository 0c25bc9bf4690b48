#pragma once

// CSV ingestion, JSON (de)serialization of tessellations, regions and models,
// cover geometry export, SVG drawing for the plane, and atomic file writes.

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "pcd/classify.hpp"

namespace pcd {

using json = nlohmann::ordered_json;

struct CsvOptions {
  bool header = true;
  /// Column name (with header) or 0-based index; empty means the last column;
  /// "none" reads an unlabeled table.
  std::string label_column;
  /// Pre-seeded class names (e.g. from a model); new labels are appended.
  std::vector<std::string> classes;
  /// Reject labels not in `classes`.
  bool closed_classes = false;
};

struct LabeledTable {
  std::vector<std::string> feature_names;
  PointSet x;
  std::vector<int> y;  // empty for unlabeled tables
  std::vector<std::string> class_names;

  int dim() const { return x.empty() ? 0 : static_cast<int>(x[0].size()); }
  LabeledPoints points() const;
};

LabeledTable parse_csv(std::istream& in, const CsvOptions& opts, const std::string& source = "<input>");
LabeledTable load_csv(const std::string& path, const CsvOptions& opts);

/// Writes via a temporary file in the same directory and renames it.
void write_atomic(const std::string& path, const std::string& content);

json point_to_json(const Point& p);
Point point_from_json(const json& j);

json tessellation_to_json(const Tessellation& t);
Tessellation tessellation_from_json(const json& j);

json region_to_json(const ProximityRegion& r);
ProximityRegion region_from_json(const json& j);

json model_to_json(const TrainedModel& m);
TrainedModel model_from_json(const json& j);

/// Explicit geometry of every region of every cover: simplices and outer
/// polytopes as vertex lists, balls as center and radius.
json cover_geometry_json(const TrainedModel& m);

/// d = 2 only.
std::string cover_svg(const TrainedModel& m);

/// CSV comment block "# key: value" lines.
std::string provenance_comments(const json& provenance);

}  // namespace pcd
