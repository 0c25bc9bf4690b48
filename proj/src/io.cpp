#include "pcd/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <unistd.h>

namespace pcd {

namespace {

// One RFC-4180 record; returns false at end of input. Quoted fields may span lines.
bool read_record(std::istream& in, std::vector<std::string>& fields, int& line_no) {
  fields.clear();
  std::string field;
  bool in_quotes = false, any = false, was_quoted = false;
  int c;
  while ((c = in.get()) != EOF) {
    any = true;
    const char ch = static_cast<char>(c);
    if (in_quotes) {
      if (ch == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line_no;
        field.push_back(ch);
      }
      continue;
    }
    if (ch == '"' && field.empty() && !was_quoted) {
      in_quotes = was_quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else if (ch == '\n') {
      ++line_no;
      fields.push_back(std::move(field));
      return true;
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  if (in_quotes) throw Error(Errc::ParseError, "unterminated quoted field");
  if (!any) return false;
  fields.push_back(std::move(field));
  ++line_no;
  return true;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool blank(const std::vector<std::string>& f) {
  for (const auto& s : f) {
    if (!trim(s).empty()) return false;
  }
  return true;
}

json points_to_json(const PointSet& ps) {
  json a = json::array();
  for (const auto& p : ps) a.push_back(point_to_json(p));
  return a;
}

PointSet points_from_json(const json& j) {
  PointSet out;
  for (const auto& p : j) out.push_back(point_from_json(p));
  return out;
}

json cover_to_json(const Cover& c) {
  json j;
  j["label"] = c.label;
  j["kind"] = to_string(c.kind);
  json protos = json::array();
  for (std::size_t i = 0; i < c.prototypes.size(); ++i) {
    const auto& p = c.prototypes[i];
    protos.push_back({{"index", p.index},
                      {"provenance", to_string(p.provenance)},
                      {"component", p.component},
                      {"point", point_to_json(c.points[i])},
                      {"region", region_to_json(p.region)}});
  }
  j["prototypes"] = std::move(protos);
  return j;
}

Provenance provenance_from_string(const std::string& s) {
  if (s == "inner-exact") return Provenance::InnerExact;
  if (s == "outer-exact") return Provenance::OuterExact;
  if (s == "outer-greedy") return Provenance::OuterGreedy;
  throw Error(Errc::ParseError, "unknown prototype provenance '" + s + "'");
}

Cover cover_from_json(const json& j, std::shared_ptr<const Tessellation> tess) {
  Cover c;
  c.label = j.at("label").get<int>();
  c.kind = cover_kind_from_string(j.at("kind").get<std::string>());
  if (c.kind != CoverKind::Spherical) {
    if (!tess) throw Error(Errc::ParseError, "cover needs a tessellation that the model does not contain");
    c.tess = std::move(tess);
  }
  for (const auto& p : j.at("prototypes")) {
    Prototype proto;
    proto.index = p.at("index").get<int>();
    proto.provenance = provenance_from_string(p.at("provenance").get<std::string>());
    proto.component = p.at("component").get<int>();
    proto.region = region_from_json(p.at("region"));
    c.prototypes.push_back(std::move(proto));
    c.points.push_back(point_from_json(p.at("point")));
  }
  return c;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

}  // namespace

LabeledPoints LabeledTable::points() const {
  LabeledPoints p;
  p.x = x;
  p.y = y;
  p.n_classes = static_cast<int>(class_names.size());
  return p;
}

LabeledTable parse_csv(std::istream& in, const CsvOptions& opts, const std::string& source) {
  LabeledTable t;
  t.class_names = opts.classes;
  std::map<std::string, int> class_index;
  for (std::size_t i = 0; i < t.class_names.size(); ++i) class_index[t.class_names[i]] = static_cast<int>(i);

  std::vector<std::string> fields;
  int line = 0;
  auto where = [&](int row, int col) {
    return source + ": row " + std::to_string(row) + (col >= 0 ? ", column " + std::to_string(col + 1) : "");
  };
  auto next = [&]() {
    try {
      while (read_record(in, fields, line)) {
        if (!blank(fields)) return true;
      }
      return false;
    } catch (const Error& e) {
      throw Error(Errc::ParseError, where(line + 1, -1) + ": " + e.what());
    }
  };

  if (!next()) throw Error(Errc::ParseError, source + ": empty input");
  const int ncols = static_cast<int>(fields.size());
  std::vector<std::string> names;
  if (opts.header) {
    for (auto& f : fields) names.push_back(trim(f));
  } else {
    for (int i = 0; i < ncols; ++i) names.push_back("x" + std::to_string(i + 1));
  }

  int label_col = ncols - 1;
  const bool labeled = opts.label_column != "none";
  if (!labeled) {
    label_col = -1;
  } else if (!opts.label_column.empty()) {
    auto it = std::find(names.begin(), names.end(), opts.label_column);
    if (opts.header && it != names.end()) {
      label_col = static_cast<int>(it - names.begin());
    } else {
      char* end = nullptr;
      const long v = std::strtol(opts.label_column.c_str(), &end, 10);
      if (*end != '\0' || v < 0 || v >= ncols) {
        throw Error(Errc::MissingLabel, source + ": label column '" + opts.label_column + "' not found");
      }
      label_col = static_cast<int>(v);
    }
  }
  for (int i = 0; i < ncols; ++i) {
    if (i != label_col) t.feature_names.push_back(names[i]);
  }
  if (t.feature_names.empty()) throw Error(Errc::ParseError, source + ": no feature columns");

  bool have_row = !opts.header;
  while (have_row || next()) {
    have_row = false;
    const int row = line;
    if (static_cast<int>(fields.size()) != ncols) {
      throw Error(Errc::ParseError, where(row, -1) + ": expected " + std::to_string(ncols) + " fields, found " +
                                        std::to_string(fields.size()));
    }
    Point p(static_cast<int>(t.feature_names.size()));
    int k = 0;
    for (int i = 0; i < ncols; ++i) {
      if (i == label_col) continue;
      const std::string s = trim(fields[i]);
      errno = 0;
      char* end = nullptr;
      const double v = std::strtod(s.c_str(), &end);
      if (s.empty() || *end != '\0') {
        throw Error(Errc::NonNumericFeature, where(row, i) + ": non-numeric feature '" + s + "'");
      }
      if (!std::isfinite(v)) throw Error(Errc::NonNumericFeature, where(row, i) + ": feature is not finite");
      p[k++] = v;
    }
    t.x.push_back(std::move(p));
    if (labeled) {
      const std::string label = trim(fields[label_col]);
      if (label.empty()) throw Error(Errc::MissingLabel, where(row, label_col) + ": empty label");
      auto it = class_index.find(label);
      if (it == class_index.end()) {
        if (opts.closed_classes) {
          throw Error(Errc::InvalidArgument, where(row, label_col) + ": label '" + label + "' unknown to the model");
        }
        it = class_index.emplace(label, static_cast<int>(t.class_names.size())).first;
        t.class_names.push_back(label);
      }
      t.y.push_back(it->second);
    }
  }
  if (t.x.empty()) throw Error(Errc::ParseError, source + ": no data rows");
  return t;
}

LabeledTable load_csv(const std::string& path, const CsvOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ParseError, path + ": cannot open file");
  return parse_csv(in, opts, path);
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename onto " + path + ": " + ec.message());
  }
}

json point_to_json(const Point& p) {
  json a = json::array();
  for (int i = 0; i < p.size(); ++i) a.push_back(p[i]);
  return a;
}

Point point_from_json(const json& j) {
  Point p(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) p[static_cast<int>(i)] = j[i].get<double>();
  return p;
}

json tessellation_to_json(const Tessellation& t) {
  json j;
  j["dim"] = t.dim();
  j["points"] = points_to_json(t.points());
  json cells = json::array();
  for (const auto& c : t.cells()) cells.push_back(c.vertex_ids());
  j["cells"] = std::move(cells);
  json outer = json::array();
  for (const auto& o : t.outer()) {
    json rays = json::array();
    for (int k = 0; k < o.rays().cols(); ++k) rays.push_back(point_to_json(o.rays().col(k)));
    outer.push_back({{"facet_ids", o.facet_ids()}, {"ray_dirs", std::move(rays)}});
  }
  j["outer"] = std::move(outer);
  j["hull_center"] = point_to_json(t.hull_center());
  return j;
}

Tessellation tessellation_from_json(const json& j) {
  std::vector<std::vector<int>> cells, facets;
  for (const auto& c : j.at("cells")) cells.push_back(c.get<std::vector<int>>());
  for (const auto& o : j.at("outer")) facets.push_back(o.at("facet_ids").get<std::vector<int>>());
  return Tessellation::from_parts(points_from_json(j.at("points")), std::move(cells), std::move(facets));
}

json region_to_json(const ProximityRegion& r) {
  if (const auto* g = std::get_if<InnerPERegion>(&r)) {
    return {{"type", "inner"}, {"cell", g->cell}, {"vertex", g->vertex}, {"tau", g->tau},
            {"r", g->r},       {"anchor", point_to_json(g->anchor)}};
  }
  if (const auto* g = std::get_if<OuterPERegion>(&r)) {
    return {{"type", "outer"}, {"outer", g->outer}, {"level", g->level}, {"level_cap", g->cap()},
            {"r", g->r},       {"anchor", point_to_json(g->anchor)}};
  }
  if (const auto* b = std::get_if<BallRegion>(&r)) {
    return {{"type", "ball"}, {"center", point_to_json(b->center)}, {"radius", b->radius}, {"theta", b->theta}};
  }
  return {{"type", "none"}};
}

ProximityRegion region_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "inner") {
    InnerPERegion g;
    g.cell = j.at("cell").get<int>();
    g.vertex = j.at("vertex").get<int>();
    g.tau = j.at("tau").get<double>();
    g.r = j.at("r").get<double>();
    g.anchor = point_from_json(j.at("anchor"));
    return g;
  }
  if (type == "outer") {
    OuterPERegion g;
    g.outer = j.at("outer").get<int>();
    g.level = j.at("level").get<double>();
    g.r = j.at("r").get<double>();
    g.anchor = point_from_json(j.at("anchor"));
    return g;
  }
  if (type == "ball") {
    BallRegion b;
    b.center = point_from_json(j.at("center"));
    b.radius = j.at("radius").get<double>();
    b.theta = j.at("theta").get<double>();
    return b;
  }
  if (type == "none") return std::monostate{};
  throw Error(Errc::ParseError, "unknown region type '" + type + "'");
}

json model_to_json(const TrainedModel& m) {
  json j;
  j["format"] = "pcd-model";
  j["format_version"] = 1;
  j["params"] = {{"kind", to_string(m.params.kind)},
                 {"r", m.params.r},
                 {"theta", m.params.theta},
                 {"k", m.params.k},
                 {"tol", m.params.tol},
                 {"with_cccd", m.params.with_cccd},
                 {"delaunay_seed", m.params.delaunay.seed}};
  j["dim"] = m.dim;
  j["class_names"] = m.class_names;
  j["priors"] = m.priors;
  j["notes"] = m.notes;
  j["train"] = {{"x", points_to_json(m.train.x)}, {"y", m.train.y}};
  json classes = json::array();
  for (int c = 0; c < m.n_classes; ++c) {
    json cj;
    cj["tessellation"] = m.tess[c] ? tessellation_to_json(*m.tess[c]) : json(nullptr);
    cj["cover"] = cover_to_json(m.covers[c]);
    if (!m.cccd.empty()) cj["cccd"] = cover_to_json(m.cccd[c]);
    classes.push_back(std::move(cj));
  }
  j["classes"] = std::move(classes);
  return j;
}

TrainedModel model_from_json(const json& j) {
  if (j.value("format", "") != "pcd-model") throw Error(Errc::ParseError, "not a model file");
  if (j.value("format_version", 0) != 1) throw Error(Errc::ParseError, "unsupported model format version");
  TrainedModel m;
  const auto& p = j.at("params");
  m.params.kind = cover_kind_from_string(p.at("kind").get<std::string>());
  m.params.r = p.at("r").get<double>();
  m.params.theta = p.at("theta").get<double>();
  m.params.k = p.at("k").get<int>();
  m.params.tol = p.at("tol").get<double>();
  m.params.with_cccd = p.at("with_cccd").get<bool>();
  m.params.delaunay.seed = p.at("delaunay_seed").get<std::uint64_t>();
  m.dim = j.at("dim").get<int>();
  m.class_names = j.at("class_names").get<std::vector<std::string>>();
  m.priors = j.at("priors").get<std::vector<double>>();
  m.notes = j.at("notes").get<std::vector<std::string>>();
  m.train.x = points_from_json(j.at("train").at("x"));
  m.train.y = j.at("train").at("y").get<std::vector<int>>();
  const auto& classes = j.at("classes");
  m.n_classes = static_cast<int>(classes.size());
  m.train.n_classes = m.n_classes;
  for (const auto& cj : classes) {
    std::shared_ptr<const Tessellation> t;
    if (!cj.at("tessellation").is_null()) {
      t = std::make_shared<const Tessellation>(tessellation_from_json(cj.at("tessellation")));
    }
    m.tess.push_back(t);
    m.covers.push_back(cover_from_json(cj.at("cover"), t));
    if (cj.contains("cccd")) m.cccd.push_back(cover_from_json(cj.at("cccd"), nullptr));
  }
  return m;
}

json cover_geometry_json(const TrainedModel& m) {
  json out = json::array();
  for (int c = 0; c < m.n_classes; ++c) {
    const Cover& cov = m.covers[c];
    json regions = json::array();
    for (std::size_t i = 0; i < cov.prototypes.size(); ++i) {
      const auto& proto = cov.prototypes[i];
      if (const auto* b = std::get_if<BallRegion>(&proto.region)) {
        regions.push_back({{"type", "ball"}, {"prototype", point_to_json(cov.points[i])},
                           {"center", point_to_json(b->center)}, {"radius", b->radius}});
      } else {
        const bool inner = std::holds_alternative<InnerPERegion>(proto.region);
        regions.push_back({{"type", inner ? "simplex" : "polytope"},
                           {"prototype", point_to_json(cov.points[i])},
                           {"vertices", points_to_json(region_vertices(*cov.tess, proto.region))}});
      }
    }
    json cj;
    cj["class"] = c < static_cast<int>(m.class_names.size()) ? json(m.class_names[c]) : json(c);
    cj["kind"] = to_string(cov.kind);
    cj["points"] = points_to_json(m.train.class_points(c));
    cj["regions"] = std::move(regions);
    out.push_back(std::move(cj));
  }
  return out;
}

std::string cover_svg(const TrainedModel& m) {
  if (m.dim != 2) throw Error(Errc::InvalidArgument, "SVG export needs two-dimensional data");
  double lo[2] = {1e300, 1e300}, hi[2] = {-1e300, -1e300};
  for (const auto& p : m.train.x) {
    for (int k = 0; k < 2; ++k) {
      lo[k] = std::min(lo[k], p[k]);
      hi[k] = std::max(hi[k], p[k]);
    }
  }
  const double pad = 0.15 * std::max(hi[0] - lo[0], hi[1] - lo[1]) + 1e-9;
  for (int k = 0; k < 2; ++k) {
    lo[k] -= pad;
    hi[k] += pad;
  }
  const double size = 600.0;
  const double scale = size / std::max(hi[0] - lo[0], hi[1] - lo[1]);
  auto sx = [&](double x) { return fmt((x - lo[0]) * scale); };
  auto sy = [&](double y) { return fmt((hi[1] - y) * scale); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt((hi[0] - lo[0]) * scale) << "\" height=\""
    << fmt((hi[1] - lo[1]) * scale) << "\">\n";
  s << "<defs><clipPath id=\"frame\"><rect x=\"0\" y=\"0\" width=\"" << fmt((hi[0] - lo[0]) * scale)
    << "\" height=\"" << fmt((hi[1] - lo[1]) * scale) << "\"/></clipPath></defs>\n";
  s << "<g clip-path=\"url(#frame)\">\n";
  for (int c = 0; c < m.n_classes; ++c) {
    const char* col = colors[c % 6];
    const Cover& cov = m.covers[c];
    for (const auto& proto : cov.prototypes) {
      if (const auto* b = std::get_if<BallRegion>(&proto.region)) {
        s << "<circle cx=\"" << sx(b->center[0]) << "\" cy=\"" << sy(b->center[1]) << "\" r=\""
          << fmt(b->radius * scale) << "\" fill=\"" << col << "\" fill-opacity=\"0.15\" stroke=\"" << col
          << "\"/>\n";
        continue;
      }
      PointSet v = region_vertices(*cov.tess, proto.region);
      if (std::holds_alternative<OuterPERegion>(proto.region)) {
        // facet edge, then the far edge walked backwards
        v = {v[0], v[1], v[3], v[2]};
      }
      s << "<polygon points=\"";
      for (std::size_t i = 0; i < v.size(); ++i) s << (i ? " " : "") << sx(v[i][0]) << "," << sy(v[i][1]);
      s << "\" fill=\"" << col << "\" fill-opacity=\"0.15\" stroke=\"" << col << "\"/>\n";
    }
  }
  for (std::size_t i = 0; i < m.train.x.size(); ++i) {
    const auto& p = m.train.x[i];
    s << "<circle cx=\"" << sx(p[0]) << "\" cy=\"" << sy(p[1]) << "\" r=\"2\" fill=\"" << colors[m.train.y[i] % 6]
      << "\"/>\n";
  }
  s << "</g>\n</svg>\n";
  return s.str();
}

std::string provenance_comments(const json& provenance) {
  std::ostringstream s;
  for (auto it = provenance.begin(); it != provenance.end(); ++it) {
    const std::string v = it.value().is_string() ? it.value().get<std::string>() : it.value().dump();
    if (v.find('\n') == std::string::npos) {
      s << "# " << it.key() << ": " << v << "\n";
      continue;
    }
    // multi-line values (the config block) go one line per comment
    s << "# " << it.key() << ":\n";
    std::istringstream lines(v);
    std::string line;
    while (std::getline(lines, line)) s << "#   " << line << "\n";
  }
  return s.str();
}

}  // namespace pcd
