#include "doctest.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "pcd/io.hpp"

using namespace pcd;

namespace {

LabeledTable parse(const std::string& text, CsvOptions o = {}) {
  std::istringstream in(text);
  return parse_csv(in, o, "mem.csv");
}

Errc code_of(const std::string& text, CsvOptions o = {}) {
  try {
    parse(text, o);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return Errc::InvalidArgument;
}

std::string message_of(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

Point pt(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

// Point in the convex hull of a small vertex list (2-d), inclusive with slack.
bool in_convex_2d(std::vector<Point> v, const Point& z, double tol) {
  std::sort(v.begin(), v.end(), [](const Point& a, const Point& b) { return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]); });
  auto cross = [](const Point& o, const Point& a, const Point& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  std::vector<Point> h(2 * v.size());
  int k = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], v[i]) <= 0) --k;
    h[k++] = v[i];
  }
  for (int i = static_cast<int>(v.size()) - 2, t = k + 1; i >= 0; --i) {
    while (k >= t && cross(h[k - 2], h[k - 1], v[i]) <= 0) --k;
    h[k++] = v[i];
  }
  h.resize(k - 1);
  for (std::size_t i = 0; i < h.size(); ++i) {
    const Point& a = h[i];
    const Point& b = h[(i + 1) % h.size()];
    if (cross(a, b, z) / (b - a).norm() < -tol) return false;
  }
  return true;
}

LabeledPoints two_uniforms(int n0, int n1, double shift, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  LabeledPoints lp;
  lp.n_classes = 2;
  for (int i = 0; i < n0 + n1; ++i) {
    const int y = i < n0 ? 0 : 1;
    lp.x.push_back(pt(u(rng) + y * shift, u(rng) + y * shift));
    lp.y.push_back(y);
  }
  return lp;
}

}  // namespace

TEST_CASE("iris file") {
  LabeledTable t = load_csv(std::string(PCD_TEST_DATA_DIR) + "/iris.csv", {});
  CHECK(t.x.size() == 150);
  CHECK(t.dim() == 4);
  CHECK(t.class_names == std::vector<std::string>{"setosa", "versicolor", "virginica"});
  CHECK(t.feature_names.size() == 4);
  CHECK(t.x[0][0] == doctest::Approx(5.1));
  LabeledPoints lp = t.points();
  CHECK(lp.n_classes == 3);
  CHECK(lp.class_counts() == std::vector<int>{50, 50, 50});
}

TEST_CASE("csv parsing") {
  SUBCASE("first-seen class order and row order") {
    LabeledTable t = parse("a,b,y\n1,2,dog\n3,4,cat\n5,6,dog\n");
    CHECK(t.class_names == std::vector<std::string>{"dog", "cat"});
    CHECK(t.y == std::vector<int>{0, 1, 0});
    CHECK(t.x[1][0] == 3.0);
  }
  SUBCASE("quoted fields") {
    LabeledTable t = parse("a,\"b,c\",y\n1,2,\"x, \"\"quoted\"\"\"\n");
    CHECK(t.feature_names[1] == "b,c");
    CHECK(t.class_names[0] == "x, \"quoted\"");
  }
  SUBCASE("label column by name or index, no header") {
    CsvOptions o;
    o.label_column = "y";
    LabeledTable t = parse("y,a,b\nk,1,2\n", o);
    CHECK(t.x[0][1] == 2.0);
    CsvOptions n;
    n.header = false;
    n.label_column = "0";
    LabeledTable u = parse("k,1,2\nm,3,4\n", n);
    CHECK(u.x.size() == 2);
    CHECK(u.class_names[1] == "m");
  }
  SUBCASE("unlabeled") {
    CsvOptions o;
    o.label_column = "none";
    LabeledTable t = parse("a,b\n1,2\n", o);
    CHECK(t.y.empty());
    CHECK(t.dim() == 2);
  }
  SUBCASE("closed class list") {
    CsvOptions o;
    o.classes = {"a", "b"};
    o.closed_classes = true;
    CHECK(parse("x,y\n1,b\n", o).y == std::vector<int>{1});
    CHECK(code_of("x,y\n1,c\n", o) == Errc::InvalidArgument);
  }
}

TEST_CASE("csv errors") {
  CHECK(code_of("") == Errc::ParseError);
  CHECK(code_of("a,b,y\n") == Errc::ParseError);
  CHECK(code_of("a,b,y\n1,2\n") == Errc::ParseError);
  CHECK(code_of("a,b,y\n1,\"2,k\n") == Errc::ParseError);
  CHECK(code_of("a,b,y\n1,two,k\n") == Errc::NonNumericFeature);
  CHECK(code_of("a,b,y\n1,nan,k\n") == Errc::NonNumericFeature);
  CHECK(code_of("a,b,y\n1,inf,k\n") == Errc::NonNumericFeature);
  CHECK(code_of("a,b,y\n1,2,\n") == Errc::MissingLabel);
  CsvOptions o;
  o.label_column = "species";
  CHECK(code_of("a,b,y\n1,2,k\n", o) == Errc::MissingLabel);
  // row-addressed messages
  const std::string msg = message_of("a,b,y\n1,2,k\n3,x,k\n");
  CHECK(msg.find("mem.csv") != std::string::npos);
  CHECK(msg.find("row 3, column 2") != std::string::npos);  // file line, header included
  CHECK_THROWS_AS(load_csv("/nonexistent/file.csv", {}), Error);
}

TEST_CASE("atomic write") {
  const auto dir = std::filesystem::temp_directory_path() / "pcd_io_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "out.txt").string();
  write_atomic(path, "first\n");
  write_atomic(path, "second\n");
  std::ifstream in(path);
  std::string s((std::istreambuf_iterator<char>(in)), {});
  CHECK(s == "second\n");
  int files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) files += e.is_regular_file();
  CHECK(files == 1);
  std::filesystem::remove_all(dir);
}

TEST_CASE("json round trips") {
  LabeledPoints lp = two_uniforms(60, 20, 0.3, 5);
  SUBCASE("tessellation") {
    Tessellation t = Tessellation::build(lp.class_points(0));
    Tessellation u = tessellation_from_json(json::parse(tessellation_to_json(t).dump()));
    REQUIRE(u.cells().size() == t.cells().size());
    REQUIRE(u.outer().size() == t.outer().size());
    for (std::size_t c = 0; c < t.cells().size(); ++c) CHECK(u.cells()[c].vertex_ids() == t.cells()[c].vertex_ids());
    CHECK(u.hull_volume() == doctest::Approx(t.hull_volume()));
  }
  SUBCASE("regions") {
    ProximityRegion ball = BallRegion{pt(0.25, 0.5), 0.125, 0.5};
    ProximityRegion b2 = region_from_json(json::parse(region_to_json(ball).dump()));
    CHECK(std::get<BallRegion>(b2).radius == 0.125);
    ProximityRegion inner = InnerPERegion{3, 1, 0.4, 2.0, pt(0.1, 0.2)};
    auto i2 = std::get<InnerPERegion>(region_from_json(region_to_json(inner)));
    CHECK(i2.cell == 3);
    CHECK(i2.vertex == 1);
    CHECK(i2.tau == 0.4);
    ProximityRegion outer = OuterPERegion{2, 1.5, 3.0, pt(2, 2)};
    auto o2 = std::get<OuterPERegion>(region_from_json(region_to_json(outer)));
    CHECK(o2.cap() == doctest::Approx(2.5));
  }
  SUBCASE("model predictions survive serialization") {
    for (CoverKind kind : {CoverKind::Standard, CoverKind::Composite, CoverKind::Spherical}) {
      TrainParams p;
      p.kind = kind;
      TrainedModel m = train_model(lp, p);
      m.class_names = {"a", "b"};
      TrainedModel back = model_from_json(json::parse(model_to_json(m).dump()));
      CHECK(back.class_names == m.class_names);
      CHECK(back.params.kind == kind);
      std::mt19937_64 rng(8);
      std::uniform_real_distribution<double> u(-0.3, 1.6);
      for (int i = 0; i < 200; ++i) {
        const Point z = pt(u(rng), u(rng));
        Prediction a = cover_classify(m, z), b = cover_classify(back, z);
        CHECK(a.label == b.label);
        CHECK(a.rho == b.rho);
        CHECK(cccd_classify(m, z) == cccd_classify(back, z));
      }
    }
  }
  SUBCASE("bad model") {
    CHECK_THROWS_AS(model_from_json(json{{"format", "other"}}), Error);
  }
}

namespace {

// Every training point sits in an exported region of its own class.
int uncovered_in_export(const TrainedModel& m) {
  json g = cover_geometry_json(m);
  int missing = 0;
  for (int c = 0; c < m.n_classes; ++c) {
    for (const auto& z : m.train.class_points(c)) {
      bool hit = false;
      for (const auto& reg : g[c]["regions"]) {
        if (reg["type"] == "ball") {
          const Point ctr = point_from_json(reg["center"]);
          hit = (z - ctr).norm() < reg["radius"].get<double>() + 1e-9;
        } else {
          std::vector<Point> v;
          for (const auto& q : reg["vertices"]) v.push_back(point_from_json(q));
          hit = in_convex_2d(v, z, 1e-9);
        }
        if (hit) break;
      }
      missing += !hit;
    }
  }
  return missing;
}

}  // namespace

TEST_CASE("exported geometry covers every training point of its class") {
  LabeledPoints lp = two_uniforms(100, 20, 0.5, 13);
  for (CoverKind kind : {CoverKind::Standard, CoverKind::Composite}) {
    TrainParams p;
    p.kind = kind;
    p.r = 2.0;
    TrainedModel m = train_model(lp, p);
    CHECK(cover_geometry_json(m).size() == 2);
    CHECK(uncovered_in_export(m) == 0);
    const std::string svg = cover_svg(m);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
  }
}

TEST_CASE("two-square file: standard cover polygons hold all 120 points") {
  LabeledTable t = load_csv(std::string(PCD_TEST_DATA_DIR) + "/two_squares.csv", {});
  REQUIRE(t.x.size() == 120);
  TrainParams p;
  p.r = 2.0;
  TrainedModel m = train_model(t.points(), p);
  CHECK(uncovered_in_export(m) == 0);
}

TEST_CASE("provenance comments") {
  json p;
  p["seed"] = 7;
  p["config"] = "a=1\nb=2\n";
  const std::string s = provenance_comments(p);
  CHECK(s == "# seed: 7\n# config:\n#   a=1\n#   b=2\n");
}
