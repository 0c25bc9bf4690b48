#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "pcd/geometry.hpp"

using namespace pcd;

namespace {

Point pt(std::initializer_list<double> v) {
  Point p(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

PointSet uniform_cloud(int n, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  PointSet pts(n, Point(d));
  for (auto& p : pts)
    for (int k = 0; k < d; ++k) p[k] = u(rng);
  return pts;
}

// Andrew's monotone chain area, independent of the tessellation.
double hull_area_2d(PointSet pts) {
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
    return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
  });
  auto cross = [](const Point& o, const Point& a, const Point& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  std::vector<Point> h(2 * pts.size());
  size_t k = 0;
  for (size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  double a = 0;
  for (size_t i = 0; i < h.size(); ++i) {
    const Point& p = h[i];
    const Point& q = h[(i + 1) % h.size()];
    a += p[0] * q[1] - q[0] * p[1];
  }
  return std::abs(a) / 2;
}

void check_valid(const Tessellation& t, double tol = 1e-9) {
  const auto& pts = t.points();
  double vol = 0;
  for (const auto& c : t.cells()) {
    vol += c.volume();
    std::set<int> own(c.vertex_ids().begin(), c.vertex_ids().end());
    for (int p = 0; p < static_cast<int>(pts.size()); ++p) {
      if (own.count(p)) continue;
      // duplicates of a vertex sit on the sphere; skip exact copies
      CHECK((pts[p] - c.circumcenter()).norm() >= c.circumradius() * (1 - 1e-7) - tol);
    }
  }
  CHECK(vol == doctest::Approx(t.hull_volume()).epsilon(1e-9));
  for (const auto& o : t.outer()) {
    for (const auto& p : pts) CHECK(o.facet_plane().signed_distance(p) <= 1e-9);
  }
  if (!t.cells().empty()) CHECK(static_cast<int>(t.outer().size()) >= t.dim() + 1);
}

PointSet read_iris_columns(int a, int b) {
  std::ifstream in(std::string(PCD_TEST_DATA_DIR) + "/iris.csv");
  std::string line;
  std::getline(in, line);
  PointSet out;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    for (int i = 0; i < 4 && std::getline(ss, cell, ','); ++i) row.push_back(std::stod(cell));
    out.push_back(pt({row[a], row[b]}));
  }
  return out;
}

}  // namespace

TEST_CASE("single triangle") {
  auto t = Tessellation::build({pt({0, 0}), pt({1, 0}), pt({0, 1})});
  CHECK(t.cells().size() == 1);
  CHECK(t.outer().size() == 3);
  check_valid(t);
}

TEST_CASE("point inside a triangle splits it in three") {
  auto t = Tessellation::build({pt({0, 0}), pt({4, 0}), pt({0, 4}), pt({1, 1})});
  CHECK(t.cells().size() == 3);
  CHECK(t.outer().size() == 3);
  // empty circumcircle by direct computation for every triangle of the four
  check_valid(t);
  CHECK(t.hull_vertex_ids().size() == 3);
  CHECK((t.hull_center() - pt({4.0 / 3, 4.0 / 3})).norm() < 1e-12);
}

TEST_CASE("hexagonal hull gives six outer simplices") {
  PointSet pts;
  for (int k = 0; k < 6; ++k) {
    double a = k * M_PI / 3 + 0.1;
    pts.push_back(pt({std::cos(a), std::sin(a)}));
  }
  pts.push_back(pt({0.1, -0.05}));
  auto t = Tessellation::build(pts);
  CHECK(t.outer().size() == 6);
  CHECK(t.cells().size() == 6);
  check_valid(t);
}

TEST_CASE("input errors") {
  auto code_of = [](auto f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::InvalidArgument;
  };
  CHECK(code_of([] { Tessellation::build({pt({0, 0}), pt({1, 0})}); }) == Errc::InsufficientPoints);
  CHECK(code_of([] { Tessellation::build({pt({0, 0}), pt({1, 1}), pt({2, 2}), pt({3, 3})}); }) ==
        Errc::DegenerateInput);
  CHECK(code_of([] { Tessellation::build(uniform_cloud(20, 9, 1)); }) == Errc::DimensionTooLarge);
  CHECK(code_of([] { Tessellation::build({pt({0, 0}), pt({1, 0}), pt({0, NAN})}); }) ==
        Errc::InvalidArgument);
}

TEST_CASE("random clouds d=1..5") {
  for (int d = 1; d <= 5; ++d) {
    int n = d <= 3 ? 200 : (d == 4 ? 120 : 60);
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      auto t = Tessellation::build(uniform_cloud(n, d, seed * 100 + d));
      CAPTURE(d);
      CAPTURE(seed);
      check_valid(t);
      if (d == 2) CHECK(t.hull_volume() == doctest::Approx(hull_area_2d(t.points())));
    }
  }
}

TEST_CASE("cospherical grids") {
  PointSet g2;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) g2.push_back(pt({double(i), double(j)}));
  auto t2 = Tessellation::build(g2);
  check_valid(t2);
  CHECK(t2.cells().size() == 32);
  CHECK(t2.hull_volume() == doctest::Approx(16.0));
  CHECK(t2.outer().size() == 16);

  PointSet g3;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) g3.push_back(pt({double(i), double(j), double(k)}));
  auto t3 = Tessellation::build(g3);
  check_valid(t3);
  CHECK(t3.hull_volume() == doctest::Approx(8.0));

  PointSet g4;
  for (int m = 0; m < 16; ++m) g4.push_back(pt({double(m & 1), double((m >> 1) & 1), double((m >> 2) & 1), double((m >> 3) & 1)}));
  auto t4 = Tessellation::build(g4);
  check_valid(t4);
  CHECK(t4.hull_volume() == doctest::Approx(1.0));
}

TEST_CASE("iris measurements with ties and duplicates") {
  auto pts = read_iris_columns(0, 2);
  auto t = Tessellation::build(pts);
  check_valid(t);
  CHECK(t.hull_volume() == doctest::Approx(hull_area_2d(pts)));
}

TEST_CASE("build is deterministic and seed-independent in volume") {
  auto pts = uniform_cloud(150, 3, 9);
  auto a = Tessellation::build(pts);
  auto b = Tessellation::build(pts);
  REQUIRE(a.cells().size() == b.cells().size());
  for (size_t i = 0; i < a.cells().size(); ++i) CHECK(a.cells()[i].vertex_ids() == b.cells()[i].vertex_ids());
  auto c = Tessellation::build(pts, DelaunayOptions{42});
  CHECK(c.hull_volume() == doctest::Approx(a.hull_volume()));
  // generic input: Delaunay is unique
  CHECK(c.cells().size() == a.cells().size());
}

TEST_CASE("from_parts round trip") {
  auto a = Tessellation::build(uniform_cloud(40, 2, 4));
  std::vector<std::vector<int>> cells, facets;
  for (const auto& c : a.cells()) cells.push_back(c.vertex_ids());
  for (const auto& o : a.outer()) facets.push_back(o.facet_ids());
  auto b = Tessellation::from_parts(a.points(), cells, facets);
  CHECK(b.cells().size() == a.cells().size());
  CHECK((b.hull_center() - a.hull_center()).norm() == 0.0);
  for (size_t c = 0; c < a.cells().size(); ++c)
    for (int k = 0; k < 3; ++k) CHECK(a.neighbor(int(c), k) == b.neighbor(int(c), k));
}

TEST_CASE("locate") {
  auto t = Tessellation::build(uniform_cloud(60, 2, 5));
  auto loc = t.locate(t.cells()[0].centroid());
  CHECK(loc.kind == Location::Kind::InsideCell);
  CHECK(loc.index == 0);

  const auto& o = t.outer()[2];
  Point far = o.hull_center() + 5.0 * (0.5 * (o.facet_points()[0] + o.facet_points()[1]) - o.hull_center());
  loc = t.locate(far);
  CHECK(loc.kind == Location::Kind::InOuter);
  CHECK(loc.index == 2);

  // point on an interior shared edge goes to the lower cell index
  bool tested = false;
  for (int c = 0; c < int(t.cells().size()) && !tested; ++c) {
    for (int k = 0; k < 3; ++k) {
      int nb = t.neighbor(c, k);
      if (nb < 0) continue;
      const auto& ids = t.cells()[c].vertex_ids();
      Point mid = Point::Zero(2);
      for (int j = 0; j < 3; ++j)
        if (j != k) mid += 0.5 * t.points()[ids[j]];
      loc = t.locate(mid);
      CHECK(loc.kind == Location::Kind::InsideCell);
      CHECK(loc.index == std::min(c, nb));
      tested = true;
      break;
    }
  }
  CHECK(tested);

  Point bad(2);
  bad << NAN, 0;
  CHECK(t.locate(bad).kind == Location::Kind::Degenerate);
}

TEST_CASE("locate is total and memberships exclusive") {
  for (int d = 2; d <= 4; ++d) {
    auto t = Tessellation::build(uniform_cloud(d == 4 ? 50 : 80, d, 77 + d));
    std::mt19937_64 rng(d);
    std::uniform_real_distribution<double> u(-1, 2);  // 3x the unit box
    for (int rep = 0; rep < 2000; ++rep) {
      Point x(d);
      for (int k = 0; k < d; ++k) x[k] = u(rng);
      auto loc = t.locate(x);
      REQUIRE(loc.kind != Location::Kind::Degenerate);
      int in_cells = 0, in_outer = 0;
      bool on_edge = false;
      for (const auto& c : t.cells()) {
        double m = c.barycentric(x).min();
        if (m > 1e-7) ++in_cells;
        if (std::abs(m) <= 1e-7) on_edge = true;
      }
      for (const auto& o : t.outer()) {
        auto c = o.cone_coordinates(x);
        double m = std::min(c.c.minCoeff(), c.sum() - 1);
        if (m > 1e-7) ++in_outer;
        if (std::abs(m) <= 1e-7) on_edge = true;
      }
      if (on_edge) continue;
      CHECK(in_cells + in_outer == 1);
      if (loc.kind == Location::Kind::InsideCell) {
        CHECK(in_cells == 1);
        CHECK(t.cells()[loc.index].barycentric(x).min() > 0);
      } else {
        CHECK(in_outer == 1);
        CHECK(OuterSimplex::contains(t.outer()[loc.index].cone_coordinates(x), 0));
      }
    }
  }
}

TEST_CASE("outer simplex is the facet extruded along the rays (d=2)") {
  auto t = Tessellation::build(uniform_cloud(30, 2, 8));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (const auto& o : t.outer()) {
    // a point on the segment p1 p2 pushed along the ray family
    for (int rep = 0; rep < 20; ++rep) {
      double a = u(rng), s = 1 + 3 * u(rng);
      Point base = a * o.facet_points()[0] + (1 - a) * o.facet_points()[1];
      Point x = o.hull_center() + s * (base - o.hull_center());
      auto c = o.cone_coordinates(x);
      CHECK(OuterSimplex::contains(c));
      CHECK(c.sum() == doctest::Approx(s));
    }
  }
}
