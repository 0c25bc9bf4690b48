#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "pcd/domination.hpp"

using namespace pcd;

namespace {

Point pt(std::initializer_list<double> v) {
  Point p(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

PointSet cloud(int n, int d, std::uint64_t seed, double lo = 0, double hi = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  PointSet pts(n, Point(d));
  for (auto& p : pts)
    for (int k = 0; k < d; ++k) p[k] = u(rng);
  return pts;
}

Digraph from_edges(int n, const std::vector<std::pair<int, int>>& arcs) {
  Digraph g;
  g.out.assign(n, {});
  for (auto [a, b] : arcs) g.out[a].push_back(b);
  for (auto& o : g.out) std::sort(o.begin(), o.end());
  return g;
}

Digraph induced(const Digraph& g, const std::vector<int>& verts) {
  Digraph s;
  s.out.assign(verts.size(), {});
  for (std::size_t a = 0; a < verts.size(); ++a)
    for (std::size_t b = 0; b < verts.size(); ++b)
      if (a != b && g.has_arc(verts[a], verts[b])) s.out[a].push_back(static_cast<int>(b));
  return s;
}

// Independent minimum by plain recursion over include/exclude choices.
int min_dom_size(const Digraph& g) {
  const int n = g.size();
  int best = n;
  std::vector<int> cover(n, 0);
  std::function<void(int, int)> rec = [&](int v, int used) {
    if (used >= best) return;
    int first = -1;
    for (int i = 0; i < n; ++i)
      if (!cover[i]) {
        first = i;
        break;
      }
    if (first < 0) {
      best = used;
      return;
    }
    // some dominator of `first` must be chosen: itself or an in-neighbor
    for (int u = 0; u < n; ++u) {
      if (u != first && !g.has_arc(u, first)) continue;
      std::vector<int> touched;
      auto mark = [&](int w) {
        if (!cover[w]) {
          cover[w] = 1;
          touched.push_back(w);
        }
      };
      mark(u);
      for (int w : g.out[u]) mark(w);
      rec(v, used + 1);
      for (int w : touched) cover[w] = 0;
    }
  };
  rec(0, 0);
  return best;
}

}  // namespace

TEST_CASE("small digraphs") {
  SUBCASE("star") {
    Digraph g = from_edges(6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
    CHECK(greedy_mds(g) == std::vector<int>{0});
    CHECK(brute_force_mds(g) == std::vector<int>{0});
  }
  SUBCASE("arcless") {
    Digraph g = from_edges(4, {});
    const std::vector<int> all{0, 1, 2, 3};
    CHECK(greedy_mds(g) == all);
    CHECK(brute_force_mds(g) == all);
  }
  SUBCASE("mutual 5-cycle") {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < 5; ++i) {
      e.push_back({i, (i + 1) % 5});
      e.push_back({(i + 1) % 5, i});
    }
    Digraph g = from_edges(5, e);
    auto s = brute_force_mds(g);
    CHECK(s.size() == 2);
    CHECK(is_dominating(g, s));
    CHECK(min_dom_size(g) == 2);
    CHECK_FALSE(is_dominating(g, {0}));
  }
  SUBCASE("complete") {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j)
        if (i != j) e.push_back({i, j});
    CHECK(brute_force_mds(from_edges(5, e)) == std::vector<int>{0});
  }
  SUBCASE("too large") {
    CHECK_THROWS_AS(brute_force_mds(from_edges(26, {})), Error);
  }
}

TEST_CASE("greedy stays within the logarithmic bound") {
  std::mt19937_64 rng(9);
  std::bernoulli_distribution coin(0.15);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 6 + rep % 12;
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && coin(rng)) e.push_back({i, j});
    Digraph g = from_edges(n, e);
    auto gr = greedy_mds(g);
    auto bf = brute_force_mds(g);
    CHECK(is_dominating(g, gr));
    CHECK(is_dominating(g, bf));
    CHECK(static_cast<int>(bf.size()) == min_dom_size(g));
    CHECK(bf.size() <= gr.size());
    CHECK(gr.size() <= (1.0 + std::log(n)) * bf.size() + 1e-9);
  }
}

TEST_CASE("exact mds in a single cell") {
  Simplex s(PointSet{pt({0, 0}), pt({1, 0}), pt({0, 1})});
  auto bary = [](double a, double b) {
    BaryCoords w;
    w.w = Eigen::Vector3d(a, b, 1 - a - b);
    return w;
  };
  SUBCASE("empty") { CHECK(exact_mds_cell({}, 2.0).empty()); }
  SUBCASE("single") { CHECK(exact_mds_cell({bary(0.2, 0.5)}, 2.0) == std::vector<int>{0}); }
  SUBCASE("one vertex region: the extremum covers everyone") {
    std::vector<BaryCoords> w{bary(0.8, 0.1), bary(0.7, 0.2), bary(0.6, 0.3), bary(0.9, 0.05)};
    CHECK(exact_mds_cell(w, 1.5) == std::vector<int>{2});
  }
  SUBCASE("three near-face points, r close to 1") {
    std::vector<BaryCoords> w{bary(0.48, 0.47), bary(0.05, 0.48), bary(0.47, 0.05)};
    // each sits in a different vertex region and nobody reaches the others
    CHECK(exact_mds_cell(w, 1.001).size() == 3);
  }
}

TEST_CASE("exact, standard and composite against brute force per component") {
  int checked = 0;
  for (int d = 2; d <= 3; ++d) {
    for (int rep = 0; rep < 15; ++rep) {
      const std::uint64_t seed = 1000 * d + rep;
      PointSet non = cloud(5 + d, d, seed);
      PointSet targets = cloud(30, d, seed + 1, -0.2, 1.2);
      Tessellation t = Tessellation::build(non);
      TargetLayout lay = layout_targets(t, targets);
      for (double r : {1.5, 2.0, 3.0}) {
        Digraph g = build_pe_pcd(targets, t, lay, r);
        PrototypeSet exact = exact_mds_hull(targets, t, lay, r);
        PrototypeSet stdm = standard_mds(targets, t, lay, r);
        int inner_opt = 0, outer_opt = 0;
        for (std::size_t c = 0; c < lay.by_cell.size(); ++c) {
          if (lay.by_cell[c].size() > 25) continue;
          const int opt = static_cast<int>(brute_force_mds(induced(g, lay.by_cell[c])).size());
          CHECK(exact.cell_gamma[c] == opt);
          CHECK(opt <= d + 1);
          inner_opt += opt;
          ++checked;
        }
        for (std::size_t l = 0; l < lay.by_outer.size(); ++l) {
          if (lay.by_outer[l].empty()) continue;
          CHECK(brute_force_mds(induced(g, lay.by_outer[l])).size() == 1);
          CHECK(stdm.outer_gamma[l] == 1);
          ++outer_opt;
        }
        CHECK(static_cast<int>(exact.size()) == inner_opt);
        CHECK(static_cast<int>(stdm.size()) == inner_opt + outer_opt);
        CHECK(is_dominating(g, stdm.indices()));

        PrototypeSet comp = composite_mds(targets, non, t, lay, r, 1.0);
        int inner_in_comp = 0;
        for (const auto& p : comp.items) {
          if (p.provenance == Provenance::InnerExact) {
            ++inner_in_comp;
          } else {
            CHECK(std::holds_alternative<BallRegion>(p.region));
          }
        }
        CHECK(inner_in_comp == inner_opt);
        // every target outside the hull lies in some ball
        for (std::size_t i = 0; i < targets.size(); ++i) {
          if (lay.loc[i].in_hull()) continue;
          bool hit = false;
          for (const auto& p : comp.items)
            if (std::holds_alternative<BallRegion>(p.region) && region_contains(&t, p.region, targets[i])) hit = true;
          CHECK(hit);
        }
      }
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("outer simplex: farthest point is the single prototype") {
  const PointSet non{pt({0, 0}), pt({1, 0}), pt({0, 1})};
  Tessellation t = Tessellation::build(non);
  const OuterSimplex& o = t.outer()[0];
  const Point& cm = t.hull_center();
  PointSet targets;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int i = 0; i < 12; ++i) {
    Eigen::VectorXd c(2);
    c << u(rng) + 0.6, u(rng) + 0.6;
    targets.push_back(o.from_cone(c));
  }
  PrototypeSet s = standard_mds(targets, t, 3.0);
  REQUIRE(s.size() == 1);
  int far = 0;
  for (int i = 1; i < 12; ++i)
    if (std::abs(o.facet_plane().signed_distance(targets[i])) > std::abs(o.facet_plane().signed_distance(targets[far])))
      far = i;
  CHECK(s.items[0].index == far);
  CHECK(s.items[0].provenance == Provenance::OuterExact);
  for (const auto& z : targets) CHECK(region_contains(&t, s.items[0].region, z));
  (void)cm;
}

TEST_CASE("additivity over components") {
  const PointSet non{pt({0, 0}), pt({1, 0}), pt({0, 1})};
  Tessellation t = Tessellation::build(non);
  PointSet targets{pt({0.2, 0.2})};
  for (int l = 0; l < 2; ++l) {
    const OuterSimplex& o = t.outer()[l];
    Eigen::VectorXd c(2);
    c << 0.8, 0.7;
    targets.push_back(o.from_cone(c));
  }
  PrototypeSet s = standard_mds(targets, t, 2.0);
  CHECK(s.size() == 3);
  PrototypeSet none = exact_mds_hull(PointSet{targets[1], targets[2]}, t, 2.0);
  CHECK(none.size() == 0);
}

TEST_CASE("domination statistics") {
  DominationStats empty = domination_statistics(PrototypeSet{}, 0);
  CHECK_FALSE(empty.reduction.has_value());
  PrototypeSet s;
  s.items.resize(3);
  DominationStats st = domination_statistics(s, 12);
  CHECK(st.total == 3);
  CHECK(*st.reduction == doctest::Approx(0.75));
}

TEST_CASE("spherical mds covers all targets") {
  PointSet targets = cloud(40, 2, 77);
  PointSet non = cloud(40, 2, 78, 0.5, 1.5);
  PrototypeSet s = spherical_mds(targets, non, 1.0);
  Cccd c = build_cccd(targets, non, 1.0);
  CHECK(is_dominating(c.graph, s.indices()));
  for (const auto& p : s.items)
    for (const auto& y : non) CHECK_FALSE(region_contains(nullptr, p.region, y));
}
