#include "pcd/proximity.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>

namespace pcd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Scale of the homothety from the region vertex that produces the region simplex.
double inner_scale(const InnerPERegion& g) { return std::min(1.0, 1.0 - g.tau); }

}  // namespace

InnerPERegion pe_region_inner(const Simplex& cell, int cell_index, const Point& x, double r, double tol) {
  if (!(r >= 1.0)) throw Error(Errc::InvalidArgument, "expansion parameter r must be >= 1");
  BaryCoords w = cell.barycentric(x);
  if (w.min() < -tol) throw Error(Errc::OutsideCell, "point is outside the cell");
  InnerPERegion g;
  g.cell = cell_index;
  g.vertex = vertex_region_centroid(w, tol);
  g.tau = 1.0 - r * (1.0 - w[g.vertex]);
  g.r = r;
  g.anchor = x;
  return g;
}

bool pe_contains_inner(const InnerPERegion& region, const BaryCoords& wz, double tol) {
  return wz[region.vertex] >= region.tau - tol;
}

OuterPERegion pe_region_outer(const OuterSimplex& outer, int outer_index, const Point& x, double r, double tol) {
  if (!(r >= 1.0)) throw Error(Errc::InvalidArgument, "expansion parameter r must be >= 1");
  ConeCoords c = outer.cone_coordinates(x);
  if (!OuterSimplex::contains(c, tol)) throw Error(Errc::OutsideOuterSimplex, "point is outside the outer simplex");
  OuterPERegion g;
  g.outer = outer_index;
  g.level = std::max(1.0, c.sum());
  g.r = r;
  g.anchor = x;
  return g;
}

bool pe_contains_outer(const OuterPERegion& region, const ConeCoords& cz, double tol) {
  return OuterSimplex::contains(cz, tol) && cz.sum() <= region.cap() + tol;
}

double cccd_radius(const Point& x, const PointSet& targets, const PointSet& nontargets, double theta) {
  if (nontargets.empty()) throw Error(Errc::EmptyNonTarget, "no non-target points");
  if (!(theta >= 0.0 && theta <= 1.0)) throw Error(Errc::InvalidArgument, "theta must lie in [0, 1]");
  if (theta == 0.0) theta = DBL_EPSILON;
  double du = kInf;
  for (const auto& p : nontargets) du = std::min(du, (p - x).norm());
  double dl = 0.0;
  for (const auto& p : targets) {
    const double d = (p - x).norm();
    if (d < du) dl = std::max(dl, d);
  }
  return (1.0 - theta) * dl + theta * du;
}

bool region_contains(const Tessellation* tess, const ProximityRegion& region, const Point& z, double tol) {
  return std::visit(
      overloaded{
          [](const std::monostate&) { return false; },
          [&](const InnerPERegion& g) {
            BaryCoords w = tess->cells()[g.cell].barycentric(z);
            return w.min() >= -tol && pe_contains_inner(g, w, tol);
          },
          [&](const OuterPERegion& g) {
            return pe_contains_outer(g, tess->outer()[g.outer].cone_coordinates(z), tol);
          },
          [&](const BallRegion& b) { return (z - b.center).norm() < b.radius; },
      },
      region);
}

double region_distance(const Tessellation* tess, const ProximityRegion& region, const Point& z, double tol) {
  return std::visit(
      overloaded{
          [](const std::monostate&) { return kInf; },
          [&](const InnerPERegion& g) {
            const Simplex& cell = tess->cells()[g.cell];
            BaryCoords w = cell.barycentric(z);
            const double lam = inner_scale(g);
            if (lam <= 1e-15) {
              // region collapsed onto its vertex
              return (z - cell.vertex(g.vertex)).norm() <= tol ? 0.0 : kInf;
            }
            Eigen::VectorXd wr = w.w / lam;
            wr[g.vertex] = 1.0 - (1.0 - w[g.vertex]) / lam;
            return simplex_convex_distance(BaryCoords{wr});
          },
          [&](const OuterPERegion& g) {
            const OuterSimplex& o = tess->outer()[g.outer];
            const ConeCoords c = o.cone_coordinates(z);
            const double cap = g.cap();
            const int d = o.dim();
            if (cap - 1.0 <= 1e-12) return pe_contains_outer(g, c, tol) ? 0.0 : kInf;
            // Ratios along a line survive affine maps, so work in cone coordinates:
            // c >= 0, 1 <= sum c <= cap, centered at the mean of the 2d vertices.
            HalfSpacePolytope poly;
            poly.a = Eigen::MatrixXd::Zero(d + 2, d);
            poly.b = Eigen::VectorXd::Zero(d + 2);
            poly.a.topRows(d) = -Eigen::MatrixXd::Identity(d, d);
            poly.a.row(d).setConstant(-1.0);
            poly.b[d] = -1.0;
            poly.a.row(d + 1).setConstant(1.0);
            poly.b[d + 1] = cap;
            Eigen::VectorXd center = Eigen::VectorXd::Constant(d, (1.0 + cap) / (2.0 * d));
            return polytope_convex_distance(poly, center, c.c);
          },
          [&](const BallRegion& b) { return (z - b.center).norm() / b.radius; },
      },
      region);
}

PointSet region_vertices(const Tessellation& tess, const ProximityRegion& region) {
  PointSet out;
  if (const auto* g = std::get_if<InnerPERegion>(&region)) {
    const Simplex& cell = tess.cells()[g->cell];
    const Point& apex = cell.vertex(g->vertex);
    const double lam = inner_scale(*g);
    for (int j = 0; j <= cell.dim(); ++j) {
      out.push_back(j == g->vertex ? apex : Point(apex + lam * (cell.vertex(j) - apex)));
    }
  } else if (const auto* g = std::get_if<OuterPERegion>(&region)) {
    const OuterSimplex& o = tess.outer()[g->outer];
    for (const auto& p : o.facet_points()) out.push_back(p);
    for (const auto& p : o.facet_points()) out.push_back(o.hull_center() + g->cap() * (p - o.hull_center()));
  }
  return out;
}

bool Digraph::has_arc(int u, int v) const {
  const auto& nb = out[u];
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::size_t Digraph::arc_count() const {
  std::size_t n = 0;
  for (const auto& nb : out) n += nb.size();
  return n;
}

int TargetLayout::cell_of(int t) const { return loc[t].in_hull() ? loc[t].index : -1; }
int TargetLayout::outer_of(int t) const { return loc[t].in_outer() ? loc[t].index : -1; }

TargetLayout layout_targets(const Tessellation& tess, const PointSet& targets, double tol) {
  TargetLayout lay;
  lay.by_cell.resize(tess.cells().size());
  lay.by_outer.resize(tess.outer().size());
  lay.loc.reserve(targets.size());
  for (std::size_t t = 0; t < targets.size(); ++t) {
    Location loc = tess.locate(targets[t], tol);
    if (loc.kind == Location::Kind::Degenerate) {
      throw Error(Errc::InvalidArgument, "target point " + std::to_string(t) + " cannot be located");
    }
    if (loc.in_hull()) {
      lay.by_cell[loc.index].push_back(static_cast<int>(t));
    } else {
      lay.by_outer[loc.index].push_back(static_cast<int>(t));
    }
    lay.loc.push_back(std::move(loc));
  }
  return lay;
}

ProximityRegion pe_region(const Tessellation& tess, const TargetLayout& layout, const PointSet& targets, int t,
                          double r, double tol) {
  const Location& loc = layout.loc[t];
  if (loc.in_hull()) return pe_region_inner(tess.cells()[loc.index], loc.index, targets[t], r, tol);
  return pe_region_outer(tess.outer()[loc.index], loc.index, targets[t], r, tol);
}

Digraph build_pe_pcd(const PointSet& targets, const Tessellation& tess, double r, double tol) {
  return build_pe_pcd(targets, tess, layout_targets(tess, targets, tol), r, tol);
}

Digraph build_pe_pcd(const PointSet& targets, const Tessellation& tess, const TargetLayout& layout, double r,
                     double tol) {
  Digraph g;
  g.out.resize(targets.size());
  for (const auto& members : layout.by_cell) {
    for (int u : members) {
      const auto region = std::get<InnerPERegion>(pe_region(tess, layout, targets, u, r, tol));
      for (int v : members) {
        if (v != u && pe_contains_inner(region, BaryCoords{layout.loc[v].coords}, tol)) g.out[u].push_back(v);
      }
    }
  }
  for (const auto& members : layout.by_outer) {
    for (int u : members) {
      const auto region = std::get<OuterPERegion>(pe_region(tess, layout, targets, u, r, tol));
      for (int v : members) {
        if (v != u && pe_contains_outer(region, ConeCoords{layout.loc[v].coords}, tol)) g.out[u].push_back(v);
      }
    }
  }
  return g;
}

Cccd build_cccd(const PointSet& targets, const PointSet& nontargets, double theta) {
  Cccd c;
  const int n = static_cast<int>(targets.size());
  c.graph.out.resize(n);
  c.radius.resize(n);
  for (int u = 0; u < n; ++u) c.radius[u] = cccd_radius(targets[u], targets, nontargets, theta);
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      if (v != u && (targets[v] - targets[u]).norm() < c.radius[u]) c.graph.out[u].push_back(v);
    }
  }
  return c;
}

}  // namespace pcd
