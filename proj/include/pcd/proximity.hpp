#pragma once

// Proximity regions (proportional-edge inside Delaunay cells and outer
// simplices, balls for CCCDs) and the catch digraphs they induce.

#include <variant>
#include <vector>

#include "pcd/geometry.hpp"

namespace pcd {

/// Slice {z in cell : w_vertex(z) >= tau} of a Delaunay cell.
struct InnerPERegion {
  int cell = -1;
  int vertex = -1;
  double tau = 0.0;
  double r = 1.0;
  Point anchor;
};

/// {z in outer simplex : sum c(z) <= 1 + r (level - 1)}.
struct OuterPERegion {
  int outer = -1;
  double level = 1.0;
  double r = 1.0;
  Point anchor;

  double cap() const { return 1.0 + r * (level - 1.0); }
};

/// Open ball; membership is strict so the nearest non-target stays outside.
struct BallRegion {
  Point center;
  double radius = 0.0;
  double theta = 1.0;
};

using ProximityRegion = std::variant<std::monostate, InnerPERegion, OuterPERegion, BallRegion>;

/// Throws OutsideCell if x is outside the cell by more than tol.
InnerPERegion pe_region_inner(const Simplex& cell, int cell_index, const Point& x, double r,
                              double tol = kDefaultTol);
bool pe_contains_inner(const InnerPERegion& region, const BaryCoords& wz, double tol = kDefaultTol);

/// Throws OutsideOuterSimplex if the cone test fails.
OuterPERegion pe_region_outer(const OuterSimplex& outer, int outer_index, const Point& x, double r,
                              double tol = kDefaultTol);
bool pe_contains_outer(const OuterPERegion& region, const ConeCoords& cz, double tol = kDefaultTol);

/// theta == 0 is treated as machine epsilon. Throws EmptyNonTarget.
double cccd_radius(const Point& x, const PointSet& targets, const PointSet& nontargets, double theta);

/// Geometric membership of z (no location step needed).
bool region_contains(const Tessellation* tess, const ProximityRegion& region, const Point& z,
                     double tol = kDefaultTol);

/// Convex distance of z from the region's designated center: < 1 inside.
double region_distance(const Tessellation* tess, const ProximityRegion& region, const Point& z,
                       double tol = kDefaultTol);

/// Region expressed as explicit geometry: vertex list for simplices and
/// outer polytopes, empty for balls.
PointSet region_vertices(const Tessellation& tess, const ProximityRegion& region);

/// Out-neighbor lists; self-loops are implicit and not stored.
struct Digraph {
  std::vector<std::vector<int>> out;

  int size() const { return static_cast<int>(out.size()); }
  bool has_arc(int u, int v) const;
  std::size_t arc_count() const;
};

/// Where each target point sits in a tessellation.
struct TargetLayout {
  std::vector<Location> loc;
  std::vector<std::vector<int>> by_cell;   // target indices per cell, ascending
  std::vector<std::vector<int>> by_outer;  // target indices per outer simplex

  int cell_of(int t) const;   // -1 if outside the hull
  int outer_of(int t) const;  // -1 if inside the hull
};

TargetLayout layout_targets(const Tessellation& tess, const PointSet& targets, double tol = kDefaultTol);

/// PE region of target t given its location.
ProximityRegion pe_region(const Tessellation& tess, const TargetLayout& layout, const PointSet& targets,
                          int t, double r, double tol = kDefaultTol);

Digraph build_pe_pcd(const PointSet& targets, const Tessellation& tess, double r, double tol = kDefaultTol);
Digraph build_pe_pcd(const PointSet& targets, const Tessellation& tess, const TargetLayout& layout,
                     double r, double tol = kDefaultTol);

struct Cccd {
  Digraph graph;
  std::vector<double> radius;
};

Cccd build_cccd(const PointSet& targets, const PointSet& nontargets, double theta);

}  // namespace pcd
