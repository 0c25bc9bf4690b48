#pragma once

// Minimum dominating sets of proximity catch digraphs: greedy, exact per
// Delaunay cell and outer simplex, composite, and a brute-force oracle.

#include <optional>
#include <vector>

#include "pcd/proximity.hpp"

namespace pcd {

enum class Provenance { InnerExact, OuterExact, OuterGreedy };

const char* to_string(Provenance p);

struct Prototype {
  int index = -1;      // into the target point set
  Provenance provenance = Provenance::InnerExact;
  int component = -1;  // cell or outer-simplex index; -1 for CCCD prototypes
  ProximityRegion region;
};

struct PrototypeSet {
  std::vector<Prototype> items;
  std::vector<int> cell_gamma;   // per Delaunay cell
  std::vector<int> outer_gamma;  // per outer simplex (standard covers only)

  std::size_t size() const { return items.size(); }
  std::vector<int> indices() const;
};

/// Closed-neighborhood domination check.
bool is_dominating(const Digraph& g, const std::vector<int>& set);

/// Repeatedly takes the residual vertex whose closed out-neighborhood covers
/// the most residual vertices; ties to the lowest index.
std::vector<int> greedy_mds(const Digraph& g);

/// Exhaustive search by increasing cardinality, lexicographic within a size.
/// Throws TooLarge above 25 vertices.
std::vector<int> brute_force_mds(const Digraph& g);

/// Exact MDS of the PE-PCD on the targets of one cell, given their barycentric
/// coordinates. Returns positions into `w`.
std::vector<int> exact_mds_cell(const std::vector<BaryCoords>& w, double r, double tol = kDefaultTol);

PrototypeSet exact_mds_hull(const PointSet& targets, const Tessellation& tess, const TargetLayout& layout, double r,
                            double tol = kDefaultTol);
PrototypeSet exact_mds_hull(const PointSet& targets, const Tessellation& tess, double r, double tol = kDefaultTol);

/// Exact in-hull part plus, per non-empty outer simplex, the target farthest
/// from the facet.
PrototypeSet standard_mds(const PointSet& targets, const Tessellation& tess, const TargetLayout& layout, double r,
                          double tol = kDefaultTol);
PrototypeSet standard_mds(const PointSet& targets, const Tessellation& tess, double r, double tol = kDefaultTol);

/// Exact in-hull part plus a greedy CCCD cover of the targets outside the hull.
PrototypeSet composite_mds(const PointSet& targets, const PointSet& nontargets, const Tessellation& tess,
                           const TargetLayout& layout, double r, double theta, double tol = kDefaultTol);
PrototypeSet composite_mds(const PointSet& targets, const PointSet& nontargets, const Tessellation& tess, double r,
                           double theta, double tol = kDefaultTol);

/// Greedy CCCD cover of all targets.
PrototypeSet spherical_mds(const PointSet& targets, const PointSet& nontargets, double theta);

struct DominationStats {
  std::vector<int> cell_gamma;
  std::vector<int> outer_gamma;
  int total = 0;
  int n_targets = 0;
  std::optional<double> reduction;  // 1 - total / n_targets; empty when no targets
};

DominationStats domination_statistics(const PrototypeSet& set, int n_targets);

}  // namespace pcd
