#pragma once

// Points, simplices, Delaunay tessellations with outer simplices, and the
// coordinate systems (barycentric and cone) used to locate points in them.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pcd {

using Point = Eigen::VectorXd;
using PointSet = std::vector<Point>;

inline constexpr double kDefaultTol = 1e-9;
inline constexpr int kMaxDimension = 8;

enum class Errc {
  DegenerateSimplex,
  DegenerateCone,
  DegeneratePolytope,
  InsufficientPoints,
  DegenerateInput,
  CosphericalAmbiguity,
  DimensionTooLarge,
  OutsideSimplex,
  OutsideCell,
  OutsideOuterSimplex,
  EmptyNonTarget,
  EmptyClass,
  TooLarge,
  MissingClass,
  InvalidArgument,
  ParseError,
  MissingLabel,
  NonNumericFeature,
};

const char* to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

/// Barycentric coordinates w.r.t. a d-simplex; d+1 entries summing to 1.
struct BaryCoords {
  Eigen::VectorXd w;

  int size() const { return static_cast<int>(w.size()); }
  double operator[](int i) const { return w[i]; }
  double min() const { return w.minCoeff(); }
};

/// Coefficients of x - C_M in the ray basis {p_i - C_M} of an outer simplex.
struct ConeCoords {
  Eigen::VectorXd c;

  double operator[](int i) const { return c[i]; }
  double sum() const { return c.sum(); }
};

enum class PointClass { Interior, Boundary, Vertex, Outside };

/// A non-degenerate d-simplex. Caches the inverse of the edge matrix
/// A = [y_1 - y_0, ..., y_d - y_0] and the circumsphere.
class Simplex {
 public:
  /// Vertex ids index into `store`.
  Simplex(std::vector<int> vertex_ids, const PointSet& store);
  /// Free-standing simplex (ids are 0..d).
  explicit Simplex(const PointSet& vertices);

  int dim() const { return static_cast<int>(vertices_.size()) - 1; }
  const std::vector<int>& vertex_ids() const { return ids_; }
  const Point& vertex(int i) const { return vertices_[i]; }
  const PointSet& vertices() const { return vertices_; }

  BaryCoords barycentric(const Point& x) const;
  Point from_barycentric(const Eigen::VectorXd& w) const;
  Point centroid() const;

  const Point& circumcenter() const { return circumcenter_; }
  double circumradius() const { return circumradius_; }
  double volume() const { return volume_; }

 private:
  void init();

  std::vector<int> ids_;
  PointSet vertices_;
  Eigen::MatrixXd edge_inverse_;
  Point circumcenter_;
  double circumradius_ = 0.0;
  double volume_ = 0.0;
};

BaryCoords solve_barycentric(const Simplex& simplex, const Point& x);
PointClass classify_location(const BaryCoords& w, double tol = kDefaultTol);

/// Oriented hyperplane n.x = offset with unit normal n.
struct Hyperplane {
  Eigen::VectorXd normal;
  double offset = 0.0;

  double signed_distance(const Point& x) const { return normal.dot(x) - offset; }
};

/// Hyperplane through d affinely independent points in R^d. The normal's
/// sign is arbitrary; throws DegenerateSimplex when the points are dependent.
Hyperplane hyperplane_through(const PointSet& pts);

/// Unbounded region outside the hull, bounded by a hull facet and the rays
/// from the hull center through the facet's vertices.
class OuterSimplex {
 public:
  OuterSimplex(std::vector<int> facet_ids, const PointSet& store, const Point& hull_center);

  int dim() const { return static_cast<int>(ids_.size()); }
  const std::vector<int>& facet_ids() const { return ids_; }
  const PointSet& facet_points() const { return facet_points_; }
  /// Columns are the ray directions p_i - C_M.
  const Eigen::MatrixXd& rays() const { return rays_; }
  const Eigen::MatrixXd& cone_inverse() const { return cone_inverse_; }
  const Hyperplane& facet_plane() const { return plane_; }
  const Point& hull_center() const { return center_; }

  ConeCoords cone_coordinates(const Point& x) const;
  Point from_cone(const Eigen::VectorXd& c) const;
  /// All c_i >= -tol and sum(c) >= 1 - tol.
  static bool contains(const ConeCoords& c, double tol = kDefaultTol);

 private:
  std::vector<int> ids_;
  PointSet facet_points_;
  Point center_;
  Eigen::MatrixXd rays_;
  Eigen::MatrixXd cone_inverse_;
  Hyperplane plane_;
};

ConeCoords cone_coordinates(const OuterSimplex& outer, const Point& hull_center, const Point& x);

struct Location {
  enum class Kind { InsideCell, InOuter, OnHullBoundary, Degenerate };

  Kind kind = Kind::Degenerate;
  int index = -1;          // cell index or outer-simplex index
  Eigen::VectorXd coords;  // barycentric (cells) or cone (outer) coordinates

  bool in_hull() const { return kind == Kind::InsideCell || kind == Kind::OnHullBoundary; }
  bool in_outer() const { return kind == Kind::InOuter; }
};

struct DelaunayOptions {
  std::uint64_t seed = 0x5eed;
  /// Relative tolerance of the in-sphere and orientation predicates.
  double predicate_tol = 1e-11;
};

/// Delaunay tessellation of a point set together with its hull facets and
/// the outer simplices built around the mean of the hull boundary points.
/// Immutable once built.
class Tessellation {
 public:
  static Tessellation build(const PointSet& points, const DelaunayOptions& options = {});

  /// Rebuilds caches from an explicit cell/hull-facet list (deserialization).
  static Tessellation from_parts(PointSet points, std::vector<std::vector<int>> cells,
                                 std::vector<std::vector<int>> hull_facets);

  int dim() const { return dim_; }
  const PointSet& points() const { return points_; }
  const std::vector<Simplex>& cells() const { return cells_; }
  const std::vector<OuterSimplex>& outer() const { return outer_; }
  const Point& hull_center() const { return hull_center_; }
  const std::vector<int>& hull_vertex_ids() const { return hull_ids_; }

  /// Neighbor of cell c across the face opposite local vertex k:
  /// >= 0 is a cell index, otherwise -(outer index + 1).
  int neighbor(int cell, int k) const { return neighbors_[cell][k]; }

  Location locate(const Point& x, double tol = kDefaultTol) const;
  double hull_volume() const;

 private:
  Tessellation() = default;
  int scan_cells(const Point& x, double tol, Eigen::VectorXd* coords) const;

  int dim_ = 0;
  PointSet points_;
  std::vector<Simplex> cells_;
  std::vector<OuterSimplex> outer_;
  std::vector<std::vector<int>> neighbors_;
  std::vector<int> hull_ids_;
  Point hull_center_;
};

/// Index of the M-vertex region containing x: the i with
/// w_i > max_{j != i} m_i w_j / m_j, ties to the lowest index.
int vertex_region(const BaryCoords& m, const BaryCoords& w, double tol = kDefaultTol);
/// Centroid (uniform m) shortcut: argmax of w, lowest index on ties.
int vertex_region_centroid(const BaryCoords& w, double tol = kDefaultTol);

/// Convex distance to a simplex from its centroid, given z's barycentric
/// coordinates w.r.t. that simplex: 1 - (d+1) min_k w_k.
double simplex_convex_distance(const BaryCoords& w);

/// Bounded convex polytope {x : A x <= b}.
struct HalfSpacePolytope {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
};

/// Ratio |z - center| / |t - center| with t the exit point of the ray from
/// center through z. Throws DegeneratePolytope unless center is strictly inside.
double polytope_convex_distance(const HalfSpacePolytope& polytope, const Point& center,
                                const Point& z);

}  // namespace pcd
