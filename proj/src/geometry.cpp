#include "pcd/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace pcd {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::DegenerateSimplex: return "DegenerateSimplex";
    case Errc::DegenerateCone: return "DegenerateCone";
    case Errc::DegeneratePolytope: return "DegeneratePolytope";
    case Errc::InsufficientPoints: return "InsufficientPoints";
    case Errc::DegenerateInput: return "DegenerateInput";
    case Errc::CosphericalAmbiguity: return "CosphericalAmbiguity";
    case Errc::DimensionTooLarge: return "DimensionTooLarge";
    case Errc::OutsideSimplex: return "OutsideSimplex";
    case Errc::OutsideCell: return "OutsideCell";
    case Errc::OutsideOuterSimplex: return "OutsideOuterSimplex";
    case Errc::EmptyNonTarget: return "EmptyNonTarget";
    case Errc::EmptyClass: return "EmptyClass";
    case Errc::TooLarge: return "TooLarge";
    case Errc::MissingClass: return "MissingClass";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ParseError: return "ParseError";
    case Errc::MissingLabel: return "MissingLabel";
    case Errc::NonNumericFeature: return "NonNumericFeature";
  }
  return "Unknown";
}

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// |det| below this fraction of scale^d is treated as singular.
constexpr double kSingularRel = 1e-12;

}  // namespace

// ---------------------------------------------------------------------------
// Simplex

Simplex::Simplex(std::vector<int> vertex_ids, const PointSet& store) : ids_(std::move(vertex_ids)) {
  vertices_.reserve(ids_.size());
  for (int id : ids_) vertices_.push_back(store.at(id));
  init();
}

Simplex::Simplex(const PointSet& vertices) : vertices_(vertices) {
  ids_.resize(vertices_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) ids_[i] = static_cast<int>(i);
  init();
}

void Simplex::init() {
  const int d = dim();
  if (d < 1) throw Error(Errc::DegenerateSimplex, "simplex needs at least two vertices");
  for (const auto& v : vertices_) {
    if (v.size() != d) throw Error(Errc::DegenerateSimplex, "simplex needs d+1 vertices in R^d");
  }
  Eigen::MatrixXd a(d, d);
  double scale = 0.0;
  for (int i = 0; i < d; ++i) {
    a.col(i) = vertices_[i + 1] - vertices_[0];
    scale = std::max(scale, a.col(i).norm());
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const double det = lu.determinant();
  if (!std::isfinite(det) || std::abs(det) <= kSingularRel * std::pow(scale, d)) {
    throw Error(Errc::DegenerateSimplex, "simplex vertices are affinely dependent");
  }
  edge_inverse_ = lu.inverse();
  volume_ = std::abs(det) / factorial(d);

  // (y_i - y_0) . u = |y_i - y_0|^2 / 2
  Eigen::VectorXd rhs(d);
  for (int i = 0; i < d; ++i) rhs[i] = 0.5 * a.col(i).squaredNorm();
  const Eigen::VectorXd u = edge_inverse_.transpose() * rhs;
  circumcenter_ = vertices_[0] + u;
  circumradius_ = u.norm();
}

BaryCoords Simplex::barycentric(const Point& x) const {
  const int d = dim();
  const Eigen::VectorXd lambda = edge_inverse_ * (x - vertices_[0]);
  BaryCoords out;
  out.w.resize(d + 1);
  out.w[0] = 1.0 - lambda.sum();
  out.w.tail(d) = lambda;
  return out;
}

Point Simplex::from_barycentric(const Eigen::VectorXd& w) const {
  Point x = Point::Zero(dim());
  for (int i = 0; i <= dim(); ++i) x += w[i] * vertices_[i];
  return x;
}

Point Simplex::centroid() const {
  Point c = Point::Zero(dim());
  for (const auto& v : vertices_) c += v;
  return c / static_cast<double>(vertices_.size());
}

BaryCoords solve_barycentric(const Simplex& simplex, const Point& x) { return simplex.barycentric(x); }

PointClass classify_location(const BaryCoords& w, double tol) {
  if (w.w.minCoeff() < -tol) return PointClass::Outside;
  if (w.w.maxCoeff() >= 1.0 - tol) return PointClass::Vertex;
  if (w.w.minCoeff() <= tol) return PointClass::Boundary;
  return PointClass::Interior;
}

// ---------------------------------------------------------------------------
// Hyperplanes

Hyperplane hyperplane_through(const PointSet& pts) {
  const int d = static_cast<int>(pts.size());
  if (d < 1) throw Error(Errc::DegenerateSimplex, "hyperplane needs at least one point");
  Hyperplane h;
  h.normal.resize(d);
  if (d == 1) {
    h.normal[0] = 1.0;
    h.offset = pts[0][0];
    return h;
  }
  Eigen::MatrixXd m(d - 1, d);
  double scale = 0.0;
  for (int i = 1; i < d; ++i) {
    m.row(i - 1) = (pts[i] - pts[0]).transpose();
    scale = std::max(scale, m.row(i - 1).norm());
  }
  // Generalized cross product: cofactors of the (d-1) x d edge matrix.
  Eigen::MatrixXd minor(d - 1, d - 1);
  for (int k = 0; k < d; ++k) {
    int col = 0;
    for (int j = 0; j < d; ++j) {
      if (j == k) continue;
      minor.col(col++) = m.col(j);
    }
    const double det = minor.determinant();
    h.normal[k] = (k % 2 == 0) ? det : -det;
  }
  const double norm = h.normal.norm();
  if (!std::isfinite(norm) || norm <= kSingularRel * std::pow(scale, d - 1)) {
    throw Error(Errc::DegenerateSimplex, "hyperplane points are affinely dependent");
  }
  h.normal /= norm;
  h.offset = h.normal.dot(pts[0]);
  return h;
}

// ---------------------------------------------------------------------------
// OuterSimplex

OuterSimplex::OuterSimplex(std::vector<int> facet_ids, const PointSet& store, const Point& hull_center)
    : ids_(std::move(facet_ids)), center_(hull_center) {
  const int d = static_cast<int>(ids_.size());
  if (d != hull_center.size()) throw Error(Errc::DegenerateCone, "facet needs d vertices in R^d");
  rays_.resize(d, d);
  double scale = 0.0;
  for (int i = 0; i < d; ++i) {
    facet_points_.push_back(store.at(ids_[i]));
    rays_.col(i) = facet_points_.back() - center_;
    scale = std::max(scale, rays_.col(i).norm());
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(rays_);
  const double det = lu.determinant();
  if (!std::isfinite(det) || std::abs(det) <= kSingularRel * std::pow(scale, d)) {
    throw Error(Errc::DegenerateCone, "outer-simplex rays are linearly dependent");
  }
  cone_inverse_ = lu.inverse();
  plane_ = hyperplane_through(facet_points_);
  if (plane_.signed_distance(center_) > 0.0) {
    plane_.normal = -plane_.normal;
    plane_.offset = -plane_.offset;
  }
}

ConeCoords OuterSimplex::cone_coordinates(const Point& x) const {
  return ConeCoords{cone_inverse_ * (x - center_)};
}

Point OuterSimplex::from_cone(const Eigen::VectorXd& c) const { return center_ + rays_ * c; }

bool OuterSimplex::contains(const ConeCoords& c, double tol) {
  return c.c.minCoeff() >= -tol && c.sum() >= 1.0 - tol;
}

ConeCoords cone_coordinates(const OuterSimplex& outer, const Point& hull_center, const Point& x) {
  return ConeCoords{outer.cone_inverse() * (x - hull_center)};
}

// ---------------------------------------------------------------------------
// Tessellation

Tessellation Tessellation::from_parts(PointSet points, std::vector<std::vector<int>> cells,
                                      std::vector<std::vector<int>> hull_facets) {
  if (points.empty()) throw Error(Errc::InsufficientPoints, "tessellation has no points");
  Tessellation t;
  t.dim_ = static_cast<int>(points.front().size());
  t.points_ = std::move(points);

  for (auto& c : cells) std::sort(c.begin(), c.end());
  for (auto& f : hull_facets) std::sort(f.begin(), f.end());
  std::sort(cells.begin(), cells.end());
  std::sort(hull_facets.begin(), hull_facets.end());

  t.cells_.reserve(cells.size());
  for (auto& c : cells) t.cells_.emplace_back(c, t.points_);

  for (const auto& f : hull_facets) t.hull_ids_.insert(t.hull_ids_.end(), f.begin(), f.end());
  std::sort(t.hull_ids_.begin(), t.hull_ids_.end());
  t.hull_ids_.erase(std::unique(t.hull_ids_.begin(), t.hull_ids_.end()), t.hull_ids_.end());
  if (t.hull_ids_.empty()) throw Error(Errc::DegenerateInput, "tessellation has no hull facets");
  t.hull_center_ = Point::Zero(t.dim_);
  for (int id : t.hull_ids_) t.hull_center_ += t.points_.at(id);
  t.hull_center_ /= static_cast<double>(t.hull_ids_.size());

  t.outer_.reserve(hull_facets.size());
  for (auto& f : hull_facets) t.outer_.emplace_back(f, t.points_, t.hull_center_);

  std::map<std::vector<int>, int> hull_index;
  for (std::size_t l = 0; l < hull_facets.size(); ++l) hull_index[hull_facets[l]] = static_cast<int>(l);

  std::map<std::vector<int>, std::pair<int, int>> open;
  t.neighbors_.assign(t.cells_.size(), std::vector<int>(t.dim_ + 1, std::numeric_limits<int>::min()));
  for (std::size_t c = 0; c < t.cells_.size(); ++c) {
    const auto& ids = t.cells_[c].vertex_ids();
    for (int k = 0; k <= t.dim_; ++k) {
      std::vector<int> facet;
      facet.reserve(t.dim_);
      for (int j = 0; j <= t.dim_; ++j) {
        if (j != k) facet.push_back(ids[j]);
      }
      if (auto h = hull_index.find(facet); h != hull_index.end()) {
        t.neighbors_[c][k] = -(h->second + 1);
        continue;
      }
      auto it = open.find(facet);
      if (it == open.end()) {
        open.emplace(std::move(facet), std::make_pair(static_cast<int>(c), k));
      } else {
        t.neighbors_[c][k] = it->second.first;
        t.neighbors_[it->second.first][it->second.second] = static_cast<int>(c);
        open.erase(it);
      }
    }
  }
  if (!open.empty()) {
    throw Error(Errc::DegenerateInput, "tessellation faces are not closed under adjacency");
  }
  return t;
}

int Tessellation::scan_cells(const Point& x, double tol, Eigen::VectorXd* coords) const {
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    BaryCoords w = cells_[c].barycentric(x);
    if (w.min() >= -tol) {
      if (coords) *coords = std::move(w.w);
      return static_cast<int>(c);
    }
  }
  return -1;
}

Location Tessellation::locate(const Point& x, double tol) const {
  Location loc;
  if (x.size() != dim_ || !x.allFinite()) return loc;

  int found = -1;
  Eigen::VectorXd w;
  bool exited_hull = false;
  if (!cells_.empty()) {
    int c = 0;
    const std::size_t max_steps = cells_.size() + 8;
    for (std::size_t step = 0; step < max_steps; ++step) {
      BaryCoords bw = cells_[c].barycentric(x);
      Eigen::Index k = 0;
      const double wmin = bw.w.minCoeff(&k);
      if (wmin >= -tol) {
        found = c;
        w = std::move(bw.w);
        break;
      }
      const int nb = neighbors_[c][k];
      if (nb < 0) {
        exited_hull = true;
        break;
      }
      c = nb;
    }
    if (found < 0 && !exited_hull) found = scan_cells(x, tol, &w);
  }

  if (found >= 0) {
    if (w.minCoeff() <= tol) {
      // On a shared face: the lowest containing cell index wins.
      found = scan_cells(x, tol, &w);
    }
    loc.kind = Location::Kind::InsideCell;
    loc.index = found;
    for (int k = 0; k <= dim_; ++k) {
      if (std::abs(w[k]) <= tol && neighbors_[found][k] < 0) {
        loc.kind = Location::Kind::OnHullBoundary;
        break;
      }
    }
    loc.coords = std::move(w);
    return loc;
  }

  int best = -1;
  double best_min = -std::numeric_limits<double>::infinity();
  ConeCoords best_c;
  for (std::size_t l = 0; l < outer_.size(); ++l) {
    ConeCoords cc = outer_[l].cone_coordinates(x);
    if (OuterSimplex::contains(cc, tol)) {
      loc.kind = Location::Kind::InOuter;
      loc.index = static_cast<int>(l);
      loc.coords = std::move(cc.c);
      return loc;
    }
    if (cc.sum() >= 1.0 - tol && cc.c.minCoeff() > best_min) {
      best_min = cc.c.minCoeff();
      best = static_cast<int>(l);
      best_c = std::move(cc);
    }
  }
  if (best >= 0) {
    loc.kind = Location::Kind::InOuter;
    loc.index = best;
    loc.coords = std::move(best_c.c);
  }
  return loc;
}

double Tessellation::hull_volume() const {
  double vol = 0.0;
  for (const auto& o : outer_) vol += std::abs(o.rays().determinant());
  return vol / factorial(dim_);
}

// ---------------------------------------------------------------------------
// Vertex regions and convex distances

int vertex_region(const BaryCoords& m, const BaryCoords& w, double tol) {
  if (m.size() != w.size()) throw Error(Errc::InvalidArgument, "center and point coordinate sizes differ");
  if (w.min() < -tol) throw Error(Errc::OutsideSimplex, "point is outside the simplex");
  const int n = w.size();
  Eigen::VectorXd ratio(n);
  for (int i = 0; i < n; ++i) ratio[i] = w[i] / m[i];
  const double top = ratio.maxCoeff();
  for (int i = 0; i < n; ++i) {
    if (ratio[i] >= top - tol) return i;
  }
  return 0;
}

int vertex_region_centroid(const BaryCoords& w, double tol) {
  if (w.min() < -tol) throw Error(Errc::OutsideSimplex, "point is outside the simplex");
  const double top = w.w.maxCoeff();
  for (int i = 0; i < w.size(); ++i) {
    if (w[i] >= top - tol) return i;
  }
  return 0;
}

double simplex_convex_distance(const BaryCoords& w) {
  return 1.0 - static_cast<double>(w.size()) * w.min();
}

double polytope_convex_distance(const HalfSpacePolytope& polytope, const Point& center, const Point& z) {
  const Eigen::VectorXd slack = polytope.b - polytope.a * center;
  if (slack.size() == 0 || !(slack.minCoeff() > 0.0)) {
    throw Error(Errc::DegeneratePolytope, "center is not strictly inside the polytope");
  }
  const Eigen::VectorXd dir = z - center;
  if (dir.squaredNorm() == 0.0) return 0.0;
  const Eigen::VectorXd rate = polytope.a * dir;
  double alpha = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < rate.size(); ++i) {
    if (rate[i] > 0.0) alpha = std::min(alpha, slack[i] / rate[i]);
  }
  if (!std::isfinite(alpha)) return 0.0;
  return 1.0 / alpha;
}

}  // namespace pcd
