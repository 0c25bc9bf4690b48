// Incremental Bowyer-Watson construction in general dimension.
//
// The hull is closed with "ghost" cells: every hull facet carries a cell
// whose extra vertex is the point at infinity. A ghost cell conflicts with p
// when p lies strictly beyond its facet, or on the facet plane and strictly
// inside the circumsphere of the finite cell across the facet. Ties in the
// in-sphere predicate count as "no conflict"; the cavity is then grown until
// every boundary facet is strictly visible from p, so the result stays a
// proper triangulation on cospherical and cohyperplanar input.

#include "pcd/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

namespace pcd {
namespace {

constexpr int kInfinite = -1;

struct Cell {
  std::vector<int> v;
  std::vector<int> nb;
  int inf_pos = -1;
  bool alive = true;
  // finite cells
  Eigen::VectorXd center;
  double r2 = 0.0;
  Eigen::MatrixXd edge_inverse;
  // ghost cells: outward facet plane
  Hyperplane plane;
};

class Builder {
 public:
  Builder(const PointSet& pts, const DelaunayOptions& opt) : pts_(pts), opt_(opt) {
    d_ = static_cast<int>(pts.front().size());
    Eigen::VectorXd lo = pts.front(), hi = pts.front();
    for (const auto& p : pts) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    scale_ = std::max((hi - lo).norm(), 1e-300);
    eps_dist_ = opt_.predicate_tol * scale_;
  }

  void run();
  std::vector<std::vector<int>> finite_cells() const;
  std::vector<std::vector<int>> hull_facets() const;

 private:
  bool conflicts(int c, int p) const;
  void finalize_cell(int c);
  void bootstrap(const std::vector<int>& simplex);
  int find_seed(int p);
  void insert(int p);
  double distance_to_affine_hull(const std::vector<int>& ids, int p) const;

  const PointSet& pts_;
  DelaunayOptions opt_;
  int d_ = 0;
  double scale_ = 1.0;
  double eps_dist_ = 0.0;
  Point interior_;
  std::vector<Cell> cells_;
  std::vector<int> mark_;
  int stamp_ = 0;
  int last_finite_ = 0;
};

bool Builder::conflicts(int c, int p) const {
  const Cell& cell = cells_[c];
  const Point& x = pts_[p];
  if (cell.inf_pos < 0) {
    return (x - cell.center).squaredNorm() < cell.r2 * (1.0 - opt_.predicate_tol);
  }
  const double dist = cell.plane.signed_distance(x);
  if (dist > eps_dist_) return true;
  if (dist < -eps_dist_) return false;
  return conflicts(cell.nb[cell.inf_pos], p);
}

void Builder::finalize_cell(int c) {
  Cell& cell = cells_[c];
  if (cell.inf_pos < 0) {
    Eigen::MatrixXd a(d_, d_);
    const Point& y0 = pts_[cell.v[0]];
    for (int i = 0; i < d_; ++i) a.col(i) = pts_[cell.v[i + 1]] - y0;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    cell.edge_inverse = lu.inverse();
    Eigen::VectorXd rhs(d_);
    for (int i = 0; i < d_; ++i) rhs[i] = 0.5 * a.col(i).squaredNorm();
    const Eigen::VectorXd u = cell.edge_inverse.transpose() * rhs;
    cell.center = y0 + u;
    cell.r2 = u.squaredNorm();
    last_finite_ = c;
  } else {
    PointSet facet;
    for (int id : cell.v) {
      if (id != kInfinite) facet.push_back(pts_[id]);
    }
    cell.plane = hyperplane_through(facet);
    if (cell.plane.signed_distance(interior_) > 0.0) {
      cell.plane.normal = -cell.plane.normal;
      cell.plane.offset = -cell.plane.offset;
    }
  }
}

void Builder::bootstrap(const std::vector<int>& simplex) {
  interior_ = Point::Zero(d_);
  for (int id : simplex) interior_ += pts_[id];
  interior_ /= static_cast<double>(d_ + 1);

  cells_.clear();
  Cell root;
  root.v = simplex;
  root.nb.resize(d_ + 1);
  for (int i = 0; i <= d_; ++i) root.nb[i] = i + 1;
  cells_.push_back(root);
  for (int i = 0; i <= d_; ++i) {
    Cell ghost;
    ghost.v = simplex;
    ghost.v[i] = kInfinite;
    ghost.inf_pos = i;
    ghost.nb.resize(d_ + 1);
    for (int j = 0; j <= d_; ++j) ghost.nb[j] = (j == i) ? 0 : j + 1;
    cells_.push_back(ghost);
  }
  for (std::size_t c = 0; c < cells_.size(); ++c) finalize_cell(static_cast<int>(c));
  last_finite_ = 0;
}

double Builder::distance_to_affine_hull(const std::vector<int>& ids, int p) const {
  const Point& base = pts_[ids[0]];
  const Eigen::VectorXd rel = pts_[p] - base;
  if (ids.size() == 1) return rel.norm();
  Eigen::MatrixXd m(d_, static_cast<int>(ids.size()) - 1);
  for (std::size_t i = 1; i < ids.size(); ++i) m.col(static_cast<int>(i) - 1) = pts_[ids[i]] - base;
  const Eigen::VectorXd coef = m.colPivHouseholderQr().solve(rel);
  return (rel - m * coef).norm();
}

int Builder::find_seed(int p) {
  const Point& x = pts_[p];
  int c = last_finite_;
  if (!cells_[c].alive || cells_[c].inf_pos >= 0) c = -1;
  if (c >= 0) {
    const std::size_t max_steps = cells_.size() + 8;
    for (std::size_t step = 0; step < max_steps; ++step) {
      const Cell& cell = cells_[c];
      const Eigen::VectorXd lambda = cell.edge_inverse * (x - pts_[cell.v[0]]);
      Eigen::VectorXd w(d_ + 1);
      w[0] = 1.0 - lambda.sum();
      w.tail(d_) = lambda;
      Eigen::Index k = 0;
      if (w.minCoeff(&k) >= -opt_.predicate_tol) {
        if (conflicts(c, p)) return c;
        break;
      }
      const int next = cell.nb[k];
      if (cells_[next].inf_pos >= 0) {
        if (conflicts(next, p)) return next;
        break;
      }
      c = next;
    }
  }
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (cells_[i].alive && conflicts(static_cast<int>(i), p)) return static_cast<int>(i);
  }
  return -1;
}

void Builder::insert(int p) {
  const int seed = find_seed(p);
  if (seed < 0) return;  // on an existing vertex (or numerically indistinguishable)

  if (mark_.size() < cells_.size()) mark_.resize(cells_.size() * 2 + 16, 0);
  ++stamp_;
  std::vector<int> cavity{seed};
  mark_[seed] = stamp_;
  for (std::size_t head = 0; head < cavity.size(); ++head) {
    for (int nb : cells_[cavity[head]].nb) {
      if (mark_[nb] != stamp_ && conflicts(nb, p)) {
        mark_[nb] = stamp_;
        cavity.push_back(nb);
      }
    }
  }

  const double dup_tol = 1e-10 * scale_;
  for (int c : cavity) {
    for (int id : cells_[c].v) {
      if (id != kInfinite && (pts_[id] - pts_[p]).norm() <= dup_tol) return;
    }
  }

  struct Boundary {
    int cell, k, outside;
  };
  std::vector<Boundary> boundary;
  for (;;) {
    boundary.clear();
    std::vector<int> grow;
    for (int c : cavity) {
      const Cell& cell = cells_[c];
      for (int k = 0; k <= d_; ++k) {
        const int o = cell.nb[k];
        if (mark_[o] == stamp_) continue;
        boundary.push_back({c, k, o});
        const Cell& out = cells_[o];
        bool ok = true;
        if (cell.inf_pos >= 0 && k != cell.inf_pos) {
          // New ghost cell: its facet (ridge + p) must be a proper hull facet.
          std::vector<int> facet;
          for (int j = 0; j <= d_; ++j) {
            if (j != k && j != cell.inf_pos) facet.push_back(cell.v[j]);
          }
          ok = out.plane.signed_distance(pts_[p]) <= eps_dist_ &&
               (facet.empty() || distance_to_affine_hull(facet, p) > eps_dist_);
        } else {
          PointSet facet;
          for (int j = 0; j <= d_; ++j) {
            if (j != k) facet.push_back(pts_[cell.v[j]]);
          }
          if (out.inf_pos >= 0) {
            ok = out.plane.signed_distance(pts_[p]) < -eps_dist_;
          } else {
            int q = -1;
            for (int j = 0; j <= d_; ++j) {
              if (out.nb[j] == c) q = out.v[j];
            }
            const Hyperplane h = hyperplane_through(facet);
            const double sp = h.signed_distance(pts_[p]);
            const double sq = h.signed_distance(pts_[q]);
            ok = (sq > 0.0) ? sp < -eps_dist_ : sp > eps_dist_;
          }
        }
        if (!ok) grow.push_back(o);
      }
    }
    if (grow.empty()) break;
    for (int o : grow) {
      if (mark_[o] != stamp_) {
        mark_[o] = stamp_;
        cavity.push_back(o);
      }
    }
    if (cavity.size() > cells_.size()) {
      throw Error(Errc::CosphericalAmbiguity, "cavity repair did not converge");
    }
  }

  std::map<std::vector<int>, std::pair<int, int>> open;
  std::vector<int> created;
  created.reserve(boundary.size());
  for (const Boundary& b : boundary) {
    Cell fresh;
    fresh.v = cells_[b.cell].v;
    fresh.v[b.k] = p;
    fresh.inf_pos = (cells_[b.cell].inf_pos == b.k) ? -1 : cells_[b.cell].inf_pos;
    fresh.nb.assign(d_ + 1, -1);
    fresh.nb[b.k] = b.outside;
    const int id = static_cast<int>(cells_.size());
    cells_.push_back(std::move(fresh));
    for (int& nb : cells_[b.outside].nb) {
      if (nb == b.cell) nb = id;
    }
    created.push_back(id);
  }
  for (int id : created) {
    const std::vector<int> verts = cells_[id].v;
    for (int j = 0; j <= d_; ++j) {
      if (verts[j] == p) continue;
      std::vector<int> key;
      for (int i = 0; i <= d_; ++i) {
        if (i != j) key.push_back(verts[i]);
      }
      std::sort(key.begin(), key.end());
      auto it = open.find(key);
      if (it == open.end()) {
        open.emplace(std::move(key), std::make_pair(id, j));
      } else {
        cells_[id].nb[j] = it->second.first;
        cells_[it->second.first].nb[it->second.second] = id;
        open.erase(it);
      }
    }
  }
  if (!open.empty()) throw Error(Errc::CosphericalAmbiguity, "cavity boundary is not a closed surface");
  for (int c : cavity) cells_[c].alive = false;
  for (int id : created) finalize_cell(id);
}

void Builder::run() {
  const int n = static_cast<int>(pts_.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Exact duplicates keep their first occurrence only.
  std::vector<int> sorted = order;
  auto lex = [&](int a, int b) {
    for (int k = 0; k < d_; ++k) {
      if (pts_[a][k] != pts_[b][k]) return pts_[a][k] < pts_[b][k];
    }
    return a < b;
  };
  std::sort(sorted.begin(), sorted.end(), lex);
  std::vector<char> keep(n, 1);
  for (int i = 1; i < n; ++i) {
    if (pts_[sorted[i]] == pts_[sorted[i - 1]]) keep[sorted[i]] = 0;
  }
  std::mt19937_64 rng(opt_.seed);
  std::shuffle(order.begin(), order.end(), rng);
  order.erase(std::remove_if(order.begin(), order.end(), [&](int i) { return !keep[i]; }), order.end());

  std::vector<int> simplex;
  const double span_tol = 1e-8 * scale_;
  for (int id : order) {
    if (simplex.empty() || distance_to_affine_hull(simplex, id) > span_tol) simplex.push_back(id);
    if (static_cast<int>(simplex.size()) == d_ + 1) break;
  }
  if (static_cast<int>(simplex.size()) < d_ + 1) {
    throw Error(Errc::DegenerateInput, "points do not affinely span R^d");
  }
  bootstrap(simplex);
  for (int id : order) {
    if (std::find(simplex.begin(), simplex.end(), id) != simplex.end()) continue;
    insert(id);
  }
}

std::vector<std::vector<int>> Builder::finite_cells() const {
  std::vector<std::vector<int>> out;
  for (const auto& c : cells_) {
    if (c.alive && c.inf_pos < 0) out.push_back(c.v);
  }
  return out;
}

std::vector<std::vector<int>> Builder::hull_facets() const {
  std::vector<std::vector<int>> out;
  for (const auto& c : cells_) {
    if (!c.alive || c.inf_pos < 0) continue;
    std::vector<int> f;
    for (int id : c.v) {
      if (id != kInfinite) f.push_back(id);
    }
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace

Tessellation Tessellation::build(const PointSet& points, const DelaunayOptions& options) {
  if (points.empty()) throw Error(Errc::InsufficientPoints, "no points to tessellate");
  const int d = static_cast<int>(points.front().size());
  if (d < 1) throw Error(Errc::InvalidArgument, "points must have at least one coordinate");
  if (d > kMaxDimension) {
    throw Error(Errc::DimensionTooLarge, "dimension " + std::to_string(d) + " exceeds the supported maximum of 8");
  }
  for (const auto& p : points) {
    if (p.size() != d) throw Error(Errc::InvalidArgument, "points have mixed dimensions");
    if (!p.allFinite()) throw Error(Errc::InvalidArgument, "points must be finite");
  }
  if (static_cast<int>(points.size()) < d + 1) {
    throw Error(Errc::InsufficientPoints, "need at least d+1 points to tessellate");
  }
  Builder builder(points, options);
  builder.run();
  return from_parts(points, builder.finite_cells(), builder.hull_facets());
}

}  // namespace pcd
