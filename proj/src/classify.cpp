#include "pcd/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace pcd {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

const char* to_string(CoverKind k) {
  switch (k) {
    case CoverKind::Standard: return "standard";
    case CoverKind::Composite: return "composite";
    case CoverKind::Spherical: return "spherical";
  }
  return "?";
}

CoverKind cover_kind_from_string(const std::string& s) {
  if (s == "standard") return CoverKind::Standard;
  if (s == "composite") return CoverKind::Composite;
  if (s == "spherical") return CoverKind::Spherical;
  throw Error(Errc::InvalidArgument, "unknown cover kind '" + s + "'");
}

double Cover::dissimilarity(const Point& z) const {
  double best = kInf;
  for (const auto& p : prototypes) best = std::min(best, region_distance(tess.get(), p.region, z));
  return best;
}

double Cover::inner_dissimilarity(const Point& z) const {
  double best = kInf;
  for (const auto& p : prototypes) {
    if (p.provenance == Provenance::InnerExact) best = std::min(best, region_distance(tess.get(), p.region, z));
  }
  return best;
}

bool Cover::contains(const Point& z, double tol) const {
  for (const auto& p : prototypes) {
    if (region_contains(tess.get(), p.region, z, tol)) return true;
  }
  return false;
}

PointSet LabeledPoints::class_points(int j) const {
  PointSet out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] == j) out.push_back(x[i]);
  }
  return out;
}

std::vector<int> LabeledPoints::class_counts() const {
  std::vector<int> c(n_classes, 0);
  for (int v : y) ++c[v];
  return c;
}

PcdTrainer::PcdTrainer(LabeledPoints data, const DelaunayOptions& delaunay, double tol)
    : data_(std::move(data)), tol_(tol) {
  const int m = data_.n_classes;
  if (m < 2) throw Error(Errc::InvalidArgument, "training needs at least two classes");
  if (data_.x.size() != data_.y.size()) throw Error(Errc::InvalidArgument, "feature and label counts differ");
  targets_.resize(m);
  rest_.resize(m);
  tess_.resize(m);
  layout_.resize(m);
  notes_.resize(m);
  for (std::size_t i = 0; i < data_.x.size(); ++i) {
    const int yi = data_.y[i];
    if (yi < 0 || yi >= m) throw Error(Errc::InvalidArgument, "label out of range");
    for (int j = 0; j < m; ++j) (j == yi ? targets_ : rest_)[j].push_back(data_.x[i]);
  }
  for (int j = 0; j < m; ++j) {
    if (targets_[j].empty()) throw Error(Errc::EmptyClass, "class " + std::to_string(j) + " has no points");
  }
  // a point shared by two classes would give a zero radius or an impure region
  std::vector<std::size_t> order(data_.x.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& p = data_.x[a];
    const auto& q = data_.x[b];
    return std::lexicographical_compare(p.data(), p.data() + p.size(), q.data(), q.data() + q.size());
  });
  for (std::size_t i = 1; i < order.size(); ++i) {
    const std::size_t a = order[i - 1], b = order[i];
    if (data_.y[a] != data_.y[b] && data_.x[a] == data_.x[b]) {
      throw Error(Errc::InvalidArgument, "rows " + std::to_string(std::min(a, b)) + " and " +
                                             std::to_string(std::max(a, b)) +
                                             " have identical features but different labels");
    }
  }
  for (int j = 0; j < m; ++j) {
    try {
      auto t = std::make_shared<const Tessellation>(Tessellation::build(rest_[j], delaunay));
      layout_[j] = layout_targets(*t, targets_[j], tol_);
      tess_[j] = std::move(t);
    } catch (const Error& e) {
      if (e.code() != Errc::InsufficientPoints && e.code() != Errc::DegenerateInput) throw;
      notes_[j] = std::string("class ") + std::to_string(j) + ": " + to_string(e.code()) + ", spherical cover used";
    }
  }
}

Cover PcdTrainer::build_cover(int j, CoverKind kind, double r, double theta) const {
  Cover c;
  c.label = j;
  if (!tess_[j]) kind = CoverKind::Spherical;
  c.kind = kind;
  PrototypeSet s;
  switch (kind) {
    case CoverKind::Standard:
      s = standard_mds(targets_[j], *tess_[j], layout_[j], r, tol_);
      break;
    case CoverKind::Composite:
      s = composite_mds(targets_[j], rest_[j], *tess_[j], layout_[j], r, theta, tol_);
      break;
    case CoverKind::Spherical:
      s = spherical_mds(targets_[j], rest_[j], theta);
      break;
  }
  if (kind != CoverKind::Spherical) c.tess = tess_[j];
  c.prototypes = std::move(s.items);
  for (const auto& p : c.prototypes) c.points.push_back(targets_[j][p.index]);
  return c;
}

TrainedModel PcdTrainer::fit(const TrainParams& params) const {
  if (!(params.r >= 1.0)) throw Error(Errc::InvalidArgument, "r must be >= 1");
  if (!(params.theta >= 0.0 && params.theta <= 1.0)) throw Error(Errc::InvalidArgument, "theta must lie in [0, 1]");
  if (params.k < 1) throw Error(Errc::InvalidArgument, "k must be >= 1");
  TrainedModel m;
  m.params = params;
  m.dim = data_.dim();
  m.n_classes = data_.n_classes;
  m.tess = tess_;
  m.train = data_;
  const auto counts = data_.class_counts();
  for (int j = 0; j < m.n_classes; ++j) {
    m.priors.push_back(static_cast<double>(counts[j]) / data_.x.size());
    m.covers.push_back(build_cover(j, params.kind, params.r, params.theta));
    if (params.with_cccd) m.cccd.push_back(build_cover(j, CoverKind::Spherical, params.r, params.theta));
    if (!notes_[j].empty()) m.notes.push_back(notes_[j]);
  }
  return m;
}

TrainedModel train_model(const LabeledPoints& data, const TrainParams& params) {
  return PcdTrainer(data, params.delaunay, params.tol).fit(params);
}

int argmin_lowest(const std::vector<double>& v) {
  int best = 0;
  for (int j = 1; j < static_cast<int>(v.size()); ++j) {
    if (v[j] < v[best]) best = j;
  }
  return best;
}

Prediction pre_classify_gp(const TrainedModel& model, const Point& z) {
  Prediction p;
  p.path = DecisionPath::Pre;
  for (const auto& c : model.covers) p.rho.push_back(c.inner_dissimilarity(z));
  const int j = argmin_lowest(p.rho);
  p.label = p.rho[j] < 1.0 ? j : kNoDecision;
  return p;
}

Prediction hybrid_classify(const TrainedModel& model, const Point& z, Alternative alt) {
  Prediction p = pre_classify_gp(model, z);
  if (p.label != kNoDecision) return p;
  p.path = DecisionPath::Alternative;
  p.label = alt == Alternative::Knn ? knn_classify(model.train, z, model.params.k) : cccd_classify(model, z);
  return p;
}

Prediction cover_classify(const TrainedModel& model, const Point& z) {
  Prediction p;
  p.path = DecisionPath::Cover;
  for (const auto& c : model.covers) p.rho.push_back(c.dissimilarity(z));
  p.label = argmin_lowest(p.rho);
  return p;
}

int knn_classify(const LabeledPoints& train, const Point& z, int k) {
  const int n = static_cast<int>(train.x.size());
  if (k < 1 || k > n) throw Error(Errc::InvalidArgument, "k must lie in [1, n]");
  std::vector<std::pair<double, int>> d(n);
  for (int i = 0; i < n; ++i) d[i] = {(train.x[i] - z).squaredNorm(), i};
  std::partial_sort(d.begin(), d.begin() + k, d.end());
  std::vector<int> votes(train.n_classes, 0);
  for (int i = 0; i < k; ++i) ++votes[train.y[d[i].second]];
  return static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

int cccd_classify(const TrainedModel& model, const Point& z) {
  if (model.cccd.empty()) throw Error(Errc::InvalidArgument, "model was trained without CCCD covers");
  std::vector<double> rho;
  for (const auto& c : model.cccd) rho.push_back(c.dissimilarity(z));
  return argmin_lowest(rho);
}

double cover_score(const TrainedModel& model, const Point& z) {
  return model.covers[0].dissimilarity(z) - model.covers[1].dissimilarity(z);
}

CoverCheck check_cover(const TrainedModel& model, int j, double tol) {
  CoverCheck out;
  const Cover& c = model.covers[j];
  for (std::size_t i = 0; i < model.train.x.size(); ++i) {
    const Point& z = model.train.x[i];
    if (model.train.y[i] == j) {
      if (!(c.dissimilarity(z) < 1.0 + tol)) ++out.uncovered;
    } else {
      for (const auto& p : c.prototypes) {
        if (region_distance(c.tess.get(), p.region, z) < 1.0 - tol) {
          ++out.impure;
          break;
        }
      }
    }
  }
  return out;
}

}  // namespace pcd
