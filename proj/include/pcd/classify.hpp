#pragma once

// Class covers built from prototype sets and the classifiers that use them:
// pre-classifier, hybrid (with kNN or CCCD fallback), cover classifier, and
// the plain kNN and CCCD baselines. Multi-class is one-against-rest.

#include <memory>
#include <string>
#include <vector>

#include "pcd/domination.hpp"

namespace pcd {

enum class CoverKind { Standard, Composite, Spherical };

const char* to_string(CoverKind k);
CoverKind cover_kind_from_string(const std::string& s);

/// Union of prototype regions for one class.
struct Cover {
  int label = 0;
  CoverKind kind = CoverKind::Standard;
  std::shared_ptr<const Tessellation> tess;  // null for spherical covers
  std::vector<Prototype> prototypes;         // indices refer to the class's own points
  PointSet points;                           // prototype coordinates

  /// min over regions of the convex distance; infinity for an empty cover.
  double dissimilarity(const Point& z) const;
  /// Same, restricted to regions inside the hull of the other class.
  double inner_dissimilarity(const Point& z) const;
  bool contains(const Point& z, double tol = kDefaultTol) const;
};

struct TrainParams {
  CoverKind kind = CoverKind::Standard;
  double r = 3.0;
  double theta = 1.0;
  int k = 1;
  double tol = kDefaultTol;
  bool with_cccd = true;  // also build the CCCD baseline covers
  DelaunayOptions delaunay;
};

struct LabeledPoints {
  PointSet x;
  std::vector<int> y;
  int n_classes = 0;

  int dim() const { return x.empty() ? 0 : static_cast<int>(x[0].size()); }
  PointSet class_points(int j) const;
  std::vector<int> class_counts() const;
};

struct TrainedModel {
  TrainParams params;
  int dim = 0;
  int n_classes = 0;
  std::vector<std::string> class_names;
  std::vector<double> priors;
  std::vector<std::shared_ptr<const Tessellation>> tess;  // per class, built on the rest
  std::vector<Cover> covers;   // requested kind (spherical on fallback)
  std::vector<Cover> cccd;     // greedy CCCD cover per class, for the CCCD classifier
  std::vector<std::string> notes;  // fallback reasons
  LabeledPoints train;
};

/// Builds per-class tessellations and target layouts once so several r or
/// cover kinds can be fitted cheaply.
class PcdTrainer {
 public:
  explicit PcdTrainer(LabeledPoints data, const DelaunayOptions& delaunay = {}, double tol = kDefaultTol);

  TrainedModel fit(const TrainParams& params) const;
  Cover build_cover(int j, CoverKind kind, double r, double theta) const;

  const LabeledPoints& data() const { return data_; }
  bool has_tessellation(int j) const { return tess_[j] != nullptr; }

 private:
  LabeledPoints data_;
  double tol_;
  std::vector<PointSet> targets_, rest_;
  std::vector<std::shared_ptr<const Tessellation>> tess_;
  std::vector<TargetLayout> layout_;
  std::vector<std::string> notes_;
};

/// Convenience: trainer + fit.
TrainedModel train_model(const LabeledPoints& data, const TrainParams& params);

enum class DecisionPath { Pre, Alternative, Cover };
enum class Alternative { Knn, Cccd };

inline constexpr int kNoDecision = -1;

struct Prediction {
  int label = kNoDecision;
  std::vector<double> rho;
  DecisionPath path = DecisionPath::Cover;
};

Prediction pre_classify_gp(const TrainedModel& model, const Point& z);
Prediction hybrid_classify(const TrainedModel& model, const Point& z, Alternative alt);
Prediction cover_classify(const TrainedModel& model, const Point& z);

/// Majority vote of the k nearest; distance ties to the lower point index,
/// vote ties to the lower class.
int knn_classify(const LabeledPoints& train, const Point& z, int k);
/// argmin over classes of min d(z, s) / radius(s).
int cccd_classify(const TrainedModel& model, const Point& z);

/// rho(z, C_0) - rho(z, C_1) on the full covers; larger favors class 1.
double cover_score(const TrainedModel& model, const Point& z);

int argmin_lowest(const std::vector<double>& v);

struct CoverCheck {
  int uncovered = 0;  // own-class training points outside the cover
  int impure = 0;     // other-class training points strictly inside some region
};

CoverCheck check_cover(const TrainedModel& model, int j, double tol = kDefaultTol);

}  // namespace pcd
