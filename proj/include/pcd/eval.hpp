#pragma once

// Metrics, the 5x2 cross-validation tests, and the Monte Carlo engine for the
// uniform overlap and nested-support settings.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pcd/classify.hpp"

namespace pcd {

/// Shift nu giving overlap ratio zeta between U[0,1]^d and U[nu,1+nu]^d.
double overlap_shift(double zeta, int d);
/// Inverse of overlap_shift.
double overlap_ratio(double nu, int d);

struct Metrics {
  std::vector<double> ccr;
  double auc = 0.0;  // balanced accuracy
};

/// Throws MissingClass if some class has no sample in `truth`.
Metrics evaluate(const std::vector<int>& pred, const std::vector<int>& truth, int n_classes);

/// Rank-based ROC AUC for binary truth; larger scores mean class 1.
double roc_auc(const std::vector<double>& score, const std::vector<int>& truth);

enum class ClassifierId { Standard, Composite, PeKnn, PeCccd, Knn, Cccd };

const char* to_string(ClassifierId id);
ClassifierId classifier_from_string(const std::string& s);
bool uses_r(ClassifierId id);

struct ClassifierSpec {
  ClassifierId id = ClassifierId::Standard;
  double r = 3.0;
  double theta = 1.0;
  int k = 1;
};

TrainParams train_params_for(const ClassifierSpec& spec);
int predict_one(const TrainedModel& model, ClassifierId id, const Point& z);
std::vector<int> predict_all(const TrainedModel& model, ClassifierId id, const PointSet& zs);

using FiveByTwo = std::array<std::array<double, 2>, 5>;

struct CvTestResult {
  FiveByTwo auc_a{}, auc_b{}, diff{};
  double t = 0.0, t_p = 1.0;
  double f = 0.0, f_p = 1.0;
  bool degenerate = false;  // sum of variances was zero
  std::vector<std::vector<int>> folds;  // per replication: fold (0/1) of each row
};

/// t and F statistics from the 5x2 AUC differences.
CvTestResult five_by_two_test(const FiveByTwo& diff);

/// Stratified 5x2 CV of two classifiers; pca_dim > 0 fits PCA on each
/// training half and applies it to the test half.
CvTestResult five_by_two_cv(const LabeledPoints& data, const ClassifierSpec& a, const ClassifierSpec& b,
                            std::uint64_t seed, int pca_dim = 0);

/// Deterministic per-replicate stream seed.
std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t index);

enum class Setting { Overlap, Nested };

struct SimSpec {
  Setting setting = Setting::Overlap;
  int d = 2;
  double zeta = 0.5;
  std::optional<double> nu;  // overrides zeta
  int n0 = 400;              // nested setting: size of each class
  double q = 0.1;            // ignored in the nested setting
  std::vector<double> r_grid{3.0};
  double theta = 1.0;
  int k = 1;
  int test_per_class = 100;
  double se_target = 0.005;
  int min_reps = 20;
  int max_reps = 10000;
  int batch = 16;
  int threads = 1;
  std::uint64_t seed = 1;
  std::vector<ClassifierId> classifiers{ClassifierId::Standard, ClassifierId::Composite, ClassifierId::PeKnn,
                                        ClassifierId::PeCccd,   ClassifierId::Knn,       ClassifierId::Cccd};
};

double shift_of(const SimSpec& spec);
int minority_size(const SimSpec& spec);

/// One replicate's training and test draws.
struct SimDraw {
  LabeledPoints train;
  LabeledPoints test;
};

SimDraw draw_replicate(const SimSpec& spec, std::uint64_t rep_seed);

struct SimRow {
  std::string classifier;
  std::optional<double> r;
  double q = 0.0;
  int d = 0;
  std::string metric;
  double value = 0.0;
  double se = 0.0;
};

struct SimResult {
  std::vector<SimRow> rows;
  int replicates = 0;
  bool capped = false;  // stopped at max_reps before reaching the SE target
  double max_auc_se = 0.0;

  const SimRow* find(const std::string& classifier, std::optional<double> r, const std::string& metric) const;
};

SimResult run_simulation(const SimSpec& spec);

/// Running mean and standard error.
struct Moments {
  std::size_t n = 0;
  double mean = 0.0, m2 = 0.0;

  void add(double x);
  double se() const;
};

struct TuneResult {
  ClassifierId id = ClassifierId::Knn;
  std::vector<double> grid;
  std::vector<int> wins;    // replicates where the parameter had the best AUC
  std::vector<Moments> auc;
  double best = 0.0;        // mode of the winners, smallest on ties
  int replicates = 0;
  bool capped = false;
};

/// Pilot study: per replicate record the parameter (theta or k) with the
/// highest AUC, smallest on ties, and report the mode.
TuneResult tune(const SimSpec& spec, ClassifierId id, const std::vector<double>& grid);

/// Domination number of the PE-PCD on n uniform targets in one simplex.
std::vector<int> simulate_cell_gamma(const Simplex& cell, int n, double r, int reps, std::uint64_t seed);

}  // namespace pcd
