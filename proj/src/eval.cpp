#include "pcd/eval.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <thread>

#include "pcd/pca.hpp"
#include "pcd/stats.hpp"

namespace pcd {

double overlap_shift(double zeta, int d) {
  if (!(zeta >= 0.0 && zeta <= 1.0)) throw Error(Errc::InvalidArgument, "overlap ratio must lie in [0, 1]");
  if (d < 1) throw Error(Errc::InvalidArgument, "dimension must be positive");
  if (zeta == 1.0) return 0.0;
  if (zeta == 0.0) return 1.0;
  return 1.0 - std::pow(2.0 * zeta / (1.0 + zeta), 1.0 / d);
}

double overlap_ratio(double nu, int d) {
  if (!(nu >= 0.0)) throw Error(Errc::InvalidArgument, "shift must be non-negative");
  if (nu >= 1.0) return 0.0;
  const double v = std::pow(1.0 - nu, d);
  return v / (2.0 - v);
}

Metrics evaluate(const std::vector<int>& pred, const std::vector<int>& truth, int n_classes) {
  if (pred.size() != truth.size()) throw Error(Errc::InvalidArgument, "prediction and truth lengths differ");
  std::vector<int> hit(n_classes, 0), total(n_classes, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++total[truth[i]];
    if (pred[i] == truth[i]) ++hit[truth[i]];
  }
  Metrics m;
  for (int j = 0; j < n_classes; ++j) {
    if (total[j] == 0) throw Error(Errc::MissingClass, "class " + std::to_string(j) + " absent from the test labels");
    m.ccr.push_back(static_cast<double>(hit[j]) / total[j]);
  }
  m.auc = std::accumulate(m.ccr.begin(), m.ccr.end(), 0.0) / n_classes;
  return m;
}

double roc_auc(const std::vector<double>& score, const std::vector<int>& truth) {
  std::vector<int> order(score.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return score[a] < score[b]; });
  // average ranks over ties
  std::vector<double> rank(score.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && score[order[j + 1]] == score[order[i]]) ++j;
    const double avg = 0.5 * (i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) rank[order[t]] = avg;
    i = j + 1;
  }
  double n1 = 0, n0 = 0, sum1 = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == 1) {
      n1 += 1;
      sum1 += rank[i];
    } else {
      n0 += 1;
    }
  }
  if (n0 == 0 || n1 == 0) throw Error(Errc::MissingClass, "ROC AUC needs both classes");
  return (sum1 - n1 * (n1 + 1) / 2) / (n0 * n1);
}

const char* to_string(ClassifierId id) {
  switch (id) {
    case ClassifierId::Standard: return "standard";
    case ClassifierId::Composite: return "composite";
    case ClassifierId::PeKnn: return "pe-knn";
    case ClassifierId::PeCccd: return "pe-cccd";
    case ClassifierId::Knn: return "knn";
    case ClassifierId::Cccd: return "cccd";
  }
  return "?";
}

ClassifierId classifier_from_string(const std::string& s) {
  for (auto id : {ClassifierId::Standard, ClassifierId::Composite, ClassifierId::PeKnn, ClassifierId::PeCccd,
                  ClassifierId::Knn, ClassifierId::Cccd}) {
    if (s == to_string(id)) return id;
  }
  throw Error(Errc::InvalidArgument, "unknown classifier '" + s + "'");
}

bool uses_r(ClassifierId id) { return id != ClassifierId::Knn && id != ClassifierId::Cccd; }

TrainParams train_params_for(const ClassifierSpec& spec) {
  TrainParams p;
  p.kind = spec.id == ClassifierId::Composite ? CoverKind::Composite : CoverKind::Standard;
  p.r = spec.r;
  p.theta = spec.theta;
  p.k = spec.k;
  p.with_cccd = spec.id == ClassifierId::PeCccd || spec.id == ClassifierId::Cccd;
  return p;
}

int predict_one(const TrainedModel& model, ClassifierId id, const Point& z) {
  switch (id) {
    case ClassifierId::Standard:
    case ClassifierId::Composite: return cover_classify(model, z).label;
    case ClassifierId::PeKnn: return hybrid_classify(model, z, Alternative::Knn).label;
    case ClassifierId::PeCccd: return hybrid_classify(model, z, Alternative::Cccd).label;
    case ClassifierId::Knn: return knn_classify(model.train, z, model.params.k);
    case ClassifierId::Cccd: return cccd_classify(model, z);
  }
  return kNoDecision;
}

std::vector<int> predict_all(const TrainedModel& model, ClassifierId id, const PointSet& zs) {
  std::vector<int> out;
  out.reserve(zs.size());
  for (const auto& z : zs) out.push_back(predict_one(model, id, z));
  return out;
}

CvTestResult five_by_two_test(const FiveByTwo& diff) {
  CvTestResult r;
  r.diff = diff;
  double s2 = 0.0, sq = 0.0;
  bool all_zero = true;
  for (const auto& row : diff) {
    const double mean = 0.5 * (row[0] + row[1]);
    s2 += (row[0] - mean) * (row[0] - mean) + (row[1] - mean) * (row[1] - mean);
    sq += row[0] * row[0] + row[1] * row[1];
    all_zero = all_zero && row[0] == 0.0 && row[1] == 0.0;
  }
  if (s2 == 0.0) {
    r.degenerate = true;
    if (all_zero) {
      r.t = r.f = 0.0;
      r.t_p = r.f_p = 1.0;
    } else {
      r.t = diff[0][0] == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff[0][0]);
      r.f = std::numeric_limits<double>::infinity();
      r.t_p = r.f_p = 0.0;
    }
    return r;
  }
  r.t = diff[0][0] / std::sqrt(s2 / 5.0);
  r.t_p = t_two_sided_p(r.t, 5.0);
  r.f = sq / (2.0 * s2);
  r.f_p = f_upper_p(r.f, 10.0, 5.0);
  return r;
}

std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(master ^ mix(index));
}

CvTestResult five_by_two_cv(const LabeledPoints& data, const ClassifierSpec& a, const ClassifierSpec& b,
                            std::uint64_t seed, int pca_dim) {
  FiveByTwo auc_a{}, auc_b{};
  std::vector<std::vector<int>> folds;
  for (int i = 0; i < 5; ++i) {
    std::mt19937_64 rng(replicate_seed(seed, i));
    std::vector<int> fold(data.x.size(), 0);
    for (int j = 0; j < data.n_classes; ++j) {
      std::vector<int> idx;
      for (std::size_t t = 0; t < data.y.size(); ++t) {
        if (data.y[t] == j) idx.push_back(static_cast<int>(t));
      }
      std::shuffle(idx.begin(), idx.end(), rng);
      for (std::size_t t = 0; t < idx.size(); ++t) fold[idx[t]] = t < (idx.size() + 1) / 2 ? 0 : 1;
    }
    for (int f = 0; f < 2; ++f) {
      LabeledPoints train, test;
      train.n_classes = test.n_classes = data.n_classes;
      for (std::size_t t = 0; t < data.x.size(); ++t) {
        auto& dst = fold[t] == f ? train : test;
        dst.x.push_back(data.x[t]);
        dst.y.push_back(data.y[t]);
      }
      if (pca_dim > 0) {
        Pca p = fit_pca(train.x, pca_dim);
        train.x = p.transform(train.x);
        test.x = p.transform(test.x);
      }
      PcdTrainer trainer(train);
      TrainedModel ma = trainer.fit(train_params_for(a));
      TrainedModel mb = trainer.fit(train_params_for(b));
      auc_a[i][f] = evaluate(predict_all(ma, a.id, test.x), test.y, data.n_classes).auc;
      auc_b[i][f] = evaluate(predict_all(mb, b.id, test.x), test.y, data.n_classes).auc;
    }
    folds.push_back(std::move(fold));
  }
  FiveByTwo diff{};
  for (int i = 0; i < 5; ++i)
    for (int f = 0; f < 2; ++f) diff[i][f] = auc_a[i][f] - auc_b[i][f];
  CvTestResult r = five_by_two_test(diff);
  r.auc_a = auc_a;
  r.auc_b = auc_b;
  r.folds = std::move(folds);
  return r;
}

double shift_of(const SimSpec& spec) { return spec.nu ? *spec.nu : overlap_shift(spec.zeta, spec.d); }

int minority_size(const SimSpec& spec) {
  if (spec.setting == Setting::Nested) return spec.n0;
  return std::max(1, static_cast<int>(std::lround(spec.q * spec.n0)));
}

SimDraw draw_replicate(const SimSpec& spec, std::uint64_t rep_seed) {
  std::mt19937_64 rng(rep_seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double lo1 = 0.0, width1 = 1.0;
  if (spec.setting == Setting::Overlap) {
    lo1 = shift_of(spec);
  } else {
    lo1 = 0.3;
    width1 = 0.4;
  }
  auto sample = [&](LabeledPoints& dst, int n, int label) {
    for (int i = 0; i < n; ++i) {
      Point p(spec.d);
      for (int k = 0; k < spec.d; ++k) p[k] = label == 0 ? u(rng) : lo1 + width1 * u(rng);
      dst.x.push_back(std::move(p));
      dst.y.push_back(label);
    }
  };
  SimDraw draw;
  draw.train.n_classes = draw.test.n_classes = 2;
  sample(draw.train, spec.n0, 0);
  sample(draw.train, minority_size(spec), 1);
  sample(draw.test, spec.test_per_class, 0);
  sample(draw.test, spec.test_per_class, 1);
  return draw;
}

const SimRow* SimResult::find(const std::string& classifier, std::optional<double> r, const std::string& metric) const {
  for (const auto& row : rows) {
    if (row.classifier != classifier || row.metric != metric) continue;
    if (r.has_value() != row.r.has_value()) continue;
    if (r && std::abs(*r - *row.r) > 1e-12) continue;
    return &row;
  }
  return nullptr;
}

void Moments::add(double x) {
  ++n;
  const double delta = x - mean;
  mean += delta / n;
  m2 += delta * (x - mean);
}

double Moments::se() const {
  if (n < 2) return std::numeric_limits<double>::infinity();
  return std::sqrt(m2 / (n - 1) / n);
}

namespace {

// Runs replicates in fixed-size batches and reduces each batch in replicate
// order, so the result does not depend on the thread count.
void run_batches(int batch, int threads, int max_reps, const std::function<std::vector<double>(int)>& compute,
                 const std::function<bool(int, const std::vector<double>&)>& accept) {
  int done = 0;
  batch = std::max(1, batch);
  threads = std::max(1, threads);
  while (done < max_reps) {
    const int count = std::min(batch, max_reps - done);
    std::vector<std::vector<double>> out(count);
    if (threads == 1) {
      for (int i = 0; i < count; ++i) out[i] = compute(done + i);
    } else {
      std::vector<std::thread> pool;
      std::vector<std::exception_ptr> errors(threads);
      for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (int i = w; i < count; i += threads) out[i] = compute(done + i);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
      for (auto& t : pool) t.join();
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }
    bool stop = false;
    for (int i = 0; i < count; ++i) stop = accept(done + i, out[i]);
    done += count;
    if (stop) return;
  }
}

struct SimKey {
  ClassifierId id;
  std::optional<double> r;
  std::string metric;
};

}  // namespace

SimResult run_simulation(const SimSpec& spec) {
  if (spec.d < 1 || spec.d > kMaxDimension) throw Error(Errc::DimensionTooLarge, "dimension out of range");
  if (spec.n0 < 1 || spec.test_per_class < 1) throw Error(Errc::InvalidArgument, "sample sizes must be positive");
  if (spec.setting == Setting::Overlap && !(spec.q > 0.0 && spec.q <= 1.0))
    throw Error(Errc::InvalidArgument, "q must lie in (0, 1]");
  if (spec.r_grid.empty()) throw Error(Errc::InvalidArgument, "empty r grid");
  for (double r : spec.r_grid) {
    if (!(r >= 1.0)) throw Error(Errc::InvalidArgument, "r values must be >= 1");
  }

  auto wants = [&](ClassifierId id) {
    return std::find(spec.classifiers.begin(), spec.classifiers.end(), id) != spec.classifiers.end();
  };
  std::vector<SimKey> keys;
  for (ClassifierId id : spec.classifiers) {
    std::vector<std::optional<double>> rs;
    if (uses_r(id)) {
      for (double r : spec.r_grid) rs.emplace_back(r);
    } else {
      rs.emplace_back(std::nullopt);
    }
    for (const auto& r : rs) {
      for (const char* m : {"auc", "ccr0", "ccr1"}) keys.push_back({id, r, m});
      if (id == ClassifierId::Standard || id == ClassifierId::Composite) {
        for (const char* m : {"red0", "red1", "redall"}) keys.push_back({id, r, m});
      }
    }
  }
  const bool need_cccd = wants(ClassifierId::PeCccd) || wants(ClassifierId::Cccd);
  const bool need_std = wants(ClassifierId::Standard) || wants(ClassifierId::PeKnn) || wants(ClassifierId::PeCccd);

  auto compute = [&](int rep) {
    SimDraw draw = draw_replicate(spec, replicate_seed(spec.seed, static_cast<std::uint64_t>(rep)));
    PcdTrainer trainer(draw.train);
    const auto counts = draw.train.class_counts();
    std::vector<Cover> cccd;
    if (need_cccd) {
      for (int j = 0; j < 2; ++j) cccd.push_back(trainer.build_cover(j, CoverKind::Spherical, 1.0, spec.theta));
    }
    std::map<std::pair<int, double>, Metrics> metrics;  // (classifier, r) -> metrics
    std::map<std::pair<int, double>, std::array<double, 3>> reduction;
    auto score = [&](const TrainedModel& m, ClassifierId id, double r) {
      metrics[{static_cast<int>(id), r}] = evaluate(predict_all(m, id, draw.test.x), draw.test.y, 2);
      if (id == ClassifierId::Standard || id == ClassifierId::Composite) {
        const double s0 = static_cast<double>(m.covers[0].prototypes.size());
        const double s1 = static_cast<double>(m.covers[1].prototypes.size());
        reduction[{static_cast<int>(id), r}] = {1.0 - s0 / counts[0], 1.0 - s1 / counts[1],
                                                1.0 - (s0 + s1) / (counts[0] + counts[1])};
      }
    };
    TrainParams base;
    base.theta = spec.theta;
    base.k = spec.k;
    base.with_cccd = false;
    {
      TrainedModel m;
      m.params = base;
      m.n_classes = 2;
      m.dim = spec.d;
      m.train = draw.train;
      m.cccd = cccd;
      if (wants(ClassifierId::Knn)) score(m, ClassifierId::Knn, -1.0);
      if (wants(ClassifierId::Cccd)) score(m, ClassifierId::Cccd, -1.0);
    }
    for (double r : spec.r_grid) {
      TrainParams p = base;
      p.r = r;
      if (need_std) {
        p.kind = CoverKind::Standard;
        TrainedModel m = trainer.fit(p);
        m.cccd = cccd;
        for (auto id : {ClassifierId::Standard, ClassifierId::PeKnn, ClassifierId::PeCccd}) {
          if (wants(id)) score(m, id, r);
        }
      }
      if (wants(ClassifierId::Composite)) {
        p.kind = CoverKind::Composite;
        score(trainer.fit(p), ClassifierId::Composite, r);
      }
    }
    std::vector<double> row;
    row.reserve(keys.size());
    for (const auto& k : keys) {
      const std::pair<int, double> key{static_cast<int>(k.id), k.r ? *k.r : -1.0};
      const Metrics& m = metrics.at(key);
      if (k.metric == "auc") row.push_back(m.auc);
      else if (k.metric == "ccr0") row.push_back(m.ccr[0]);
      else if (k.metric == "ccr1") row.push_back(m.ccr[1]);
      else if (k.metric == "red0") row.push_back(reduction.at(key)[0]);
      else if (k.metric == "red1") row.push_back(reduction.at(key)[1]);
      else row.push_back(reduction.at(key)[2]);
    }
    return row;
  };

  std::vector<Moments> acc(keys.size());
  SimResult result;
  auto accept = [&](int rep, const std::vector<double>& row) {
    for (std::size_t i = 0; i < keys.size(); ++i) acc[i].add(row[i]);
    result.replicates = rep + 1;
    if (result.replicates < spec.min_reps) return false;
    double worst = 0.0;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (keys[i].metric == "auc") worst = std::max(worst, acc[i].se());
    }
    result.max_auc_se = worst;
    return worst < spec.se_target;
  };
  run_batches(spec.batch, spec.threads, spec.max_reps, compute, accept);
  double worst = 0.0;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (keys[i].metric == "auc") worst = std::max(worst, acc[i].se());
  }
  result.max_auc_se = worst;
  result.capped = !(worst < spec.se_target);

  const double q = spec.setting == Setting::Nested ? 1.0 : spec.q;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    result.rows.push_back({to_string(keys[i].id), keys[i].r, q, spec.d, keys[i].metric, acc[i].mean, acc[i].se()});
  }
  return result;
}

TuneResult tune(const SimSpec& spec, ClassifierId id, const std::vector<double>& grid) {
  if (id != ClassifierId::Knn && id != ClassifierId::Cccd)
    throw Error(Errc::InvalidArgument, "tuning is available for knn (k) and cccd (theta)");
  if (grid.empty()) throw Error(Errc::InvalidArgument, "empty parameter grid");
  TuneResult t;
  t.id = id;
  t.grid = grid;
  t.wins.assign(grid.size(), 0);
  t.auc.assign(grid.size(), Moments{});

  auto compute = [&](int rep) {
    SimDraw draw = draw_replicate(spec, replicate_seed(spec.seed, static_cast<std::uint64_t>(rep)));
    std::vector<double> aucs;
    if (id == ClassifierId::Knn) {
      for (double k : grid) {
        std::vector<int> pred;
        for (const auto& z : draw.test.x) pred.push_back(knn_classify(draw.train, z, static_cast<int>(k)));
        aucs.push_back(evaluate(pred, draw.test.y, 2).auc);
      }
    } else {
      std::vector<PointSet> cls{draw.train.class_points(0), draw.train.class_points(1)};
      for (double theta : grid) {
        TrainedModel m;
        m.n_classes = 2;
        m.train = draw.train;
        for (int j = 0; j < 2; ++j) {
          Cover c;
          c.label = j;
          c.kind = CoverKind::Spherical;
          auto s = spherical_mds(cls[j], cls[1 - j], theta);
          c.prototypes = std::move(s.items);
          m.cccd.push_back(std::move(c));
        }
        std::vector<int> pred;
        for (const auto& z : draw.test.x) pred.push_back(cccd_classify(m, z));
        aucs.push_back(evaluate(pred, draw.test.y, 2).auc);
      }
    }
    return aucs;
  };
  auto accept = [&](int rep, const std::vector<double>& aucs) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < aucs.size(); ++i) {
      t.auc[i].add(aucs[i]);
      if (aucs[i] > aucs[best] || (aucs[i] == aucs[best] && grid[i] < grid[best])) best = i;
    }
    ++t.wins[best];
    t.replicates = rep + 1;
    if (t.replicates < spec.min_reps) return false;
    return std::all_of(t.auc.begin(), t.auc.end(), [&](const Moments& m) { return m.se() < spec.se_target; });
  };
  run_batches(spec.batch, spec.threads, spec.max_reps, compute, accept);
  t.capped = !std::all_of(t.auc.begin(), t.auc.end(), [&](const Moments& m) { return m.se() < spec.se_target; });
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (t.wins[i] > t.wins[best] || (t.wins[i] == t.wins[best] && grid[i] < grid[best])) best = i;
  }
  t.best = grid[best];
  return t;
}

std::vector<int> simulate_cell_gamma(const Simplex& cell, int n, double r, int reps, std::uint64_t seed) {
  std::vector<int> out;
  out.reserve(reps);
  const int dp1 = cell.dim() + 1;
  for (int rep = 0; rep < reps; ++rep) {
    std::mt19937_64 rng(replicate_seed(seed, static_cast<std::uint64_t>(rep)));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<BaryCoords> w;
    w.reserve(n);
    for (int i = 0; i < n; ++i) {
      // uniform on the simplex: normalized exponentials
      Eigen::VectorXd e(dp1);
      for (int k = 0; k < dp1; ++k) e[k] = -std::log1p(-u(rng));
      w.push_back(BaryCoords{e / e.sum()});
    }
    out.push_back(static_cast<int>(exact_mds_cell(w, r).size()));
  }
  return out;
}

}  // namespace pcd
