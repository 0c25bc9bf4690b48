// pcd: command-line driver for PE-PCD covers, classifiers and simulations.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "pcd/eval.hpp"
#include "pcd/io.hpp"
#include "pcd/pca.hpp"
#include "pcd/stats.hpp"

using namespace pcd;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> out;
  auto num = [&](const std::string& t) {
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || *end != '\0' || !std::isfinite(v)) throw UsageError("bad number '" + t + "' in grid '" + s + "'");
    return v;
  };
  if (s.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(p);
    if (parts.size() != 3) throw UsageError("range grid must look like start:stop:step");
    const double a = num(parts[0]), b = num(parts[1]), step = num(parts[2]);
    if (!(step > 0) || b < a) throw UsageError("range grid needs step > 0 and stop >= start");
    const int n = static_cast<int>(std::floor((b - a) / step + 1e-9));
    for (int i = 0; i <= n; ++i) out.push_back(std::round((a + i * step) * 1e12) / 1e12);
    return out;
  }
  std::stringstream ss(s);
  std::string p;
  while (std::getline(ss, p, ',')) out.push_back(num(p));
  if (out.empty()) throw UsageError("empty grid");
  return out;
}

struct Common {
  std::string input;
  std::string label_column;
  bool no_header = false;
};

void add_input(CLI::App* sub, Common& c, bool required = true) {
  auto* o = sub->add_option("-i,--input", c.input, "CSV file");
  if (required) o->required();
  sub->add_option("--label-column", c.label_column, "label column name or 0-based index (default: last)");
  sub->add_flag("--no-header", c.no_header, "first row is data");
}

LabeledTable read_table(const Common& c, const std::vector<std::string>& classes = {}, bool closed = false) {
  CsvOptions o;
  o.header = !c.no_header;
  o.label_column = c.label_column;
  o.classes = classes;
  o.closed_classes = closed;
  return load_csv(c.input, o);
}

int find_class(const LabeledTable& t, const std::string& name) {
  if (name.empty()) return 0;
  for (std::size_t i = 0; i < t.class_names.size(); ++i) {
    if (t.class_names[i] == name) return static_cast<int>(i);
  }
  throw UsageError("class '" + name + "' not present in the input");
}

std::string output_text(const json& j) { return j.dump(2) + "\n"; }

// Input plus an optional reference file of non-target rows: returns the
// combined table where the reference rows carry their own labels, or the
// label "reference" if unlabeled.
LabeledTable with_reference(LabeledTable t, const std::string& reference, bool no_header) {
  if (reference.empty()) return t;
  CsvOptions o;
  o.header = !no_header;
  o.label_column = "none";
  LabeledTable ref = load_csv(reference, o);
  if (ref.dim() != t.dim()) throw UsageError("reference file dimension differs from the input");
  int label = static_cast<int>(t.class_names.size());
  t.class_names.push_back("reference");
  for (auto& p : ref.x) {
    t.x.push_back(std::move(p));
    t.y.push_back(label);
  }
  return t;
}

// key=value files without sections: keys that are not global options belong
// to the subcommand given on the command line. Sectioned or dotted keys work too.
class FlatConfig : public CLI::ConfigBase {
 public:
  explicit FlatConfig(CLI::App* app) : app_(app) {}

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    auto items = CLI::ConfigBase::from_config(in);
    const auto subs = app_->get_subcommands();
    if (subs.empty()) return items;
    const std::string sub = subs.front()->get_name();
    for (auto& item : items) {
      if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == "default")) continue;
      if (app_->get_option_no_throw("--" + item.name) != nullptr) continue;
      item.parents = {sub};
    }
    return items;
  }

 private:
  CLI::App* app_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PE-PCD class covers, classifiers and simulations"};
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "read options from a key=value file (command.option=value); flags win");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.config_formatter(std::make_shared<FlatConfig>(&app));
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(PCD_VERSION));

  std::uint64_t seed = 1;
  if (const char* env = std::getenv("PCD_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*env != '\0' && *end == '\0') seed = v;
  }
  std::string profile = "ci";
  app.add_option("--seed", seed, "master seed (default from PCD_SEED)");
  app.add_option("--profile", profile, "ci or full: SE target and replicate cap")->check(CLI::IsMember({"ci", "full"}));

  // tessellate
  Common tes_in;
  std::string tes_class, tes_out;
  auto* tes = app.add_subcommand("tessellate", "Delaunay tessellation of one class (or all rows)");
  add_input(tes, tes_in);
  tes->add_option("--class", tes_class, "class whose points are tessellated (default: all rows)");
  tes->add_option("-o,--output", tes_out, "output JSON")->required();

  // mds
  Common mds_in;
  std::string mds_target, mds_kind = "standard", mds_out, mds_ref;
  double mds_r = 3.0, mds_theta = 1.0;
  auto* mds = app.add_subcommand("mds", "minimum dominating set of one class");
  add_input(mds, mds_in);
  mds->add_option("--target", mds_target, "target class (default: first seen)");
  mds->add_option("--reference", mds_ref, "non-target points when the input has a single class");
  mds->add_option("--kind", mds_kind, "standard, composite or spherical")
      ->check(CLI::IsMember({"standard", "composite", "spherical"}));
  mds->add_option("--r", mds_r, "expansion parameter")->check(CLI::Range(1.0, 1e9));
  mds->add_option("--theta", mds_theta, "CCCD radius parameter")->check(CLI::Range(0.0, 1.0));
  mds->add_option("-o,--output", mds_out, "output JSON")->required();

  // train
  Common tr_in;
  std::string tr_kind = "standard", tr_out;
  double tr_r = 3.0, tr_theta = 1.0;
  int tr_k = 1;
  auto* tr = app.add_subcommand("train", "train class covers and baselines");
  add_input(tr, tr_in);
  tr->add_option("--kind", tr_kind, "standard, composite or spherical")
      ->check(CLI::IsMember({"standard", "composite", "spherical"}));
  tr->add_option("--r", tr_r, "expansion parameter")->check(CLI::Range(1.0, 1e9));
  tr->add_option("--theta", tr_theta, "CCCD radius parameter")->check(CLI::Range(0.0, 1.0));
  tr->add_option("--k", tr_k, "neighbors for kNN")->check(CLI::PositiveNumber);
  tr->add_option("-o,--output", tr_out, "model JSON")->required();

  // predict
  Common pr_in;
  std::string pr_model, pr_classifier, pr_out;
  auto* pr = app.add_subcommand("predict", "label points with a trained model");
  add_input(pr, pr_in);
  pr->add_option("-m,--model", pr_model, "model JSON")->required();
  pr->add_option("--classifier", pr_classifier, "standard|composite|pe-knn|pe-cccd|knn|cccd (default: cover)");
  pr->add_option("-o,--output", pr_out, "output CSV")->required();

  // evaluate
  Common ev_in;
  std::string ev_model, ev_classifier, ev_a, ev_b, ev_out;
  double ev_r = 3.0, ev_theta = 1.0;
  int ev_k = 1, ev_pca = 0;
  auto* ev = app.add_subcommand("evaluate", "test-set metrics of a model, or a 5x2 CV comparison (--compare)");
  add_input(ev, ev_in);
  ev->add_option("-m,--model", ev_model, "model JSON (test-set mode)");
  ev->add_option("--classifier", ev_classifier, "classifier for test-set mode (default: cover)");
  auto* cmp = ev->add_option("--compare", ev_a, "first classifier for 5x2 CV");
  ev->add_option("--against", ev_b, "second classifier for 5x2 CV")->needs(cmp);
  ev->add_option("--r", ev_r, "expansion parameter for CV")->check(CLI::Range(1.0, 1e9));
  ev->add_option("--theta", ev_theta, "CCCD parameter for CV")->check(CLI::Range(0.0, 1.0));
  ev->add_option("--k", ev_k, "kNN parameter for CV")->check(CLI::PositiveNumber);
  ev->add_option("--pca-dim", ev_pca, "reduce with PCA fitted on each training half")->check(CLI::NonNegativeNumber);
  ev->add_option("-o,--output", ev_out, "output JSON")->required();

  // simulate
  std::string sim_setting = "overlap", sim_grid = "3", sim_classifiers = "standard,composite,pe-knn,pe-cccd,knn,cccd";
  std::string sim_out, sim_ndjson;
  double sim_zeta = 0.5, sim_q = 0.1, sim_theta = 1.0, sim_nu = -1.0, sim_se = -1.0;
  int sim_d = 2, sim_n0 = 400, sim_k = 1, sim_test = 100, sim_min = 20, sim_max = -1, sim_threads = 1;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo study on uniform classes");
  sim->add_option("--setting", sim_setting, "overlap or nested")->check(CLI::IsMember({"overlap", "nested"}));
  sim->add_option("--d", sim_d, "dimension")->check(CLI::Range(1, kMaxDimension));
  sim->add_option("--zeta", sim_zeta, "overlap ratio")->check(CLI::Range(0.0, 1.0));
  sim->add_option("--nu", sim_nu, "explicit shift (overrides zeta)");
  sim->add_option("--n0", sim_n0, "majority size (nested: size of each class)")->check(CLI::PositiveNumber);
  sim->add_option("--q", sim_q, "imbalance n1/n0")->check(CLI::Range(1e-9, 1.0));
  sim->add_option("--r-grid", sim_grid, "expansion values: a,b,c or start:stop:step");
  sim->add_option("--theta", sim_theta, "CCCD parameter")->check(CLI::Range(0.0, 1.0));
  sim->add_option("--k", sim_k, "kNN parameter")->check(CLI::PositiveNumber);
  sim->add_option("--test-size", sim_test, "test points per class")->check(CLI::PositiveNumber);
  sim->add_option("--se-target", sim_se, "stop when every AUC SE is below this (default from profile)");
  sim->add_option("--min-reps", sim_min, "minimum replicates")->check(CLI::PositiveNumber);
  sim->add_option("--max-reps", sim_max, "replicate cap (default from profile)");
  sim->add_option("--classifiers", sim_classifiers, "comma-separated classifier list");
  sim->add_option("--threads", sim_threads, "worker threads; results do not depend on it")->check(CLI::PositiveNumber);
  sim->add_option("-o,--output", sim_out, "long-format CSV")->required();
  sim->add_option("--ndjson", sim_ndjson, "also write NDJSON rows here");

  // tune
  std::string tu_classifier = "knn", tu_grid, tu_out, tu_setting = "overlap";
  double tu_zeta = 0.5, tu_q = 0.1, tu_se = -1.0;
  int tu_d = 2, tu_n0 = 400, tu_test = 100, tu_min = 20, tu_max = -1, tu_threads = 1;
  auto* tu = app.add_subcommand("tune", "pilot study picking k or theta by most wins");
  tu->add_option("--classifier", tu_classifier, "knn or cccd")->check(CLI::IsMember({"knn", "cccd"}));
  tu->add_option("--grid", tu_grid, "parameter grid (default: k=1..30 or theta=0:1:0.1)");
  tu->add_option("--setting", tu_setting, "overlap or nested")->check(CLI::IsMember({"overlap", "nested"}));
  tu->add_option("--d", tu_d, "dimension")->check(CLI::Range(1, kMaxDimension));
  tu->add_option("--zeta", tu_zeta, "overlap ratio")->check(CLI::Range(0.0, 1.0));
  tu->add_option("--n0", tu_n0, "majority size")->check(CLI::PositiveNumber);
  tu->add_option("--q", tu_q, "imbalance n1/n0")->check(CLI::Range(1e-9, 1.0));
  tu->add_option("--test-size", tu_test, "test points per class")->check(CLI::PositiveNumber);
  tu->add_option("--se-target", tu_se, "SE target (default from profile)");
  tu->add_option("--min-reps", tu_min, "minimum replicates")->check(CLI::PositiveNumber);
  tu->add_option("--max-reps", tu_max, "replicate cap (default from profile)");
  tu->add_option("--threads", tu_threads, "worker threads")->check(CLI::PositiveNumber);
  tu->add_option("-o,--output", tu_out, "output JSON")->required();

  // pca
  Common pc_in;
  int pc_dim = 2;
  std::string pc_out;
  auto* pc = app.add_subcommand("pca", "project features on the leading principal components");
  add_input(pc, pc_in);
  pc->add_option("--dim", pc_dim, "number of components")->check(CLI::PositiveNumber);
  pc->add_option("-o,--output", pc_out, "output CSV")->required();

  // export-cover
  Common ex_in;
  std::string ex_kind = "standard", ex_out, ex_svg, ex_ref;
  double ex_r = 3.0, ex_theta = 1.0;
  auto* ex = app.add_subcommand("export-cover", "explicit cover geometry (JSON, optional SVG for d=2)");
  add_input(ex, ex_in);
  ex->add_option("--reference", ex_ref, "non-target points when the input has a single class");
  ex->add_option("--kind", ex_kind, "standard, composite or spherical")
      ->check(CLI::IsMember({"standard", "composite", "spherical"}));
  ex->add_option("--r", ex_r, "expansion parameter")->check(CLI::Range(1.0, 1e9));
  ex->add_option("--theta", ex_theta, "CCCD parameter")->check(CLI::Range(0.0, 1.0));
  ex->add_option("-o,--output", ex_out, "output JSON")->required();
  ex->add_option("--svg", ex_svg, "also draw the covers as SVG");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  CLI::App* cmd = app.get_subcommands().front();
  const bool full = profile == "full";
  json prov;
  prov["command"] = cmd->get_name();
  {
    // keep global options and those of the command that ran
    std::istringstream all(app.config_to_str(true, false));
    std::string line, kept;
    const std::string prefix = cmd->get_name() + ".";
    while (std::getline(all, line)) {
      const auto eq = line.find('=');
      const std::string key = line.substr(0, eq);
      if (key.rfind(prefix, 0) == 0) {
        kept += line.substr(prefix.size()) + "\n";
      } else if (key.find('.') == std::string::npos) {
        kept += line + "\n";
      }
    }
    prov["config"] = kept;
  }
  prov["seed"] = seed;
  prov["version"] = PCD_VERSION;

  try {
    if (cmd == tes) {
      LabeledTable t = read_table(tes_in);
      PointSet pts;
      if (tes_class.empty()) {
        pts = t.x;
      } else {
        const int j = find_class(t, tes_class);
        for (std::size_t i = 0; i < t.x.size(); ++i) {
          if (t.y[i] == j) pts.push_back(t.x[i]);
        }
      }
      Tessellation tess = Tessellation::build(pts);
      json j;
      j["provenance"] = prov;
      j["tessellation"] = tessellation_to_json(tess);
      write_atomic(tes_out, output_text(j));
    } else if (cmd == mds) {
      LabeledTable t = with_reference(read_table(mds_in), mds_ref, mds_in.no_header);
      const int target = find_class(t, mds_target);
      PointSet targets, rest;
      std::vector<int> rows;
      for (std::size_t i = 0; i < t.x.size(); ++i) {
        if (t.y[i] == target) {
          targets.push_back(t.x[i]);
          rows.push_back(static_cast<int>(i));
        } else {
          rest.push_back(t.x[i]);
        }
      }
      if (rest.empty()) throw UsageError("no non-target points: add classes to the input or pass --reference");
      PrototypeSet s;
      if (mds_kind == "spherical") {
        s = spherical_mds(targets, rest, mds_theta);
      } else {
        Tessellation tess = Tessellation::build(rest);
        s = mds_kind == "standard" ? standard_mds(targets, tess, mds_r) : composite_mds(targets, rest, tess, mds_r, mds_theta);
      }
      DominationStats st = domination_statistics(s, static_cast<int>(targets.size()));
      json protos = json::array(), detail = json::array();
      for (const auto& p : s.items) {
        protos.push_back(rows[p.index]);
        detail.push_back({{"row", rows[p.index]},
                          {"provenance", to_string(p.provenance)},
                          {"component", p.component},
                          {"region", region_to_json(p.region)}});
      }
      json j;
      j["provenance"] = prov;
      j["target"] = t.class_names[target];
      j["kind"] = mds_kind;
      j["prototypes"] = protos;
      j["per_cell_gamma"] = st.cell_gamma;
      j["per_outer_gamma"] = st.outer_gamma;
      j["size"] = st.total;
      j["n_targets"] = st.n_targets;
      j["reduction"] = st.reduction ? json(*st.reduction) : json(nullptr);
      j["regions"] = detail;
      write_atomic(mds_out, output_text(j));
    } else if (cmd == tr) {
      LabeledTable t = read_table(tr_in);
      if (t.class_names.size() < 2) throw UsageError("training needs at least two classes");
      TrainParams p;
      p.kind = cover_kind_from_string(tr_kind);
      p.r = tr_r;
      p.theta = tr_theta;
      p.k = tr_k;
      TrainedModel m = train_model(t.points(), p);
      m.class_names = t.class_names;
      json j = model_to_json(m);
      j["provenance"] = prov;
      write_atomic(tr_out, output_text(j));
    } else if (cmd == pr) {
      std::ifstream in(pr_model);
      if (!in) throw UsageError("cannot open model " + pr_model);
      TrainedModel m = model_from_json(json::parse(in));
      Common c = pr_in;
      if (c.label_column.empty()) c.label_column = "none";
      LabeledTable t = read_table(c, m.class_names, false);
      if (t.dim() != m.dim) throw UsageError("input dimension does not match the model");
      const ClassifierId id = pr_classifier.empty()
                                  ? (m.params.kind == CoverKind::Composite ? ClassifierId::Composite : ClassifierId::Standard)
                                  : classifier_from_string(pr_classifier);
      std::ostringstream s;
      s << provenance_comments(prov) << "row,label";
      for (const auto& name : m.class_names) s << ",rho_" << name;
      s << "\n";
      for (std::size_t i = 0; i < t.x.size(); ++i) {
        const int label = predict_one(m, id, t.x[i]);
        const Prediction cp = cover_classify(m, t.x[i]);
        s << i << "," << (label >= 0 ? m.class_names[label] : std::string("NA"));
        for (double r : cp.rho) s << "," << r;
        s << "\n";
      }
      write_atomic(pr_out, s.str());
    } else if (cmd == ev) {
      json j;
      j["provenance"] = prov;
      if (!ev_a.empty()) {
        if (ev_b.empty()) throw UsageError("--compare needs --against");
        LabeledTable t = read_table(ev_in);
        ClassifierSpec a{classifier_from_string(ev_a), ev_r, ev_theta, ev_k};
        ClassifierSpec b{classifier_from_string(ev_b), ev_r, ev_theta, ev_k};
        CvTestResult r = five_by_two_cv(t.points(), a, b, seed, ev_pca);
        j["a"] = ev_a;
        j["b"] = ev_b;
        j["auc_a"] = r.auc_a;
        j["auc_b"] = r.auc_b;
        j["diff"] = r.diff;
        j["t"] = std::isfinite(r.t) ? json(r.t) : json(nullptr);
        j["t_p"] = r.t_p;
        j["f"] = std::isfinite(r.f) ? json(r.f) : json(nullptr);
        j["f_p"] = r.f_p;
        j["degenerate_variance"] = r.degenerate;
        j["folds"] = r.folds;
      } else {
        if (ev_model.empty()) throw UsageError("evaluate needs --model or --compare");
        std::ifstream in(ev_model);
        if (!in) throw UsageError("cannot open model " + ev_model);
        TrainedModel m = model_from_json(json::parse(in));
        LabeledTable t = read_table(ev_in, m.class_names, true);
        if (t.dim() != m.dim) throw UsageError("input dimension does not match the model");
        const ClassifierId id = ev_classifier.empty()
                                    ? (m.params.kind == CoverKind::Composite ? ClassifierId::Composite : ClassifierId::Standard)
                                    : classifier_from_string(ev_classifier);
        Metrics met = evaluate(predict_all(m, id, t.x), t.y, m.n_classes);
        j["classifier"] = to_string(id);
        j["class_names"] = m.class_names;
        j["ccr"] = met.ccr;
        j["auc"] = met.auc;
        if (m.n_classes == 2 && (id == ClassifierId::Standard || id == ClassifierId::Composite)) {
          std::vector<double> score;
          for (const auto& z : t.x) score.push_back(cover_score(m, z));
          j["score_auc"] = roc_auc(score, t.y);
        }
      }
      write_atomic(ev_out, output_text(j));
    } else if (cmd == sim) {
      SimSpec s;
      s.setting = sim_setting == "nested" ? Setting::Nested : Setting::Overlap;
      s.d = sim_d;
      s.zeta = sim_zeta;
      if (sim_nu >= 0.0) s.nu = sim_nu;
      s.n0 = sim_n0;
      s.q = sim_q;
      s.r_grid = parse_grid(sim_grid);
      s.theta = sim_theta;
      s.k = sim_k;
      s.test_per_class = sim_test;
      s.se_target = sim_se > 0 ? sim_se : (full ? 0.0005 : 0.005);
      s.min_reps = sim_min;
      s.max_reps = sim_max > 0 ? sim_max : (full ? 10000 : 1000);
      s.threads = sim_threads;
      s.seed = seed;
      s.classifiers.clear();
      std::stringstream cs(sim_classifiers);
      std::string name;
      while (std::getline(cs, name, ',')) s.classifiers.push_back(classifier_from_string(name));
      if (s.classifiers.empty()) throw UsageError("no classifiers selected");
      if (s.test_per_class < 1) throw UsageError("test size must be positive");
      SimResult r = run_simulation(s);
      prov["replicates"] = r.replicates;
      prov["max_auc_se"] = r.max_auc_se;
      prov["se_target"] = s.se_target;
      prov["capped"] = r.capped;
      std::ostringstream csv, nd;
      csv << provenance_comments(prov) << "classifier,r,q,d,metric,value,se\n";
      csv.precision(10);
      for (const auto& row : r.rows) {
        csv << row.classifier << "," << (row.r ? std::to_string(*row.r).substr(0, 8) : std::string("NA")) << ","
            << row.q << "," << row.d << "," << row.metric << "," << row.value << "," << row.se << "\n";
        json jr = {{"classifier", row.classifier}, {"r", row.r ? json(*row.r) : json(nullptr)}, {"q", row.q},
                   {"d", row.d},                   {"metric", row.metric},                     {"value", row.value},
                   {"se", row.se}};
        nd << jr.dump() << "\n";
      }
      write_atomic(sim_out, csv.str());
      if (!sim_ndjson.empty()) write_atomic(sim_ndjson, json({{"provenance", prov}}).dump() + "\n" + nd.str());
    } else if (cmd == tu) {
      SimSpec s;
      s.setting = tu_setting == "nested" ? Setting::Nested : Setting::Overlap;
      s.d = tu_d;
      s.zeta = tu_zeta;
      s.n0 = tu_n0;
      s.q = tu_q;
      s.test_per_class = tu_test;
      s.se_target = tu_se > 0 ? tu_se : (full ? 0.0005 : 0.005);
      s.min_reps = tu_min;
      s.max_reps = tu_max > 0 ? tu_max : (full ? 10000 : 1000);
      s.threads = tu_threads;
      s.seed = seed;
      const ClassifierId id = classifier_from_string(tu_classifier);
      std::vector<double> grid;
      if (!tu_grid.empty()) {
        grid = parse_grid(tu_grid);
      } else if (id == ClassifierId::Knn) {
        grid = parse_grid("1:30:1");
      } else {
        grid = parse_grid("0:1:0.1");
      }
      if (id == ClassifierId::Knn) {
        const int n_train = s.n0 + minority_size(s);
        for (double k : grid) {
          if (k < 1 || k != std::floor(k) || k > n_train) throw UsageError("k grid must hold integers in [1, n]");
        }
      } else {
        for (double th : grid) {
          if (th < 0 || th > 1) throw UsageError("theta grid must lie in [0, 1]");
        }
      }
      TuneResult r = tune(s, id, grid);
      json j;
      j["provenance"] = prov;
      j["classifier"] = tu_classifier;
      j["grid"] = r.grid;
      j["wins"] = r.wins;
      json means = json::array(), ses = json::array();
      for (const auto& m : r.auc) {
        means.push_back(m.mean);
        ses.push_back(m.se());
      }
      j["mean_auc"] = means;
      j["auc_se"] = ses;
      j["best"] = r.best;
      j["replicates"] = r.replicates;
      j["capped"] = r.capped;
      write_atomic(tu_out, output_text(j));
    } else if (cmd == pc) {
      LabeledTable t = read_table(pc_in);
      if (pc_dim > t.dim()) throw UsageError("--dim exceeds the number of features");
      Pca p = fit_pca(t.x, pc_dim);
      prov["explained_variance"] = p.explained();
      std::ostringstream s;
      s.precision(12);
      s << provenance_comments(prov);
      for (int k = 0; k < p.out_dim(); ++k) s << "pc" << (k + 1) << ",";
      s << "label\n";
      for (std::size_t i = 0; i < t.x.size(); ++i) {
        const Point z = p.transform(t.x[i]);
        for (int k = 0; k < z.size(); ++k) s << z[k] << ",";
        s << t.class_names[t.y[i]] << "\n";
      }
      write_atomic(pc_out, s.str());
    } else if (cmd == ex) {
      LabeledTable t = with_reference(read_table(ex_in), ex_ref, ex_in.no_header);
      if (t.class_names.size() < 2) throw UsageError("need a second class or --reference");
      TrainParams p;
      p.kind = cover_kind_from_string(ex_kind);
      p.r = ex_r;
      p.theta = ex_theta;
      p.with_cccd = false;
      TrainedModel m = train_model(t.points(), p);
      m.class_names = t.class_names;
      json j;
      j["provenance"] = prov;
      j["covers"] = cover_geometry_json(m);
      write_atomic(ex_out, output_text(j));
      if (!ex_svg.empty()) write_atomic(ex_svg, cover_svg(m));
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    switch (e.code()) {
      case Errc::InvalidArgument:
      case Errc::ParseError:
      case Errc::MissingLabel:
      case Errc::NonNumericFeature:
      case Errc::DimensionTooLarge:
      case Errc::MissingClass:
      case Errc::EmptyClass:
        return 2;
      default:
        return 1;
    }
  } catch (const json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
