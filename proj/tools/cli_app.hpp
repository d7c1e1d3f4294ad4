#pragma once

// Command-line front end: synth, fit, sweep, eval, perdim.
//
// Exit codes: 0 when every requested computation converged, 2 when results
// were written but some items failed or stopped short (listed under
// "failures" in the JSON), 1 for usage and input errors.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sdris/datasets.hpp"
#include "sdris/protocol.hpp"
#include "sdris/sweep.hpp"

namespace sdris::cli {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

inline constexpr int kFormatVersion = 1;
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitPartial = 2;

struct CommonOptions {
  std::uint64_t seed = 0;
  std::string out = "out";
  double tol = 1e-6;
  int max_iters = 2000;
  int jobs = 1;

  json to_json() const {
    return {{"seed", seed}, {"out", out}, {"tol", tol}, {"max_iters", max_iters}, {"jobs", jobs}};
  }
};

inline void add_common(CLI::App* sub, CommonOptions& c) {
  sub->add_option("--seed", c.seed, "Seed for every random substream")->capture_default_str();
  sub->add_option("--out", c.out, "Output directory")->capture_default_str();
  sub->add_option("--tol", c.tol, "Gradient tolerance of the outer ascent")->capture_default_str();
  sub->add_option("--max-iters", c.max_iters, "Outer iteration cap per start")->capture_default_str();
  sub->add_option("--jobs", c.jobs, "Worker threads")->capture_default_str();
}

inline FitOptions fit_options(const CommonOptions& c, int restarts) {
  FitOptions f;
  f.seed = c.seed;
  f.grad_tol = c.tol;
  f.max_outer_iters = c.max_iters;
  f.jobs = c.jobs;
  f.restarts = restarts;
  return f;
}

inline json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json fit_json(const FitResult& r, const std::vector<std::string>& x_labels,
                     bool with_trace) {
  json j = {{"converged", r.converged},
            {"diverged", r.diverged},
            {"termination", r.termination},
            {"objective", r.objective_value},
            {"info_plus", r.info_plus},
            {"info_minus", r.info_minus},
            {"grad_norm", r.grad_norm},
            {"iterations", r.iterations},
            {"evaluations", r.evaluations},
            {"start_index", r.start_index},
            {"seed", r.seed},
            {"x_labels", x_labels},
            {"phi", matrix_json(r.phi.values())}};
  if (with_trace) {
    json t = json::array();
    for (const auto& p : r.trace) t.push_back({{"objective", p.objective}, {"grad_norm", p.grad_norm}});
    j["trace"] = std::move(t);
  }
  return j;
}

inline std::vector<std::string> feature_labels(Eigen::Index d) {
  std::vector<std::string> l;
  for (Eigen::Index k = 0; k < d; ++k) l.push_back("phi_" + std::to_string(k + 1));
  return l;
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline void write_json(const fs::path& path, json j, const Timer& timer) {
  j["wall_time_seconds"] = timer.seconds();
  write_file_atomic(path, j.dump(2) + "\n");
}

inline json envelope(const std::string& command, json config) {
  return {{"format_version", kFormatVersion}, {"command", command}, {"config", std::move(config)}};
}

// ---------------------------------------------------------------------------
// Labels: a two-column CSV "sample,label" keyed by the relevance table's y
// labels.

struct SampleLabels {
  std::vector<int> ids;                  // aligned with the table's columns
  std::vector<std::string> class_names;  // id -> name
};

inline SampleLabels load_labels(const fs::path& path, const std::vector<std::string>& samples) {
  const std::string text = detail::read_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || detail::split_csv_line(line) != std::vector<std::string>{"sample", "label"})
    throw ParseError(path.string() + ": header must be 'sample,label'");
  std::map<std::string, std::string> by_sample;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != 2 || cells[0].empty() || cells[1].empty())
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected sample,label");
    if (!by_sample.emplace(cells[0], cells[1]).second)
      throw ParseError(path.string() + ": duplicate sample '" + cells[0] + "'");
  }
  std::set<std::string> names;
  for (const auto& s : samples) {
    auto it = by_sample.find(s);
    if (it == by_sample.end()) throw ParseError(path.string() + ": no label for sample '" + s + "'");
    names.insert(it->second);
  }
  SampleLabels out;
  out.class_names.assign(names.begin(), names.end());
  for (const auto& s : samples) {
    const auto pos = std::find(out.class_names.begin(), out.class_names.end(), by_sample[s]);
    out.ids.push_back(static_cast<int>(pos - out.class_names.begin()));
  }
  return out;
}

inline std::string format_labels(const std::vector<std::string>& samples,
                                 const std::vector<std::string>& labels) {
  std::string s = "sample,label\n";
  for (std::size_t i = 0; i < samples.size(); ++i) s += samples[i] + "," + labels[i] + "\n";
  return s;
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  CommonOptions common;
  std::string kind = "conflicting";
  SynthSpec conflicting;
  NuisanceSpec nuisance;
};

inline int cmd_synth(SynthArgs a) {
  Timer timer;
  const fs::path out(a.common.out);
  json config = a.common.to_json();
  config["kind"] = a.kind;
  json files = json::array();
  if (a.kind == "conflicting") {
    SynthSpec& s = a.conflicting;
    s.seed = a.common.seed;
    s.validate();
    config["spec"] = {{"nx", s.nx},
                      {"ny", s.ny},
                      {"strong_amplitude", s.strong_amplitude},
                      {"weak_amplitude", s.weak_amplitude},
                      {"noise_level", s.noise_level},
                      {"seed", s.seed}};
    const SynthConflicting d = synth_conflicting(s);
    Matrix planted(s.nx, 2);
    planted << d.strong, d.weak;
    save_csv(out / "plus.csv", d.plus);
    save_csv(out / "minus.csv", d.minus);
    write_file_atomic(out / "planted.csv", format_csv(planted, d.plus.x_labels(), {"strong", "weak"}));
    files = {"plus.csv", "minus.csv", "planted.csv"};
  } else if (a.kind == "nuisance") {
    NuisanceSpec& s = a.nuisance;
    s.seed = a.common.seed;
    s.validate();
    config["spec"] = {{"n_classes", s.n_classes},
                      {"per_class", s.per_class},
                      {"n_features", s.n_features},
                      {"signal_dims", s.signal_dims},
                      {"nuisance_dims", s.nuisance_dims},
                      {"signal_strength", s.signal_strength},
                      {"nuisance_strength", s.nuisance_strength},
                      {"within_class_spread", s.within_class_spread},
                      {"n_irrelevance", s.n_irrelevance},
                      {"seed", s.seed}};
    const NuisanceClasses d = synth_nuisance_classes(s);
    Matrix planted(s.n_features, s.signal_dims + s.nuisance_dims);
    planted << d.signal_profiles, d.nuisance_profiles;
    std::vector<std::string> names;
    for (int k = 0; k < s.signal_dims; ++k) names.push_back("signal_" + std::to_string(k + 1));
    for (int k = 0; k < s.nuisance_dims; ++k) names.push_back("nuisance_" + std::to_string(k + 1));
    std::vector<std::string> labels;
    for (int l : d.labels) labels.push_back("class_" + std::to_string(l));
    save_csv(out / "plus.csv", d.plus);
    save_csv(out / "minus.csv", d.minus);
    write_file_atomic(out / "planted.csv", format_csv(planted, d.plus.x_labels(), names));
    write_file_atomic(out / "labels.csv", format_labels(d.plus.y_labels(), labels));
    files = {"plus.csv", "minus.csv", "planted.csv", "labels.csv"};
  } else {
    throw InvalidArgument("unknown --kind '" + a.kind + "' (conflicting, nuisance)");
  }
  json j = envelope("synth", config);
  j["files"] = files;
  write_json(out / "manifest.json", j, timer);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// fit

struct FitArgs {
  CommonOptions common;
  std::string plus, minus;
  double lambda = 0.0;
  Eigen::Index dim = 1;
  int restarts = 5;
};

inline int cmd_fit(const FitArgs& a) {
  Timer timer;
  const fs::path out(a.common.out);
  if (a.minus.empty() && a.lambda != 0.0)
    throw InvalidArgument("--minus is required when --lambda is nonzero");
  const JointTable plus = load_csv(a.plus);
  const JointTable minus = a.minus.empty() ? plus : load_csv(a.minus);
  json config = a.common.to_json();
  config.update({{"plus", a.plus}, {"minus", a.minus}, {"lambda", a.lambda}, {"dim", a.dim},
                 {"restarts", a.restarts}});
  json j = envelope("fit", config);
  const Objective obj{a.lambda, plus, minus, a.dim};
  obj.validate();
  const FitOptions f = fit_options(a.common, a.restarts);
  f.validate();
  try {
    const FitResult r = fit(obj, f);
    j["result"] = fit_json(r, plus.x_labels(), true);
    j["failures"] = r.converged ? json::array() : json::array({"fit: " + r.termination});
    write_file_atomic(out / "phi.csv",
                      format_csv(r.phi.values(), plus.x_labels(), feature_labels(a.dim)));
    write_json(out / "fit.json", j, timer);
    return r.converged ? kExitOk : kExitPartial;
  } catch (const InvalidArgument&) {
    throw;
  } catch (const Error& e) {
    j["error"] = e.what();
    j["failures"] = json::array({std::string("fit: ") + e.what()});
    write_json(out / "fit.json", j, timer);
    std::cerr << "sdris fit: " << e.what() << "\n";
    return kExitPartial;
  }
}

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
  CommonOptions common;
  std::string plus, minus;
  Eigen::Index dim = 1;
  std::vector<double> lambdas;
  double lambda_min = 0.0, lambda_max = 1.0;
  int points = 30;
  int restarts = 1;
};

inline std::vector<double> sweep_grid(const SweepArgs& a) {
  if (!a.lambdas.empty()) return a.lambdas;
  if (a.points < 1) throw InvalidArgument("--points must be >= 1");
  if (a.points == 1) return {a.lambda_min};
  std::vector<double> g;
  for (int i = 0; i < a.points; ++i)
    g.push_back(a.lambda_min + (a.lambda_max - a.lambda_min) * i / (a.points - 1));
  return g;
}

inline std::string sweep_csv(const SweepResult& r) {
  std::string s = "lambda,branch,info_plus,info_minus,objective,converged\n";
  for (const auto* pts : {&r.up_branch, &r.down_branch})
    for (const auto& p : *pts) {
      s += detail::format_double(p.lambda) + "," + to_string(pts == &r.up_branch ? Branch::up : Branch::down);
      if (p.fit)
        s += "," + detail::format_double(p.fit->info_plus) + "," +
             detail::format_double(p.fit->info_minus) + "," +
             detail::format_double(p.fit->objective_value) + "," +
             (p.fit->converged ? "true" : "false") + "\n";
      else
        s += ",,,,false\n";
    }
  return s;
}

inline int cmd_sweep(const SweepArgs& a) {
  Timer timer;
  const fs::path out(a.common.out);
  const JointTable plus = load_csv(a.plus);
  const JointTable minus = load_csv(a.minus);
  const std::vector<double> grid = sweep_grid(a);
  json config = a.common.to_json();
  config.update({{"plus", a.plus}, {"minus", a.minus}, {"dim", a.dim}, {"lambdas", grid},
                 {"restarts", a.restarts}});
  SweepOptions o;
  o.fit = fit_options(a.common, a.restarts);
  const SweepResult r = sweep_lambda(Objective{grid.front(), plus, minus, a.dim}, grid, o);

  json j = envelope("sweep", config);
  j["jump_threshold"] = r.jump_threshold;
  j["hysteresis_tolerance"] = r.hysteresis_tolerance;
  json failures = json::array();
  json branches = json::object();
  for (const Branch b : {Branch::up, Branch::down}) {
    const auto& pts = b == Branch::up ? r.up_branch : r.down_branch;
    json arr = json::array();
    for (const auto& p : pts) {
      json e = {{"lambda", p.lambda}, {"from_warm_start", p.from_warm_start}};
      const std::string where = std::string(to_string(b)) + " lambda=" + detail::format_double(p.lambda);
      if (p.fit) {
        e["fit"] = fit_json(*p.fit, plus.x_labels(), false);
        if (!p.fit->converged) failures.push_back(where + ": " + p.fit->termination);
      } else {
        e["error"] = p.error;
        failures.push_back(where + ": " + p.error);
      }
      arr.push_back(std::move(e));
    }
    branches[to_string(b)] = std::move(arr);
  }
  j["branches"] = std::move(branches);
  json tr = json::array();
  for (const auto& t : r.transitions)
    tr.push_back({{"branch", to_string(t.branch)},
                  {"lambda_lo", t.lambda_lo},
                  {"lambda_hi", t.lambda_hi},
                  {"delta_info_plus", t.delta_info_plus}});
  j["transitions"] = std::move(tr);
  json hy = json::array();
  for (const auto& h : r.hysteresis_intervals) hy.push_back({{"lo", h.lo}, {"hi", h.hi}});
  j["hysteresis_intervals"] = std::move(hy);
  j["failures"] = failures;
  write_file_atomic(out / "sweep.csv", sweep_csv(r));
  write_json(out / "sweep.json", j, timer);
  return failures.empty() ? kExitOk : kExitPartial;
}

// ---------------------------------------------------------------------------
// eval and perdim

struct EvalArgs {
  CommonOptions common;
  std::string plus, labels, minus;
  std::string images, minus_images;
  std::vector<std::string> methods = known_methods();
  std::vector<Eigen::Index> dims = {1, 2, 3};
  std::vector<double> lambdas = {0.0, 1.0, 2.0, 4.0, 8.0};
  int splits = 10;
  double train_fraction = 0.5;
  std::string metric = "mahalanobis";
  int restarts = 0;
  std::optional<Eigen::Index> cpca_k;
};

struct LoadedSamples {
  LabeledSamples data;
  std::vector<std::string> class_names;
};

inline LoadedSamples load_samples(const EvalArgs& a) {
  const bool from_csv = !a.plus.empty();
  const bool from_images = !a.images.empty();
  if (from_csv == from_images)
    throw InvalidArgument("give either --plus/--labels/--minus or --images/--minus-images");
  if (from_csv) {
    if (a.labels.empty() || a.minus.empty())
      throw InvalidArgument("--plus needs --labels and --minus");
    const JointTable plus = load_csv(a.plus);
    SampleLabels l = load_labels(a.labels, plus.y_labels());
    LoadedSamples out{{plus, std::move(l.ids), load_csv(a.minus)}, std::move(l.class_names)};
    out.data.validate();
    return out;
  }
  if (a.minus_images.empty()) throw InvalidArgument("--images needs --minus-images");
  LabeledImages li = load_image_directory(a.images);
  auto [minus_images, minus_names] = load_pgm_directory(a.minus_images);
  LoadedSamples out{{images_to_joint(li.images, li.image_names), std::move(li.labels),
                     images_to_joint(minus_images, minus_names)},
                    std::move(li.class_names)};
  out.data.validate();
  return out;
}

inline ProtocolOptions protocol_options(const EvalArgs& a) {
  ProtocolOptions p;
  p.methods = a.methods;
  p.dims = a.dims;
  p.lambdas = a.lambdas;
  p.splits = a.splits;
  p.train_fraction = a.train_fraction;
  p.metric = parse_metric_kind(a.metric);
  p.seed = a.common.seed;
  p.fit = fit_options(a.common, a.restarts);
  p.fit.jobs = 1;
  p.cpca_k_remove = a.cpca_k;
  p.jobs = a.common.jobs;
  p.validate();
  return p;
}

inline json eval_config(const EvalArgs& a) {
  json c = a.common.to_json();
  c.update({{"plus", a.plus},
            {"labels", a.labels},
            {"minus", a.minus},
            {"images", a.images},
            {"minus_images", a.minus_images},
            {"methods", a.methods},
            {"dims", a.dims},
            {"lambdas", a.lambdas},
            {"splits", a.splits},
            {"train_fraction", a.train_fraction},
            {"metric", a.metric},
            {"restarts", a.restarts},
            {"cpca_k_remove", a.cpca_k ? json(*a.cpca_k) : json(nullptr)}});
  return c;
}

inline json outcome_json(std::size_t split, const std::optional<SplitOutcome>& o) {
  if (!o) return {{"split", split}, {"failed", true}};
  json j = {{"split", split}, {"d", o->chosen.d}};
  if (o->chosen.method == "sdris") j["lambda"] = o->chosen.lambda;
  j["train_index"] = o->train_index;
  j["test_index"] = o->test_index;
  return j;
}

inline json failures_json(const ProtocolResult& r) {
  json f = json::array();
  for (const auto& s : r.failures) f.push_back(s);
  for (const auto& s : r.unconverged) f.push_back(s);
  return f;
}

inline json dataset_json(const LoadedSamples& s) {
  return {{"n_x", s.data.plus.nx()},
          {"n_samples", s.data.plus.ny()},
          {"n_irrelevance", s.data.minus.ny()},
          {"classes", s.class_names}};
}

inline int cmd_eval(const EvalArgs& a) {
  Timer timer;
  const fs::path out(a.common.out);
  const LoadedSamples s = load_samples(a);
  const ProtocolOptions p = protocol_options(a);
  const ProtocolResult r = run_protocol(s.data, p);
  json j = envelope("eval", eval_config(a));
  j["dataset"] = dataset_json(s);
  json methods = json::array();
  for (const auto& m : r.methods) {
    json splits = json::array();
    std::size_t scored = 0;
    for (std::size_t i = 0; i < m.splits.size(); ++i) {
      splits.push_back(outcome_json(i, m.splits[i]));
      if (m.splits[i]) ++scored;
    }
    methods.push_back({{"method", m.method},
                       {"mean_test_index", m.test.mean},
                       {"stderr", m.test.stderr_},
                       {"splits_scored", scored},
                       {"splits", std::move(splits)}});
  }
  j["methods"] = std::move(methods);
  j["fits"] = r.fits;
  const json failures = failures_json(r);
  j["failures"] = failures;
  write_json(out / "eval.json", j, timer);
  return failures.empty() ? kExitOk : kExitPartial;
}

inline int cmd_perdim(const EvalArgs& a) {
  Timer timer;
  const fs::path out(a.common.out);
  const LoadedSamples s = load_samples(a);
  const ProtocolOptions p = protocol_options(a);
  const ProtocolResult r = run_protocol(s.data, p);
  json j = envelope("perdim", eval_config(a));
  j["dataset"] = dataset_json(s);
  std::string csv = "method,d,mean_index,stderr\n";
  json rows = json::array();
  for (const auto& m : r.methods)
    for (std::size_t k = 0; k < p.dims.size(); ++k) {
      json splits = json::array();
      for (std::size_t i = 0; i < m.per_dim[k].size(); ++i)
        splits.push_back(outcome_json(i, m.per_dim[k][i]));
      rows.push_back({{"method", m.method},
                      {"d", p.dims[k]},
                      {"mean_index", m.per_dim_test[k].mean},
                      {"stderr", m.per_dim_test[k].stderr_},
                      {"splits", std::move(splits)}});
      csv += m.method + "," + std::to_string(p.dims[k]) + "," +
             detail::format_double(m.per_dim_test[k].mean) + "," +
             detail::format_double(m.per_dim_test[k].stderr_) + "\n";
    }
  j["rows"] = std::move(rows);
  j["fits"] = r.fits;
  const json failures = failures_json(r);
  j["failures"] = failures;
  write_file_atomic(out / "perdim.csv", csv);
  write_json(out / "perdim.json", j, timer);
  return failures.empty() ? kExitOk : kExitPartial;
}

// ---------------------------------------------------------------------------

inline void add_eval_options(CLI::App* sub, EvalArgs& a) {
  add_common(sub, a.common);
  sub->add_option("--plus", a.plus, "Relevance table CSV, one column per sample");
  sub->add_option("--labels", a.labels, "Class labels CSV (sample,label)");
  sub->add_option("--minus", a.minus, "Irrelevance table CSV");
  sub->add_option("--images", a.images, "Directory of class_<label>/ subdirectories of PGM images");
  sub->add_option("--minus-images", a.minus_images, "Directory of irrelevance PGM images");
  sub->add_option("--methods", a.methods, "Methods to compare")
      ->delimiter(',')
      ->check(CLI::IsMember(known_methods()))
      ->capture_default_str();
  sub->add_option("--dims", a.dims, "Candidate dimensions")->delimiter(',')->capture_default_str();
  sub->add_option("--lambdas", a.lambdas, "Candidate lambda values for sdris")
      ->delimiter(',')
      ->capture_default_str();
  sub->add_option("--splits", a.splits, "Random train/test splits")->capture_default_str();
  sub->add_option("--train-fraction", a.train_fraction, "Per-class training fraction")
      ->capture_default_str();
  sub->add_option("--metric", a.metric, "mahalanobis or euclidean")
      ->check(CLI::IsMember({"mahalanobis", "euclidean"}))
      ->capture_default_str();
  sub->add_option("--restarts", a.restarts, "Random restarts per sdris fit")->capture_default_str();
  sub->add_option("--cpca-k", a.cpca_k, "Irrelevance directions removed by cpca");
}

inline int run(int argc, const char* const* argv) {
  CLI::App app{"Sufficient dimensionality reduction with irrelevance statistics", "sdris"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a synthetic dataset");
  add_common(s, synth.common);
  s->add_option("--kind", synth.kind, "conflicting or nuisance")
      ->check(CLI::IsMember({"conflicting", "nuisance"}))
      ->capture_default_str();
  s->add_option("--nx", synth.conflicting.nx, "conflicting: |X|")->capture_default_str();
  s->add_option("--ny", synth.conflicting.ny, "conflicting: |Y|")->capture_default_str();
  s->add_option("--strong", synth.conflicting.strong_amplitude, "conflicting: strong amplitude")
      ->capture_default_str();
  s->add_option("--weak", synth.conflicting.weak_amplitude, "conflicting: weak amplitude")
      ->capture_default_str();
  s->add_option("--noise", synth.conflicting.noise_level, "conflicting: noise level")
      ->capture_default_str();
  s->add_option("--classes", synth.nuisance.n_classes, "nuisance: classes")->capture_default_str();
  s->add_option("--per-class", synth.nuisance.per_class, "nuisance: samples per class")
      ->capture_default_str();
  s->add_option("--features", synth.nuisance.n_features, "nuisance: |X|")->capture_default_str();
  s->add_option("--signal-dims", synth.nuisance.signal_dims, "nuisance: class profile count")
      ->capture_default_str();
  s->add_option("--nuisance-dims", synth.nuisance.nuisance_dims, "nuisance: nuisance profile count")
      ->capture_default_str();
  s->add_option("--signal", synth.nuisance.signal_strength, "nuisance: class signal strength")
      ->capture_default_str();
  s->add_option("--nuisance", synth.nuisance.nuisance_strength, "nuisance: nuisance strength")
      ->capture_default_str();
  s->add_option("--spread", synth.nuisance.within_class_spread, "nuisance: within-class spread")
      ->capture_default_str();
  s->add_option("--irrelevance", synth.nuisance.n_irrelevance, "nuisance: irrelevance samples")
      ->capture_default_str();

  FitArgs fa;
  auto* f = app.add_subcommand("fit", "Fit features for one lambda");
  add_common(f, fa.common);
  f->add_option("--plus", fa.plus, "Relevance table CSV")->required();
  f->add_option("--minus", fa.minus, "Irrelevance table CSV");
  f->add_option("--lambda", fa.lambda, "Irrelevance weight")->capture_default_str();
  f->add_option("--dim", fa.dim, "Feature dimension")->capture_default_str();
  f->add_option("--restarts", fa.restarts, "Random starts besides the SVD start")->capture_default_str();

  SweepArgs sa;
  auto* w = app.add_subcommand("sweep", "Trace optima over a lambda grid in both directions");
  add_common(w, sa.common);
  w->add_option("--plus", sa.plus, "Relevance table CSV")->required();
  w->add_option("--minus", sa.minus, "Irrelevance table CSV")->required();
  w->add_option("--dim", sa.dim, "Feature dimension")->capture_default_str();
  w->add_option("--lambdas", sa.lambdas, "Explicit ascending grid")->delimiter(',');
  w->add_option("--lambda-min", sa.lambda_min, "Grid start")->capture_default_str();
  w->add_option("--lambda-max", sa.lambda_max, "Grid end")->capture_default_str();
  w->add_option("--points", sa.points, "Grid points")->capture_default_str();
  w->add_option("--restarts", sa.restarts, "Random starts per point")->capture_default_str();

  EvalArgs ea, pa;
  auto* e = app.add_subcommand("eval", "Compare methods over repeated train/test splits");
  add_eval_options(e, ea);
  auto* p = app.add_subcommand("perdim", "Per-dimension comparison curves");
  add_eval_options(p, pa);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err) == 0 ? kExitOk : kExitUsage;
  }
  try {
    if (s->parsed()) return cmd_synth(synth);
    if (f->parsed()) return cmd_fit(fa);
    if (w->parsed()) return cmd_sweep(sa);
    if (e->parsed()) return cmd_eval(ea);
    return cmd_perdim(pa);
  } catch (const InvalidArgument& err) {
    std::cerr << "sdris: " << err.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& err) {
    std::cerr << "sdris: " << err.what() << "\n";
    return kExitUsage;
  } catch (const Error& err) {
    std::cerr << "sdris: " << err.what() << "\n";
    return kExitPartial;
  } catch (const fs::filesystem_error& err) {
    std::cerr << "sdris: " << err.what() << "\n";
    return kExitUsage;
  }
}

inline int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"sdris"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace sdris::cli
