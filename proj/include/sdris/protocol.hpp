#pragma once

// Repeated train/test comparison of SDR-IS against the linear baselines on a
// labelled sample table, with per-dimension curves.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "sdris/baselines.hpp"
#include "sdris/eval.hpp"
#include "sdris/optimizer.hpp"
#include "sdris/parallel.hpp"

namespace sdris {

struct LabeledSamples {
  JointTable plus;          // one column per sample
  std::vector<int> labels;  // class id per column of plus
  JointTable minus;         // irrelevance samples, same X

  void validate() const {
    if (static_cast<Eigen::Index>(labels.size()) != plus.ny())
      throw InvalidArgument("one label per relevance sample required");
    if (plus.nx() != minus.nx() || plus.x_labels() != minus.x_labels())
      throw InvalidArgument("relevance and irrelevance tables must share X");
  }
};

inline const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> m{"sdris", "pca", "opca", "cpca"};
  return m;
}

struct ProtocolOptions {
  std::vector<std::string> methods = known_methods();
  std::vector<Eigen::Index> dims = {1, 2, 3};
  std::vector<double> lambdas = {0.0, 1.0, 2.0, 4.0, 8.0};  // SDR-IS only
  int splits = 10;
  double train_fraction = 0.5;
  MetricKind metric = MetricKind::mahalanobis;
  std::uint64_t seed = 0;
  FitOptions fit = [] {
    FitOptions f;
    f.restarts = 0;
    return f;
  }();
  double opca_ridge = 1e-8;
  std::optional<Eigen::Index> cpca_k_remove;
  int jobs = 1;  // across splits

  void validate() const {
    if (methods.empty()) throw InvalidArgument("no methods requested");
    for (const auto& m : methods)
      if (std::find(known_methods().begin(), known_methods().end(), m) == known_methods().end())
        throw InvalidArgument("unknown method '" + m + "' (sdris, pca, opca, cpca)");
    if (dims.empty()) throw InvalidArgument("no dimensions requested");
    for (auto d : dims)
      if (d < 1) throw InvalidArgument("dimensions must be >= 1");
    if (lambdas.empty()) throw InvalidArgument("no lambda values requested");
    for (double l : lambdas)
      if (!(l >= 0.0) || !std::isfinite(l)) throw InvalidArgument("lambda must be finite and >= 0");
    if (splits < 1) throw InvalidArgument("need at least one split");
    if (jobs < 1) throw InvalidArgument("jobs must be >= 1");
    fit.validate();
  }
};

struct SplitOutcome {
  Candidate chosen;
  double train_index = 0.0;
  double test_index = 0.0;
};

struct MethodReport {
  std::string method;
  std::vector<std::optional<SplitOutcome>> splits;
  MeanAndError test;  // over the splits that produced a result
  // [dims index][split]: the candidate chosen on train at that d
  std::vector<std::vector<std::optional<SplitOutcome>>> per_dim;
  std::vector<MeanAndError> per_dim_test;  // aligned with ProtocolOptions::dims
};

struct ProtocolResult {
  std::vector<MethodReport> methods;  // in requested order
  std::vector<std::string> failures;     // candidates that threw
  std::vector<std::string> unconverged;  // SDR-IS fits stopped short of grad_tol
  int fits = 0;
};

namespace detail {

inline Matrix conditional_rows(const JointTable& t) {
  Matrix c = t.probs();
  const Vector py = t.marginal_y();
  for (Eigen::Index y = 0; y < t.ny(); ++y) c.col(y) /= py(y);
  return c.transpose();
}

inline std::string candidate_name(int split, const Candidate& c) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "split %d %s d=%ld lambda=%g", split, c.method.c_str(),
                static_cast<long>(c.d), c.lambda);
  return buf;
}

inline std::vector<MeanAndError> summarize_per_dim(
    const std::vector<std::vector<std::optional<SplitOutcome>>>& per_dim) {
  std::vector<MeanAndError> out;
  for (const auto& splits : per_dim) {
    std::vector<double> v;
    for (const auto& s : splits)
      if (s) v.push_back(s->test_index);
    out.push_back(mean_and_stderr(v));
  }
  return out;
}

}  // namespace detail

inline ProtocolResult run_protocol(const LabeledSamples& data, const ProtocolOptions& opts) {
  data.validate();
  opts.validate();
  const std::size_t n_methods = opts.methods.size(), n_dims = opts.dims.size();
  const auto n_splits = static_cast<std::size_t>(opts.splits);
  const SampleMatrix minus_rows(detail::conditional_rows(data.minus));

  struct SplitWork {
    std::vector<std::optional<SplitOutcome>> overall;                // per method
    std::vector<std::vector<std::optional<SplitOutcome>>> per_dim;  // [method][dim]
    std::vector<std::string> failures, unconverged;
    int fits = 0;
  };
  std::vector<SplitWork> work(n_splits);

  parallel_for(n_splits, opts.jobs, [&](std::size_t s) {
    SplitWork& w = work[s];
    w.overall.resize(n_methods);
    w.per_dim.assign(n_methods, std::vector<std::optional<SplitOutcome>>(n_dims));
    const Split split =
        stratified_split(data.labels, opts.train_fraction, substream_seed(opts.seed, "split", s));
    std::vector<int> train_labels, test_labels;
    for (auto i : split.train) train_labels.push_back(data.labels[static_cast<std::size_t>(i)]);
    for (auto i : split.test) test_labels.push_back(data.labels[static_cast<std::size_t>(i)]);
    const JointTable train = data.plus.select_columns(split.train);
    const JointTable test = data.plus.select_columns(split.test);
    const SampleMatrix train_rows(detail::conditional_rows(train));
    const SampleMatrix test_rows(detail::conditional_rows(test));

    for (std::size_t m = 0; m < n_methods; ++m) {
      const std::string& method = opts.methods[m];
      std::vector<Candidate> cands;
      for (auto d : opts.dims) {
        if (method == "sdris")
          for (double l : opts.lambdas) cands.push_back({method, d, l});
        else
          cands.push_back({method, d, 0.0});
      }
      std::map<std::size_t, Representation> cache;
      std::map<std::size_t, std::string> errors;
      for (std::size_t c = 0; c < cands.size(); ++c) {
        const Candidate& cand = cands[c];
        try {
          if (method == "sdris") {
            FitOptions f = opts.fit;
            f.jobs = 1;
            f.seed = substream_seed(substream_seed(opts.seed, "fit", s), method, c);
            const FitResult r = fit(Objective{cand.lambda, train, data.minus, cand.d}, f);
            ++w.fits;
            if (!r.converged)
              w.unconverged.push_back(detail::candidate_name(static_cast<int>(s), cand) + ": " +
                                      r.termination);
            cache[c] = {reduce_by_expectation(r.phi, train), reduce_by_expectation(r.phi, test)};
          } else {
            const LinearReducer lr =
                method == "pca"    ? pca(train_rows, cand.d)
                : method == "opca" ? opca(train_rows, minus_rows, cand.d, opts.opca_ridge)
                                   : cpca(train_rows, minus_rows, cand.d, opts.cpca_k_remove);
            cache[c] = {reduce(lr, train_rows), reduce(lr, test_rows)};
          }
        } catch (const Error& e) {
          errors[c] = e.what();
          w.failures.push_back(detail::candidate_name(static_cast<int>(s), cand) + ": " + e.what());
        }
      }
      auto select = [&](const std::vector<std::size_t>& idx) -> std::optional<SplitOutcome> {
        std::vector<Candidate> sub;
        for (auto i : idx) sub.push_back(cands[i]);
        if (sub.empty()) return std::nullopt;
        try {
          const Selection sel = model_select(
              sub,
              [&](const Candidate& c) {
                for (auto i : idx)
                  if (cands[i].d == c.d && cands[i].lambda == c.lambda) {
                    auto it = cache.find(i);
                    if (it == cache.end()) throw FitError(errors[i]);
                    return it->second;
                  }
                throw FitError("unknown candidate");
              },
              train_labels, test_labels, opts.metric);
          return SplitOutcome{sel.chosen, sel.train_index, sel.test_index};
        } catch (const FitError&) {
          return std::nullopt;
        }
      };
      std::vector<std::size_t> all(cands.size());
      std::iota(all.begin(), all.end(), std::size_t{0});
      w.overall[m] = select(all);
      for (std::size_t k = 0; k < n_dims; ++k) {
        std::vector<std::size_t> at_d;
        for (std::size_t c = 0; c < cands.size(); ++c)
          if (cands[c].d == opts.dims[k]) at_d.push_back(c);
        w.per_dim[m][k] = select(at_d);
      }
    }
  });

  ProtocolResult out;
  for (std::size_t m = 0; m < n_methods; ++m) {
    MethodReport rep;
    rep.method = opts.methods[m];
    rep.per_dim.assign(n_dims, {});
    std::vector<double> tests;
    for (std::size_t s = 0; s < n_splits; ++s) {
      rep.splits.push_back(work[s].overall[m]);
      if (work[s].overall[m]) tests.push_back(work[s].overall[m]->test_index);
      for (std::size_t k = 0; k < n_dims; ++k) rep.per_dim[k].push_back(work[s].per_dim[m][k]);
    }
    rep.test = mean_and_stderr(tests);
    rep.per_dim_test = detail::summarize_per_dim(rep.per_dim);
    out.methods.push_back(std::move(rep));
  }
  for (auto& w : work) {
    out.failures.insert(out.failures.end(), w.failures.begin(), w.failures.end());
    out.unconverged.insert(out.unconverged.end(), w.unconverged.begin(), w.unconverged.end());
    out.fits += w.fits;
  }
  return out;
}

}  // namespace sdris
