#pragma once

// Reduced representations, the normalized neighbor precision index, and the
// train/test model-selection protocol.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sdris/error.hpp"
#include "sdris/joint_table.hpp"
#include "sdris/maxent.hpp"
#include "sdris/parallel.hpp"
#include "sdris/random.hpp"

namespace sdris {

struct ReducedSet {
  Matrix vectors;           // n x d, one row per sample
  std::vector<int> labels;  // class id per row
  std::string method;

  void validate() const {
    if (vectors.rows() != static_cast<Eigen::Index>(labels.size()))
      throw InvalidArgument("reduced set: one label per row required");
    if (!vectors.allFinite()) throw InvalidArgument("reduced set has non-finite entries");
  }
};

// Row y = sum_x phi(x) p(x|y).
inline Matrix reduce_by_expectation(const FeatureMap& phi, const JointTable& p) {
  if (phi.nx() != p.nx()) throw InvalidArgument("reduce_by_expectation: |X| mismatch");
  Matrix cond = p.probs();
  const Vector py = p.marginal_y();
  for (Eigen::Index y = 0; y < p.ny(); ++y) cond.col(y) /= py(y);
  return cond.transpose() * phi.values();
}

enum class MetricKind { euclidean, mahalanobis };

inline const char* to_string(MetricKind k) {
  return k == MetricKind::euclidean ? "euclidean" : "mahalanobis";
}

inline MetricKind parse_metric_kind(const std::string& s) {
  if (s == "euclidean") return MetricKind::euclidean;
  if (s == "mahalanobis") return MetricKind::mahalanobis;
  throw InvalidArgument("unknown metric '" + s + "' (euclidean, mahalanobis)");
}

struct Metric {
  MetricKind kind = MetricKind::euclidean;
  Matrix inverse_covariance;  // identity for euclidean
  Matrix whitening;           // symmetric square root of inverse_covariance
};

// Mahalanobis: inverse of the (n - 1) covariance plus 1e-8 * trace / d.
inline Metric fit_metric(const Matrix& vectors, MetricKind kind) {
  const Eigen::Index d = vectors.cols();
  if (d < 1) throw InvalidArgument("fit_metric: empty representation");
  Metric m;
  m.kind = kind;
  if (kind == MetricKind::euclidean) {
    m.inverse_covariance = m.whitening = Matrix::Identity(d, d);
    return m;
  }
  if (vectors.rows() < 2) throw InvalidArgument("fit_metric: need n >= 2");
  const Matrix c = vectors.rowwise() - vectors.colwise().mean();
  Matrix cov = c.transpose() * c / static_cast<double>(vectors.rows() - 1);
  const double tr = cov.trace();
  cov.diagonal().array() += 1e-8 * (tr > 0.0 ? tr : 1.0) / static_cast<double>(d);
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
  const Vector inv = es.eigenvalues().cwiseInverse();
  m.inverse_covariance = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
  m.whitening =
      es.eigenvectors() * inv.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  return m;
}

inline Metric fit_metric(const ReducedSet& set, MetricKind kind) {
  return fit_metric(set.vectors, kind);
}

// Average fraction of same-class points among the k nearest neighbors, over
// points and k = 1..K, normalized so that chance is 0 and a ranking with every
// same-class point ahead of all others is 1. For k beyond a class's size the
// attainable fraction is (class size - 1) / k, which is what purity means there.
inline double precision_index(const ReducedSet& set, const Metric& metric,
                              std::optional<Eigen::Index> k_max = std::nullopt) {
  set.validate();
  const Eigen::Index n = set.vectors.rows();
  if (n < 2) throw InvalidArgument("precision_index: need n >= 2");
  const Eigen::Index K = k_max.value_or(n - 1);
  if (K < 1 || K >= n) throw InvalidArgument("precision_index: K must be in [1, n - 1]");
  std::map<int, Eigen::Index> class_size;
  for (int l : set.labels) ++class_size[l];
  for (const auto& [label, count] : class_size)
    if (count < 2)
      throw InvalidArgument("precision_index: class " + std::to_string(label) +
                            " has a single member");
  if (class_size.size() < 2) throw InvalidArgument("precision_index: need >= 2 classes");

  const Matrix z = set.vectors * metric.whitening;
  double r = 0.0, chance = 0.0, best = 0.0;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n - 1));
  std::vector<double> dist(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) dist[j] = (z.row(i) - z.row(j)).squaredNorm();
    std::size_t o = 0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) order[o++] = j;
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return dist[a] < dist[b]; });
    double same = 0.0, acc = 0.0;
    for (Eigen::Index k = 1; k <= K; ++k) {
      if (set.labels[order[k - 1]] == set.labels[i]) same += 1.0;
      acc += same / static_cast<double>(k);
    }
    r += acc / static_cast<double>(K);
    const auto others = static_cast<double>(class_size[set.labels[i]] - 1);
    chance += others / static_cast<double>(n - 1);
    double pure = 0.0;
    for (Eigen::Index k = 1; k <= K; ++k)
      pure += std::min(others, static_cast<double>(k)) / static_cast<double>(k);
    best += pure / static_cast<double>(K);
  }
  r /= static_cast<double>(n);
  chance /= static_cast<double>(n);
  best /= static_cast<double>(n);
  // best == chance only when K = n - 1 and one class holds every point, which
  // is rejected above.
  return (r - chance) / (best - chance);
}

// ---------------------------------------------------------------------------
// Model selection

struct Candidate {
  std::string method;
  Eigen::Index d = 1;
  double lambda = 0.0;
};

struct Split {
  std::vector<Eigen::Index> train;
  std::vector<Eigen::Index> test;
};

// Per class, a seeded shuffle puts round(train_fraction * size) members
// (at least 2, leaving at least 2) into train.
inline Split stratified_split(const std::vector<int>& labels, double train_fraction,
                              std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw InvalidArgument("train fraction must be in (0, 1)");
  std::map<int, std::vector<Eigen::Index>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i)
    by_class[labels[i]].push_back(static_cast<Eigen::Index>(i));
  Rng rng(seed);
  Split s;
  for (auto& [label, members] : by_class) {
    if (members.size() < 4)
      throw InvalidArgument("class " + std::to_string(label) +
                            " has fewer than 4 members; cannot split");
    rng.shuffle(members);
    auto k = static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(members.size())));
    k = std::clamp<std::size_t>(k, 2, members.size() - 2);
    s.train.insert(s.train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(k));
    s.test.insert(s.test.end(), members.begin() + static_cast<std::ptrdiff_t>(k), members.end());
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

// A candidate's reduced representations for the train and test samples.
struct Representation {
  Matrix train;
  Matrix test;
};

struct Selection {
  Candidate chosen;
  double train_index = 0.0;
  double test_index = 0.0;
  std::vector<double> candidate_train_indices;  // aligned with the candidates
};

// Chooses, among candidates sharing one method, the best train precision
// index (ties: smaller d, then smaller lambda, then list order) and
// evaluates it once on test. Failed candidates (represent throws) are skipped.
inline Selection model_select(
    const std::vector<Candidate>& candidates,
    const std::function<Representation(const Candidate&)>& represent,
    const std::vector<int>& train_labels, const std::vector<int>& test_labels,
    MetricKind metric) {
  if (candidates.empty()) throw InvalidArgument("model_select: no candidates");
  std::vector<std::optional<Representation>> reps(candidates.size());
  Selection sel;
  sel.candidate_train_indices.assign(candidates.size(),
                                     std::numeric_limits<double>::quiet_NaN());
  std::optional<std::size_t> best;
  std::string last_error;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    try {
      reps[i] = represent(candidates[i]);
    } catch (const Error& e) {
      last_error = e.what();
      continue;
    }
    const ReducedSet tr{reps[i]->train, train_labels, candidates[i].method};
    const double v = precision_index(tr, fit_metric(tr, metric));
    sel.candidate_train_indices[i] = v;
    if (!best) {
      best = i;
      continue;
    }
    const Candidate& b = candidates[*best];
    const Candidate& c = candidates[i];
    const double bv = sel.candidate_train_indices[*best];
    if (v > bv || (v == bv && (c.d < b.d || (c.d == b.d && c.lambda < b.lambda))))
      best = i;
  }
  if (!best) throw FitError("model_select: every candidate failed: " + last_error);
  sel.chosen = candidates[*best];
  sel.train_index = sel.candidate_train_indices[*best];
  const ReducedSet te{reps[*best]->test, test_labels, sel.chosen.method};
  sel.test_index = precision_index(te, fit_metric(te, metric));
  return sel;
}

struct MeanAndError {
  double mean = 0.0;
  double stderr_ = 0.0;  // standard error of the mean
};

inline MeanAndError mean_and_stderr(const std::vector<double>& v) {
  MeanAndError m;
  if (v.empty()) return m;
  const double n = static_cast<double>(v.size());
  m.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.stderr_ = std::sqrt(ss / (n - 1.0) / n);
  }
  return m;
}

}  // namespace sdris
