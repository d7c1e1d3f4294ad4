#pragma once

// Finite discrete joint distributions p(X, Y) and the information-theoretic
// quantities defined on them. Natural logarithms throughout; probabilities
// below kZeroProbability count as exact zeros inside logarithms.

#include <cmath>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sdris/error.hpp"

namespace sdris {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kZeroProbability = 1e-15;
inline constexpr double kNormalizationTolerance = 1e-12;

// p * log(p) with the 0 log 0 = 0 convention.
inline double xlogx(double p) {
  return p < kZeroProbability ? 0.0 : p * std::log(p);
}

namespace detail {

inline std::vector<std::string> default_labels(const char* prefix,
                                               Eigen::Index n) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    out.push_back(prefix + std::to_string(i));
  return out;
}

inline void check_labels(const std::vector<std::string>& labels,
                         Eigen::Index expected, const char* axis) {
  if (static_cast<Eigen::Index>(labels.size()) != expected)
    throw InvalidArgument(std::string(axis) + " label count " +
                          std::to_string(labels.size()) +
                          " does not match matrix dimension " +
                          std::to_string(expected));
  std::unordered_set<std::string> seen;
  for (const auto& l : labels)
    if (!seen.insert(l).second)
      throw InvalidArgument(std::string("duplicate ") + axis + " label '" + l +
                            "'");
}

}  // namespace detail

// A normalized |X| x |Y| joint distribution with labelled axes. Instances
// always satisfy: entries >= 0, total mass 1 (within 1e-12), |X|, |Y| >= 2,
// and strictly positive marginals.
class JointTable {
 public:
  // Normalizes a nonnegative count matrix. Empty label lists are replaced by
  // x0.., y0.. defaults.
  static JointTable from_counts(const Matrix& counts,
                                std::vector<std::string> x_labels = {},
                                std::vector<std::string> y_labels = {}) {
    validate_shape_and_sign(counts);
    const double total = counts.sum();
    if (!(total > 0.0) || !std::isfinite(total))
      throw InvalidArgument("count matrix has zero or non-finite total");
    return JointTable(counts / total, std::move(x_labels), std::move(y_labels));
  }

  // Wraps an already-normalized probability matrix.
  static JointTable from_probabilities(const Matrix& probs,
                                       std::vector<std::string> x_labels = {},
                                       std::vector<std::string> y_labels = {}) {
    validate_shape_and_sign(probs);
    if (std::abs(probs.sum() - 1.0) > kNormalizationTolerance)
      throw InvalidArgument("probability matrix does not sum to 1");
    return JointTable(probs, std::move(x_labels), std::move(y_labels));
  }

  const Matrix& probs() const { return probs_; }
  double operator()(Eigen::Index x, Eigen::Index y) const {
    return probs_(x, y);
  }
  Eigen::Index nx() const { return probs_.rows(); }
  Eigen::Index ny() const { return probs_.cols(); }
  const std::vector<std::string>& x_labels() const { return x_labels_; }
  const std::vector<std::string>& y_labels() const { return y_labels_; }

  Vector marginal_x() const { return probs_.rowwise().sum(); }
  Vector marginal_y() const { return probs_.colwise().sum().transpose(); }

  // p(x | y) for one column.
  Vector conditional_x_given_y(Eigen::Index y) const {
    check_index(y, ny(), "y");
    const double py = probs_.col(y).sum();
    if (!(py > 0.0)) throw InvalidArgument("p(y) is zero");
    return probs_.col(y) / py;
  }

  // p(y | x) for one row.
  Vector conditional_y_given_x(Eigen::Index x) const {
    check_index(x, nx(), "x");
    const double px = probs_.row(x).sum();
    if (!(px > 0.0)) throw InvalidArgument("p(x) is zero");
    return probs_.row(x).transpose() / px;
  }

  // All conditionals p(x | y) as the columns of an |X| x |Y| matrix.
  Matrix conditionals_x_given_y() const {
    return probs_.array().rowwise() / probs_.colwise().sum().array();
  }

  // The product of marginals p(x) p(y).
  JointTable product_of_marginals() const {
    Matrix prod = marginal_x() * marginal_y().transpose();
    prod /= prod.sum();
    return JointTable(prod, x_labels_, y_labels_);
  }

  // Restricts to a subset of columns and renormalizes.
  JointTable select_columns(std::span<const Eigen::Index> cols) const {
    Matrix sub(nx(), static_cast<Eigen::Index>(cols.size()));
    std::vector<std::string> labels;
    labels.reserve(cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      check_index(cols[j], ny(), "y");
      sub.col(static_cast<Eigen::Index>(j)) = probs_.col(cols[j]);
      labels.push_back(y_labels_[static_cast<std::size_t>(cols[j])]);
    }
    return from_counts(sub, x_labels_, std::move(labels));
  }

 private:
  JointTable(Matrix probs, std::vector<std::string> x_labels,
             std::vector<std::string> y_labels)
      : probs_(std::move(probs)),
        x_labels_(x_labels.empty() ? detail::default_labels("x", probs_.rows())
                                   : std::move(x_labels)),
        y_labels_(y_labels.empty() ? detail::default_labels("y", probs_.cols())
                                   : std::move(y_labels)) {
    detail::check_labels(x_labels_, probs_.rows(), "x");
    detail::check_labels(y_labels_, probs_.cols(), "y");
    for (Eigen::Index i = 0; i < probs_.rows(); ++i)
      if (!(probs_.row(i).sum() > 0.0))
        throw InvalidArgument("row " + std::to_string(i) +
                              " has zero mass; conditionals undefined");
    for (Eigen::Index j = 0; j < probs_.cols(); ++j)
      if (!(probs_.col(j).sum() > 0.0))
        throw InvalidArgument("column " + std::to_string(j) +
                              " has zero mass; conditionals undefined");
  }

  static void validate_shape_and_sign(const Matrix& m) {
    if (m.rows() < 2 || m.cols() < 2)
      throw InvalidArgument("joint table needs |X| >= 2 and |Y| >= 2");
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        if (!std::isfinite(m(i, j)) || m(i, j) < 0.0)
          throw InvalidArgument("entries must be finite and nonnegative");
  }

  static void check_index(Eigen::Index i, Eigen::Index n, const char* axis) {
    if (i < 0 || i >= n)
      throw InvalidArgument(std::string(axis) + " index out of range");
  }

  Matrix probs_;
  std::vector<std::string> x_labels_;
  std::vector<std::string> y_labels_;
};

// ---------------------------------------------------------------------------
// Vector-level measures.

inline double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) h -= xlogx(v);
  return h;
}

inline double entropy(const Vector& p) {
  return entropy(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())));
}

// D_KL[p || q] in nats. Throws when p puts mass where q has none.
inline double kl_divergence(std::span<const double> p,
                            std::span<const double> q) {
  if (p.size() != q.size())
    throw InvalidArgument("kl_divergence: size mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < kZeroProbability) continue;
    if (q[i] < kZeroProbability)
      throw InvalidArgument(
          "kl_divergence: p is not absolutely continuous w.r.t. q");
    d += p[i] * std::log(p[i] / q[i]);
  }
  return d;
}

// ---------------------------------------------------------------------------
// Table-level measures.

inline double entropy(const JointTable& p) {
  const Matrix& m = p.probs();
  return entropy(std::span<const double>(m.data(), static_cast<std::size_t>(m.size())));
}

inline double kl_divergence(const JointTable& p, const JointTable& q) {
  if (p.nx() != q.nx() || p.ny() != q.ny())
    throw InvalidArgument("kl_divergence: tables differ in shape");
  const Matrix& a = p.probs();
  const Matrix& b = q.probs();
  return kl_divergence(std::span<const double>(a.data(), static_cast<std::size_t>(a.size())),
                       std::span<const double>(b.data(), static_cast<std::size_t>(b.size())));
}

// I[p] = sum p log(p / (p(x) p(y))). Clamped at zero against roundoff.
inline double mutual_information(const JointTable& p) {
  const Vector px = p.marginal_x();
  const Vector py = p.marginal_y();
  double mi = 0.0;
  for (Eigen::Index y = 0; y < p.ny(); ++y)
    for (Eigen::Index x = 0; x < p.nx(); ++x) {
      const double v = p(x, y);
      if (v < kZeroProbability) continue;
      mi += v * std::log(v / (px(x) * py(y)));
    }
  return mi < 0.0 ? 0.0 : mi;
}

}  // namespace sdris
