#pragma once

// Linear baselines: PCA, oriented PCA and constrained PCA.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "sdris/error.hpp"
#include "sdris/joint_table.hpp"

namespace sdris {

// n samples x m dimensions.
class SampleMatrix {
 public:
  explicit SampleMatrix(Matrix rows) : rows_(std::move(rows)) {
    if (rows_.rows() < 2) throw InvalidArgument("sample matrix needs n >= 2");
    if (rows_.cols() < 1) throw InvalidArgument("sample matrix needs m >= 1");
    if (!rows_.allFinite()) throw InvalidArgument("sample matrix has non-finite entries");
    mean_ = rows_.colwise().mean().transpose();
  }

  const Matrix& rows() const { return rows_; }
  const Vector& mean() const { return mean_; }
  Eigen::Index n() const { return rows_.rows(); }
  Eigen::Index m() const { return rows_.cols(); }

  Matrix centered() const { return rows_.rowwise() - mean_.transpose(); }
  // Unbiased (n - 1) covariance.
  Matrix covariance() const {
    const Matrix c = centered();
    return c.transpose() * c / static_cast<double>(n() - 1);
  }

 private:
  Matrix rows_;
  Vector mean_;
};

enum class ReducerKind { pca, opca, cpca };

inline const char* to_string(ReducerKind k) {
  switch (k) {
    case ReducerKind::pca: return "pca";
    case ReducerKind::opca: return "opca";
    case ReducerKind::cpca: return "cpca";
  }
  return "?";
}

struct LinearReducer {
  Matrix basis;      // m x d
  ReducerKind kind;
  Vector centering;  // m
  Vector eigenvalues;  // d leading (generalized) eigenvalues
};

namespace detail {

inline void fix_signs(Matrix& basis) {
  for (Eigen::Index k = 0; k < basis.cols(); ++k) {
    Eigen::Index i = 0;
    basis.col(k).cwiseAbs().maxCoeff(&i);
    if (basis(i, k) < 0.0) basis.col(k) *= -1.0;
  }
}

inline double rank_tolerance(const Vector& evals, Eigen::Index m) {
  const double top = evals.size() ? evals.cwiseAbs().maxCoeff() : 0.0;
  return std::max(top, 1e-300) * static_cast<double>(m) * 1e-12;
}

// Top-d eigenpairs of a symmetric matrix, descending.
inline std::pair<Matrix, Vector> top_eigen(const Matrix& s, Eigen::Index d) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  if (es.info() != Eigen::Success) throw Error("eigen decomposition failed");
  Matrix vecs = es.eigenvectors().rightCols(d).rowwise().reverse();
  Vector vals = es.eigenvalues().tail(d).reverse();
  return {std::move(vecs), std::move(vals)};
}

inline void check_dims(Eigen::Index d, Eigen::Index m) {
  if (d < 1) throw InvalidArgument("d must be >= 1");
  if (d > m) throw InvalidArgument("d exceeds the data dimension");
}

}  // namespace detail

inline LinearReducer pca(const SampleMatrix& x, Eigen::Index d) {
  detail::check_dims(d, x.m());
  Eigen::SelfAdjointEigenSolver<Matrix> es(x.covariance());
  const Vector all = es.eigenvalues();
  const Eigen::Index rank =
      (all.array() > detail::rank_tolerance(all, x.m())).count();
  if (d > rank)
    throw InvalidArgument("d = " + std::to_string(d) +
                          " exceeds the rank of the centered data (" +
                          std::to_string(rank) + ")");
  auto [basis, vals] = detail::top_eigen(x.covariance(), d);
  detail::fix_signs(basis);
  return {std::move(basis), ReducerKind::pca, x.mean(), std::move(vals)};
}

// Directions maximizing w'S+w / w'(S- + r I)w with r = ridge * trace(S-) / m.
inline LinearReducer opca(const SampleMatrix& plus, const SampleMatrix& minus,
                          Eigen::Index d, double ridge = 1e-8) {
  if (plus.m() != minus.m()) throw InvalidArgument("opca: dimension mismatch");
  detail::check_dims(d, plus.m());
  if (!(ridge >= 0.0)) throw InvalidArgument("opca: ridge must be >= 0");
  const Eigen::Index m = plus.m();
  const Matrix sp = plus.covariance();
  Matrix sm = minus.covariance();
  const double tr = sm.trace();
  sm.diagonal().array() += ridge * (tr > 0.0 ? tr : 1.0) / static_cast<double>(m);
  Eigen::LLT<Matrix> llt(sm);
  if (llt.info() != Eigen::Success)
    throw InvalidArgument("opca: irrelevance covariance is singular beyond ridge repair");
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(sp, sm);
  if (ges.info() != Eigen::Success) throw Error("generalized eigen decomposition failed");
  Matrix basis = ges.eigenvectors().rightCols(d).rowwise().reverse();
  Vector vals = ges.eigenvalues().tail(d).reverse();
  for (Eigen::Index k = 0; k < d; ++k) basis.col(k).normalize();
  detail::fix_signs(basis);
  return {std::move(basis), ReducerKind::opca, plus.mean(), std::move(vals)};
}

// Smallest k whose leading eigenvalues of cov(minus) hold `fraction` of its
// variance (0 when minus has no variance).
inline Eigen::Index variance_rank(const SampleMatrix& minus, double fraction = 0.95) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(minus.covariance(), Eigen::EigenvaluesOnly);
  const Vector vals = es.eigenvalues().reverse().cwiseMax(0.0);
  const double total = vals.sum();
  if (!(total > 0.0)) return 0;
  double acc = 0.0;
  for (Eigen::Index k = 0; k < vals.size(); ++k) {
    acc += vals(k);
    if (acc >= fraction * total * (1.0 - 1e-12)) return k + 1;
  }
  return vals.size();
}

// PCA of `plus` within the orthogonal complement of the top-k_remove
// principal subspace of `minus`.
inline LinearReducer cpca(const SampleMatrix& plus, const SampleMatrix& minus,
                          Eigen::Index d, std::optional<Eigen::Index> k_remove = std::nullopt) {
  if (plus.m() != minus.m()) throw InvalidArgument("cpca: dimension mismatch");
  detail::check_dims(d, plus.m());
  const Eigen::Index m = plus.m();
  const Eigen::Index k = k_remove.value_or(variance_rank(minus));
  if (k < 0) throw InvalidArgument("cpca: k_remove must be >= 0");
  if (k + d > m)
    throw InvalidArgument("cpca: k_remove + d exceeds the data dimension");
  Matrix proj = Matrix::Identity(m, m);
  Matrix removed(m, 0);
  if (k > 0) {
    removed = detail::top_eigen(minus.covariance(), k).first;
    proj -= removed * removed.transpose();
  }
  const Matrix s = proj * plus.covariance() * proj;
  auto [basis, vals] = detail::top_eigen(0.5 * (s + s.transpose()), d);
  // Re-project and re-orthonormalize so the basis is orthogonal to the
  // removed subspace to working precision.
  if (k > 0) basis -= removed * (removed.transpose() * basis);
  Eigen::HouseholderQR<Matrix> qr(basis);
  Matrix q = qr.householderQ() * Matrix::Identity(m, d);
  if (k > 0) q -= removed * (removed.transpose() * q);
  for (Eigen::Index c = 0; c < d; ++c) q.col(c).normalize();
  detail::fix_signs(q);
  return {std::move(q), ReducerKind::cpca, plus.mean(), std::move(vals)};
}

inline Matrix reduce(const LinearReducer& r, const SampleMatrix& x) {
  if (x.m() != r.basis.rows()) throw InvalidArgument("reduce: dimension mismatch");
  return (x.rows().rowwise() - r.centering.transpose()) * r.basis;
}

}  // namespace sdris
