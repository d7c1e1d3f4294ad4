#pragma once

// Maximum-entropy I-projection of a joint table onto the set of tables that
// share its marginals and its per-y conditional feature expectations.
//
// The projection has the exponential form
//
//   p_hat(x, y) = exp( phi(x) . psi(y) + a(x) + b(y) )
//
// and is found by maximizing the concave dual over the potentials (psi, a, b).
// Internally the features are centered under p(x) and whitened (rank
// deficient directions dropped), which leaves the constraint set unchanged
// and keeps the dual Hessian nonsingular up to the obvious gauge directions.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sdris/error.hpp"
#include "sdris/joint_table.hpp"

namespace sdris {

// phi : X -> R^d, stored as an |X| x d matrix.
class FeatureMap {
 public:
  FeatureMap() = default;
  explicit FeatureMap(Matrix values) : values_(std::move(values)) {
    if (values_.rows() < 1 || values_.cols() < 1)
      throw InvalidArgument("feature map needs at least one row and column");
    if (!values_.allFinite())
      throw InvalidArgument("feature map has non-finite entries");
  }

  const Matrix& values() const { return values_; }
  Eigen::Index nx() const { return values_.rows(); }
  Eigen::Index dim() const { return values_.cols(); }

  // Checks |X| agreement with a table and d <= |X| - 1.
  void check_compatible(const JointTable& p) const {
    if (nx() != p.nx())
      throw InvalidArgument("feature map has " + std::to_string(nx()) +
                            " rows but the table has |X| = " +
                            std::to_string(p.nx()));
    if (dim() > p.nx() - 1)
      throw InvalidArgument("feature dimension exceeds |X| - 1");
  }

 private:
  Matrix values_;
};

enum class SolverAlgorithm {
  newton,         // second-order ascent on the dual (default)
  dual_gradient,  // exact marginal rescaling + first-order steps on psi
  scaling,        // GIS-style scaling on shifted nonnegative features
};

inline const char* to_string(SolverAlgorithm a) {
  switch (a) {
    case SolverAlgorithm::newton: return "newton";
    case SolverAlgorithm::dual_gradient: return "dual-gradient";
    case SolverAlgorithm::scaling: return "scaling";
  }
  return "?";
}

inline SolverAlgorithm parse_solver_algorithm(const std::string& s) {
  if (s == "newton") return SolverAlgorithm::newton;
  if (s == "dual-gradient") return SolverAlgorithm::dual_gradient;
  if (s == "scaling") return SolverAlgorithm::scaling;
  throw InvalidArgument("unknown solver algorithm '" + s + "'");
}

struct SolverOptions {
  double tolerance = 1e-8;   // max absolute constraint residual
  int max_iterations = 50000;
  SolverAlgorithm algorithm = SolverAlgorithm::newton;
  double potential_cap = 1e4;

  void validate() const {
    if (!(tolerance > 0.0)) throw InvalidArgument("tolerance must be > 0");
    if (max_iterations < 1)
      throw InvalidArgument("max_iterations must be >= 1");
    if (!(potential_cap > 0.0))
      throw InvalidArgument("potential_cap must be > 0");
  }
};

// Exponential-form parameters; psi is |Y| x d, a is |X|, b is |Y|.
struct Potentials {
  Matrix psi;
  Vector a;
  Vector b;
};

struct MaxEntSolution {
  JointTable p_hat;
  Matrix psi;
  Vector a;
  Vector b;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> residual_trace;

  Potentials potentials() const { return {psi, a, b}; }

  // exp(phi psi^T + a 1^T + 1 b^T), the table implied by the potentials.
  Matrix reconstruct(const FeatureMap& phi) const {
    Matrix s = phi.values() * psi.transpose();
    s.colwise() += a;
    s.rowwise() += b.transpose();
    return s.array().exp().matrix();
  }
};

struct ConstraintTargets {
  Matrix means;  // |Y| x d, row y = sum_x phi(x) p(x|y)
  Vector px;
  Vector py;
};

inline ConstraintTargets constraint_targets(const FeatureMap& phi,
                                            const JointTable& p) {
  if (phi.nx() != p.nx())
    throw InvalidArgument("constraint_targets: |X| mismatch");
  return {p.conditionals_x_given_y().transpose() * phi.values(),
          p.marginal_x(), p.marginal_y()};
}

// Max absolute violation of the marginal constraints and of the joint-weighted
// expectation constraints sum_x phi(x) (p_hat(x,y) - p(x,y)) = 0.
inline double residual(const Matrix& p_hat, const FeatureMap& phi,
                       const JointTable& p) {
  const Matrix diff = p_hat - p.probs();
  double r = diff.rowwise().sum().cwiseAbs().maxCoeff();
  r = std::max(r, diff.colwise().sum().cwiseAbs().maxCoeff());
  r = std::max(r, (phi.values().transpose() * diff).cwiseAbs().maxCoeff());
  return r;
}

inline double residual(const MaxEntSolution& sol, const FeatureMap& phi,
                       const JointTable& p) {
  if (sol.p_hat.nx() != p.nx() || sol.p_hat.ny() != p.ny() ||
      phi.nx() != p.nx())
    throw InvalidArgument("residual: shape mismatch");
  return residual(sol.p_hat.probs(), phi, p);
}

namespace detail {

// Dual of the I-projection in centered, whitened feature coordinates.
class MaxEntDual {
 public:
  MaxEntDual(const FeatureMap& phi, const JointTable& p,
             const SolverOptions& opts)
      : phi_(phi), p_(p), opts_(opts) {
    P_ = p.probs();
    px_ = p.marginal_x();
    py_ = p.marginal_y();
    mean_ = phi.values().transpose() * px_;
    const Matrix centered = phi.values().rowwise() - mean_.transpose();

    // Weighted SVD of the centered features; keep the numerically nonzero
    // directions.
    const Matrix weighted = px_.cwiseSqrt().asDiagonal() * centered;
    Eigen::JacobiSVD<Matrix> svd(weighted, Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    const double scale = 1.0 + phi.values().cwiseAbs().maxCoeff();
    const double smax = s.size() > 0 ? s(0) : 0.0;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > 1e-9 * smax && s(i) > 1e-12 * scale) ++rank;
    rank_ = rank;
    sv_ = s.head(rank);
    V_ = svd.matrixV().leftCols(rank);
    W_ = centered * V_ * sv_.cwiseInverse().asDiagonal();  // |X| x r
    T_ = W_.transpose() * P_;                               // r x |Y|

    a_ = Vector::Zero(p.nx());
    b_ = Vector::Zero(p.ny());
    psi_ = Matrix::Zero(p.ny(), rank_);
  }

  void warm_start(const Potentials& init) {
    if (init.a.size() != p_.nx() || init.b.size() != p_.ny() ||
        init.psi.rows() != p_.ny() || init.psi.cols() != phi_.dim())
      throw InvalidArgument("warm start potentials have the wrong shape");
    if (!init.a.allFinite() || !init.b.allFinite() || !init.psi.allFinite())
      throw InvalidArgument("warm start potentials are not finite");
    a_ = init.a;
    b_ = init.b + init.psi * mean_;
    psi_ = init.psi * V_ * sv_.asDiagonal();
  }

  MaxEntSolution solve() {
    switch (opts_.algorithm) {
      case SolverAlgorithm::newton: run_newton(); break;
      case SolverAlgorithm::dual_gradient: run_dual_gradient(); break;
      case SolverAlgorithm::scaling: run_scaling(); break;
    }
    return finish();
  }

 private:
  struct State {
    Vector a;
    Vector b;
    Matrix psi;
  };

  State state() const { return {a_, b_, psi_}; }

  Matrix log_q(const State& s) const {
    Matrix lq = W_ * s.psi.transpose();
    lq.colwise() += s.a;
    lq.rowwise() += s.b.transpose();
    return lq;
  }

  double dual_value(const State& s, const Matrix& q) const {
    double v = s.a.dot(px_) + s.b.dot(py_) - q.sum();
    if (rank_ > 0) v += (s.psi.transpose().cwiseProduct(T_)).sum();
    return v;
  }

  struct Residuals {
    Vector ra;  // px - q_x
    Vector rb;  // py - q_y
    Matrix rpsi;  // r x |Y|
    double max_original = 0.0;
  };

  Residuals residuals(const Matrix& q) const {
    Residuals r;
    r.ra = px_ - q.rowwise().sum();
    r.rb = py_ - q.colwise().sum().transpose();
    r.rpsi = T_ - W_.transpose() * q;
    // Measured in the caller's coordinates: sum_x phi(x) (p - q).
    const Matrix expect = phi_.values().transpose() * (P_ - q);
    r.max_original = std::max({r.ra.cwiseAbs().maxCoeff(),
                               r.rb.cwiseAbs().maxCoeff(),
                               expect.cwiseAbs().maxCoeff()});
    if (!std::isfinite(r.max_original))
      r.max_original = std::numeric_limits<double>::infinity();
    return r;
  }

  double directional(const Residuals& r, const State& step) const {
    double v = r.ra.dot(step.a) + r.rb.dot(step.b);
    if (rank_ > 0) v += (step.psi.transpose().cwiseProduct(r.rpsi)).sum();
    return v;
  }

  static State axpy(const State& s, double t, const State& d) {
    return {s.a + t * d.a, s.b + t * d.b, s.psi + t * d.psi};
  }

  void set_state(const State& s) {
    a_ = s.a;
    b_ = s.b;
    psi_ = s.psi;
  }

  // Moves along exact null directions so that sum_y p(y) psi(y) = 0 and
  // sum_x p(x) a(x) = 0, then enforces the potential cap.
  void center_and_check() {
    if (rank_ > 0) {
      const Vector v = psi_.transpose() * py_;
      psi_.rowwise() -= v.transpose();
      a_ += W_ * v;
    }
    const double c = a_.dot(px_);
    a_.array() -= c;
    b_.array() += c;
    const double m = std::max({a_.cwiseAbs().maxCoeff(),
                               b_.cwiseAbs().maxCoeff(),
                               rank_ > 0 ? psi_.cwiseAbs().maxCoeff() : 0.0});
    if (!(m <= opts_.potential_cap))
      throw UnboundedPotentials(
          "maxent potentials exceeded the cap of " +
          std::to_string(opts_.potential_cap) +
          "; constraint targets are on or outside the feasible boundary");
  }

  // Exact block maximization over a, then over b.
  void rescale_marginals() {
    Matrix q = log_q(state()).array().exp().matrix();
    a_.array() += (px_.array() / q.rowwise().sum().array()).log();
    q = log_q(state()).array().exp().matrix();
    b_.array() +=
        (py_.array() / q.colwise().sum().transpose().array()).log();
  }

  bool record(double r) {
    trace_.push_back(r);
    last_residual_ = r;
    return r <= opts_.tolerance;
  }

  // Newton direction on the dual. The per-y blocks (b(y), psi(y)) are
  // eliminated through a Schur complement onto a; the remaining gauge null
  // space span{1, W} is removed by a rank-(r+1) term, which selects the
  // solution with p(x)-orthogonal a-increment.
  State newton_direction(const Matrix& q, const Residuals& res) const {
    const Eigen::Index nx = p_.nx(), ny = p_.ny(), k = rank_ + 1;
    Matrix F(nx, k);
    F.col(0).setOnes();
    if (rank_ > 0) F.rightCols(rank_) = W_;
    const double ridge = 1e-13 * std::max(q.maxCoeff(), 1e-300);

    Matrix S = Matrix::Zero(nx, nx);
    Vector rhs = res.ra;
    Matrix G(ny * k, nx);
    std::vector<Eigen::LLT<Matrix>> chol;
    chol.reserve(static_cast<std::size_t>(ny));
    Matrix H(ny, k);  // L^{-1} r_u per block, stored row-wise
    for (Eigen::Index y = 0; y < ny; ++y) {
      const Matrix Ct = F.transpose() * q.col(y).asDiagonal();  // k x |X|
      Matrix K = Ct * F;
      K.diagonal().array() += ridge;
      chol.emplace_back(K);
      const auto& L = chol.back().matrixL();
      Matrix Gy = L.solve(Ct);
      Vector ru(k);
      ru(0) = res.rb(y);
      if (rank_ > 0) ru.tail(rank_) = res.rpsi.col(y);
      Vector hy = L.solve(ru);
      rhs -= Gy.transpose() * hy;
      G.middleRows(y * k, k) = Gy;
      H.row(y) = hy.transpose();
    }
    S.selfadjointView<Eigen::Lower>().rankUpdate(G.transpose(), -1.0);
    S = S.selfadjointView<Eigen::Lower>();
    S.diagonal() += q.rowwise().sum();
    S.diagonal().array() += ridge;
    const Matrix B = px_.asDiagonal() * F;
    S.noalias() += B * B.transpose() * (1.0 / std::max(px_.sum(), 1e-300));

    State step;
    step.a = S.ldlt().solve(rhs);
    step.b.resize(ny);
    step.psi.resize(ny, rank_);
    for (Eigen::Index y = 0; y < ny; ++y) {
      const Vector t = H.row(y).transpose() - G.middleRows(y * k, k) * step.a;
      const Vector du =
          chol[static_cast<std::size_t>(y)].matrixU().solve(t);
      step.b(y) = du(0);
      if (rank_ > 0) step.psi.row(y) = du.tail(rank_).transpose();
    }
    return step;
  }

  void run_newton() {
    State cur = state();
    Matrix q = log_q(cur).array().exp().matrix();
    for (iterations_ = 0; iterations_ < opts_.max_iterations; ++iterations_) {
      Residuals res = residuals(q);
      if (record(res.max_original)) {
        converged_ = true;
        return;
      }
      const State step = newton_direction(q, res);
      const double slope = directional(res, step);
      const double d0 = dual_value(cur, q);
      bool accepted = false;
      double t = 1.0;
      for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
        State trial = axpy(cur, t, step);
        Matrix qt = log_q(trial).array().exp().matrix();
        if (!qt.allFinite()) continue;
        const double dt = dual_value(trial, qt);
        bool ok = std::isfinite(dt) && dt >= d0 + 1e-4 * t * slope;
        // Near the optimum the dual is flat to rounding; accept steps that
        // shrink the residual instead.
        if (!ok && residuals(qt).max_original <= 0.5 * res.max_original)
          ok = true;
        if (ok) {
          cur = std::move(trial);
          q = std::move(qt);
          accepted = true;
          break;
        }
      }
      set_state(cur);
      center_and_check();
      cur = state();
      if (!accepted) break;
      q = log_q(cur).array().exp().matrix();
    }
    set_state(cur);
    record(residuals(log_q(cur).array().exp().matrix()).max_original);
  }

  void run_dual_gradient() {
    double step = 1.0;
    for (iterations_ = 0; iterations_ < opts_.max_iterations; ++iterations_) {
      rescale_marginals();
      State cur = state();
      Matrix q = log_q(cur).array().exp().matrix();
      Residuals res = residuals(q);
      if (record(res.max_original)) {
        converged_ = true;
        return;
      }
      if (rank_ == 0) continue;
      State dir{Vector::Zero(p_.nx()), Vector::Zero(p_.ny()),
                py_.cwiseInverse().asDiagonal() * res.rpsi.transpose()};
      const double slope = directional(res, dir);
      const double d0 = dual_value(cur, q);
      bool accepted = false;
      step = std::min(step * 2.0, 1e6);
      for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
        State trial = axpy(cur, step, dir);
        Matrix qt = log_q(trial).array().exp().matrix();
        const double dt = dual_value(trial, qt);
        if (std::isfinite(dt) && dt >= d0 + 1e-4 * step * slope) {
          set_state(trial);
          accepted = true;
          break;
        }
      }
      center_and_check();
      if (!accepted) break;
    }
    record(residuals(log_q(state()).array().exp().matrix()).max_original);
  }

  void run_scaling() {
    // Shift each feature to be nonnegative and add a slack feature so that
    // every row sums to the constant C.
    Matrix g;
    Vector shift;
    double C = 0.0;
    if (rank_ > 0) {
      shift = W_.colwise().minCoeff().transpose();
      g = W_.rowwise() - shift.transpose();
      C = g.rowwise().sum().maxCoeff();
    }
    const Vector slack =
        rank_ > 0 ? Vector((C - g.rowwise().sum().array()).matrix())
                  : Vector();
    for (iterations_ = 0; iterations_ < opts_.max_iterations; ++iterations_) {
      rescale_marginals();
      Matrix q = log_q(state()).array().exp().matrix();
      if (record(residuals(q).max_original)) {
        converged_ = true;
        return;
      }
      if (rank_ == 0 || !(C > 0.0)) continue;
      constexpr double kFloor = 1e-300;
      const Matrix target = g.transpose() * P_;  // r x |Y|
      const Matrix model = g.transpose() * q;
      const Vector target0 = P_.transpose() * slack;
      const Vector model0 = q.transpose() * slack;
      for (Eigen::Index y = 0; y < p_.ny(); ++y) {
        const double d0 = std::log(std::max(target0(y), kFloor) /
                                   std::max(model0(y), kFloor)) / C;
        double bshift = C * d0;
        for (Eigen::Index k = 0; k < rank_; ++k) {
          const double dk = std::log(std::max(target(k, y), kFloor) /
                                     std::max(model(k, y), kFloor)) / C;
          psi_(y, k) += dk - d0;
          bshift -= shift(k) * (dk - d0);
        }
        b_(y) += bshift;
      }
      center_and_check();
    }
    rescale_marginals();
    record(residuals(log_q(state()).array().exp().matrix()).max_original);
  }

  MaxEntSolution finish() {
    // Back to the caller's feature coordinates.
    Matrix psi = rank_ > 0
                     ? Matrix(psi_ * (V_ * sv_.cwiseInverse().asDiagonal()).transpose())
                     : Matrix::Zero(p_.ny(), phi_.dim());
    Vector a = a_;
    Vector b = b_ - psi * mean_;

    // Gauge: sum_y p(y) psi(y) = 0, sum_x p(x) a(x) = 0.
    const Vector v = psi.transpose() * py_;
    psi.rowwise() -= v.transpose();
    a += phi_.values() * v;
    const double c = a.dot(px_);
    a.array() -= c;
    b.array() += c;

    Matrix s = phi_.values() * psi.transpose();
    s.colwise() += a;
    s.rowwise() += b.transpose();
    Matrix q = s.array().exp().matrix();
    const double z = q.sum();
    if (!(z > 0.0) || !std::isfinite(z))
      throw UnboundedPotentials("maxent solution is not normalizable");
    q /= z;
    b.array() -= std::log(z);

    const double m = std::max({a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff(),
                               psi.size() ? psi.cwiseAbs().maxCoeff() : 0.0});
    if (!(m <= opts_.potential_cap))
      throw UnboundedPotentials("maxent potentials exceeded the cap");

    JointTable p_hat =
        JointTable::from_probabilities(q, p_.x_labels(), p_.y_labels());
    MaxEntSolution sol{std::move(p_hat), std::move(psi), std::move(a),
                       std::move(b)};
    sol.residual = residual(sol.p_hat.probs(), phi_, p_);
    sol.iterations = iterations_;
    sol.converged = sol.residual <= opts_.tolerance;
    sol.residual_trace = std::move(trace_);
    return sol;
  }

  const FeatureMap& phi_;
  const JointTable& p_;
  SolverOptions opts_;
  Matrix P_;
  Vector px_, py_, mean_;
  Eigen::Index rank_ = 0;
  Vector sv_;
  Matrix V_, W_, T_;
  Vector a_, b_;
  Matrix psi_;
  int iterations_ = 0;
  bool converged_ = false;
  double last_residual_ = std::numeric_limits<double>::infinity();
  std::vector<double> trace_;
};

}  // namespace detail

// I-projection of p onto P(phi, p). Returns the best iterate with
// converged = false when the iteration cap is hit; throws
// UnboundedPotentials when the potentials leave the admissible box.
inline MaxEntSolution solve_maxent(
    const FeatureMap& phi, const JointTable& p, const SolverOptions& opts = {},
    const std::optional<Potentials>& warm_start = std::nullopt) {
  opts.validate();
  phi.check_compatible(p);
  detail::MaxEntDual dual(phi, p, opts);
  if (warm_start) dual.warm_start(*warm_start);
  return dual.solve();
}

struct MeasurementInfo {
  double value;  // nats
  MaxEntSolution solution;
};

// I_M[phi, p] = I[p_hat_phi]: the information in the measurement of phi.
inline MeasurementInfo measurement_information(
    const FeatureMap& phi, const JointTable& p, const SolverOptions& opts = {},
    const std::optional<Potentials>& warm_start = std::nullopt) {
  MaxEntSolution sol = solve_maxent(phi, p, opts, warm_start);
  const double value = mutual_information(sol.p_hat);
  return {value, std::move(sol)};
}

}  // namespace sdris
