#pragma once

// Feature optimization for the relevance/irrelevance tradeoff
//
//   L[phi] = I_M[phi, p+] - lambda * I_M[phi, p-]
//
// and its multi-table generalization sum_i s_i w_i I_M[phi, p_i]. The
// gradient of each I_M term is -p(x) (<psi>_{p_hat(y|x)} - <psi>_{p(y|x)}),
// i.e. minus the entropy gradient of the I-projection.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
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

// An inner I-projection failed; `side` names the offending table
// ("relevance", "irrelevance", or "term <i>").
class InnerSolveError : public Error {
 public:
  InnerSolveError(std::string side, const std::string& what,
                  bool unbounded = false)
      : Error(side + ": " + what), side_(std::move(side)), unbounded_(unbounded) {}
  const std::string& side() const { return side_; }
  bool unbounded() const { return unbounded_; }

 private:
  std::string side_;
  bool unbounded_;
};

struct Objective {
  double lambda = 0.0;
  JointTable relevance;
  JointTable irrelevance;
  Eigen::Index d = 1;

  void validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
      throw InvalidArgument("lambda must be finite and >= 0");
    if (d < 1) throw InvalidArgument("feature dimension must be >= 1");
    if (relevance.nx() != irrelevance.nx() ||
        relevance.x_labels() != irrelevance.x_labels())
      throw InvalidArgument("relevance and irrelevance tables must share X");
    if (d > relevance.nx() - 1)
      throw InvalidArgument("feature dimension exceeds |X| - 1");
  }
};

enum class Sign { plus, minus };

struct ObjectiveTerm {
  JointTable table;
  Sign sign = Sign::plus;
  double weight = 1.0;

  double signed_weight() const { return sign == Sign::plus ? weight : -weight; }
};

enum class AscentDirection {
  gradient,  // (preconditioned) steepest ascent
  lbfgs,     // limited-memory BFGS on the same inner product
};

inline const char* to_string(AscentDirection d) {
  return d == AscentDirection::gradient ? "gradient" : "lbfgs";
}

inline AscentDirection parse_ascent_direction(const std::string& s) {
  if (s == "gradient") return AscentDirection::gradient;
  if (s == "lbfgs") return AscentDirection::lbfgs;
  throw InvalidArgument("unknown ascent direction '" + s + "' (gradient, lbfgs)");
}

struct StepRule {
  double initial_step = 1.0;
  double shrink = 0.5;
  double armijo = 1e-4;
  int max_backtracks = 40;
  AscentDirection direction = AscentDirection::lbfgs;
  int memory = 10;  // lbfgs pairs kept
  // Gradient steps start at min(initial_step, previous accepted step /
  // shrink) instead of at initial_step.
  bool reuse_step = true;
  // Scale gradient steps (and the lbfgs initial Hessian) by 1 / p_ref(x):
  // the p_ref-weighted inner product in which the reported gauge is
  // orthonormal.
  bool precondition = true;
  // Re-gauge during ascent once an entry of phi exceeds this or the columns
  // become nearly collinear.
  double regauge_threshold = 1e3;
};

struct FitOptions {
  int max_outer_iters = 2000;
  double grad_tol = 1e-6;
  int restarts = 5;  // random starts in addition to the SVD start
  bool svd_start = true;
  std::uint64_t seed = 0;
  StepRule step;
  SolverOptions solver;
  int jobs = 1;

  void validate() const {
    if (max_outer_iters < 0) throw InvalidArgument("max_outer_iters < 0");
    if (!(grad_tol > 0.0)) throw InvalidArgument("grad_tol must be > 0");
    if (restarts < 0) throw InvalidArgument("restarts must be >= 0");
    if (restarts == 0 && !svd_start)
      throw InvalidArgument("fit needs at least one start");
    if (!(step.initial_step > 0.0) || !(step.shrink > 0.0 && step.shrink < 1.0) ||
        !(step.armijo > 0.0 && step.armijo < 1.0) || step.max_backtracks < 1 ||
        step.memory < 1 || !(step.regauge_threshold > 0.0))
      throw InvalidArgument("invalid step rule");
    solver.validate();
  }
};

struct TracePoint {
  double objective;
  double grad_norm;
};

struct FitResult {
  FeatureMap phi;
  double objective_value = 0.0;
  double info_plus = 0.0;
  double info_minus = 0.0;
  double grad_norm = 0.0;
  std::vector<double> term_infos;
  std::vector<std::optional<MaxEntSolution>> solutions;  // per term
  std::vector<TracePoint> trace;
  std::uint64_t seed = 0;
  int start_index = 0;  // 0 = SVD start when enabled
  int iterations = 0;
  int evaluations = 0;            // objective evaluations, line search included
  long long inner_iterations = 0;  // summed maxent solver iterations
  bool converged = false;
  bool diverged = false;
  std::string termination;
};

// ---------------------------------------------------------------------------
// Gauge fixing

struct GaugeFix {
  Matrix phi;   // (phi - 1 mean^T) R^{-1}
  Vector mean;  // p_ref-weighted column means
  Matrix R;     // d x d, upper triangular up to column signs
};

// Centers columns under w, orthonormalizes them in the w-weighted inner
// product by thin QR, and orients each column so that its largest-magnitude
// entry is positive. Nearly collinear columns are only centered.
inline GaugeFix gauge_fix(const Matrix& phi, const Vector& w) {
  const Eigen::Index d = phi.cols();
  GaugeFix g;
  g.mean = phi.transpose() * w / w.sum();
  const Matrix centered = phi.rowwise() - g.mean.transpose();
  const Matrix weighted = w.cwiseSqrt().asDiagonal() * centered;
  Eigen::HouseholderQR<Matrix> qr(weighted);
  Matrix R = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();
  const Vector diag = R.diagonal().cwiseAbs();
  if (diag.size() == 0 || !(diag.minCoeff() > 1e-10 * std::max(diag.maxCoeff(), 1e-300)))
    R = Matrix::Identity(d, d);
  Matrix fixed = R.triangularView<Eigen::Upper>()
                     .solve<Eigen::OnTheRight>(centered);
  for (Eigen::Index k = 0; k < d; ++k) {
    Eigen::Index imax = 0;
    fixed.col(k).cwiseAbs().maxCoeff(&imax);
    if (fixed(imax, k) < 0.0) {
      fixed.col(k) *= -1.0;
      R.row(k) *= -1.0;
    }
  }
  g.phi = std::move(fixed);
  g.R = std::move(R);
  return g;
}

// Re-expresses potentials for the gauge-fixed features: the I-projection is
// unchanged, psi' = psi R^T and b' = b + psi mean.
inline Potentials transform_potentials(const Potentials& p, const GaugeFix& g) {
  return {p.psi * g.R.transpose(), p.a, p.b + p.psi * g.mean};
}

inline MaxEntSolution transform_solution(MaxEntSolution s, const GaugeFix& g) {
  s.b += s.psi * g.mean;
  s.psi = s.psi * g.R.transpose();
  return s;
}

// ---------------------------------------------------------------------------
// Gradients

// dH[p_hat_phi]/dphi(x) = p(x) (<psi>_{p_hat(y|x)} - <psi>_{p(y|x)}).
inline Matrix entropy_gradient(const FeatureMap& phi, const JointTable& p,
                               const MaxEntSolution& sol) {
  phi.check_compatible(p);
  if (!sol.converged)
    throw InvalidArgument("entropy_gradient needs a converged I-projection");
  if (sol.psi.rows() != p.ny() || sol.psi.cols() != phi.dim())
    throw InvalidArgument("entropy_gradient: potentials do not match");
  const Matrix& ph = sol.p_hat.probs();
  const Matrix& pp = p.probs();
  const Vector px = p.marginal_x();
  const Vector phx = ph.rowwise().sum();
  Matrix model = ph * sol.psi;  // row x: sum_y p_hat(x,y) psi(y)
  Matrix data = pp * sol.psi;
  for (Eigen::Index x = 0; x < p.nx(); ++x)
    model.row(x) *= px(x) / phx(x);
  return model - data;
}

struct TermEvaluation {
  double objective = 0.0;
  long long inner_iterations = 0;
  std::vector<double> infos;
  Matrix gradient;
  std::vector<std::optional<MaxEntSolution>> solutions;
};

namespace detail {

inline std::string term_side(std::size_t i, std::size_t n_terms, bool two_sided) {
  if (two_sided && n_terms == 2) return i == 0 ? "relevance" : "irrelevance";
  return "term " + std::to_string(i);
}

inline TermEvaluation evaluate_terms(
    const std::vector<ObjectiveTerm>& terms, const FeatureMap& phi,
    const SolverOptions& solver,
    const std::vector<std::optional<Potentials>>& warm, bool two_sided) {
  TermEvaluation ev;
  ev.infos.assign(terms.size(), 0.0);
  ev.solutions.resize(terms.size());
  ev.gradient = Matrix::Zero(phi.nx(), phi.dim());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const ObjectiveTerm& t = terms[i];
    if (t.weight == 0.0) continue;
    const std::string side = term_side(i, terms.size(), two_sided);
    try {
      MeasurementInfo m = measurement_information(
          phi, t.table, solver,
          i < warm.size() ? warm[i] : std::optional<Potentials>{});
      if (!m.solution.converged)
        throw InnerSolveError(side, "I-projection did not converge (residual " +
                                        std::to_string(m.solution.residual) + ")");
      ev.infos[i] = m.value;
      ev.inner_iterations += m.solution.iterations;
      ev.objective += t.signed_weight() * m.value;
      ev.gradient -= t.signed_weight() * entropy_gradient(phi, t.table, m.solution);
      ev.solutions[i] = std::move(m.solution);
    } catch (const InnerSolveError&) {
      throw;
    } catch (const UnboundedPotentials& e) {
      throw InnerSolveError(side, e.what(), true);
    }
  }
  return ev;
}

inline void validate_terms(const std::vector<ObjectiveTerm>& terms,
                           Eigen::Index d) {
  if (terms.empty()) throw InvalidArgument("no objective terms");
  bool has_plus = false;
  for (const auto& t : terms) {
    if (!(t.weight >= 0.0) || !std::isfinite(t.weight))
      throw InvalidArgument("term weights must be finite and >= 0");
    if (t.table.nx() != terms.front().table.nx() ||
        t.table.x_labels() != terms.front().table.x_labels())
      throw InvalidArgument("all tables must share X");
    if (t.sign == Sign::plus) has_plus = true;
  }
  if (!has_plus) throw InvalidArgument("at least one relevance (+) term needed");
  if (d < 1 || d > terms.front().table.nx() - 1)
    throw InvalidArgument("feature dimension must be in [1, |X| - 1]");
}

inline const JointTable& reference_table(const std::vector<ObjectiveTerm>& terms) {
  for (const auto& t : terms)
    if (t.sign == Sign::plus) return t.table;
  return terms.front().table;
}

inline std::vector<ObjectiveTerm> two_sided_terms(const Objective& obj) {
  return {{obj.relevance, Sign::plus, 1.0},
          {obj.irrelevance, Sign::minus, obj.lambda}};
}

inline constexpr double kTightInnerTolerance = 1e-12;

// Top-d left singular vectors of the pointwise mutual information matrix.
inline Matrix svd_start(const JointTable& p, Eigen::Index d, Rng& rng) {
  Matrix pmi = p.probs();
  const Vector px = p.marginal_x(), py = p.marginal_y();
  for (Eigen::Index y = 0; y < p.ny(); ++y)
    for (Eigen::Index x = 0; x < p.nx(); ++x)
      pmi(x, y) = std::log(std::max(pmi(x, y), 1e-12) / (px(x) * py(y)));
  Eigen::JacobiSVD<Matrix> svd(pmi, Eigen::ComputeThinU);
  Matrix start = rng.normal_matrix(p.nx(), d, 0.1);
  const Eigen::Index k = std::min<Eigen::Index>(d, svd.matrixU().cols());
  start.leftCols(k) = svd.matrixU().leftCols(k);
  return start;
}

// Condition number of the gauge triangle, used to spot collinear columns.
inline double gauge_condition(const GaugeFix& g) {
  const Vector d = g.R.diagonal().cwiseAbs();
  return d.maxCoeff() / std::max(d.minCoeff(), 1e-300);
}

// Two-loop recursion for H * grad, with H0 = gamma * diag(h0).
inline Matrix lbfgs_direction(const Matrix& grad, const std::vector<Matrix>& s_hist,
                              const std::vector<Matrix>& y_hist, const Vector& h0) {
  const std::size_t m = s_hist.size();
  std::vector<double> alpha(m), rho(m);
  Matrix q = grad;
  for (std::size_t k = m; k-- > 0;) {
    rho[k] = 1.0 / (s_hist[k].array() * y_hist[k].array()).sum();
    alpha[k] = rho[k] * (s_hist[k].array() * q.array()).sum();
    q -= alpha[k] * y_hist[k];
  }
  const Matrix& sl = s_hist.back();
  const Matrix& yl = y_hist.back();
  const Matrix hy = h0.asDiagonal() * yl;
  const double gamma = (sl.array() * yl.array()).sum() / (yl.array() * hy.array()).sum();
  Matrix r = gamma * (h0.asDiagonal() * q);
  for (std::size_t k = 0; k < m; ++k) {
    const double beta = rho[k] * (y_hist[k].array() * r.array()).sum();
    r += (alpha[k] - beta) * s_hist[k];
  }
  return r;
}

// Ascent with Armijo backtracking from one starting point.
inline FitResult ascend(const std::vector<ObjectiveTerm>& terms,
                        const Matrix& start, const FitOptions& opts,
                        bool two_sided) {
  const Vector w = reference_table(terms).marginal_x();
  const Vector h0 = opts.step.precondition ? Vector(w.cwiseInverse())
                                           : Vector(Vector::Ones(w.size()));
  const bool use_lbfgs = opts.step.direction == AscentDirection::lbfgs;

  FitResult r;
  r.seed = opts.seed;
  SolverOptions solver = opts.solver;
  auto grad_norm = [](const Matrix& m) { return m.cwiseAbs().maxCoeff(); };
  auto warm_of = [](const TermEvaluation& ev) {
    std::vector<std::optional<Potentials>> warm;
    for (const auto& s : ev.solutions)
      warm.push_back(s ? std::optional<Potentials>(s->potentials()) : std::nullopt);
    return warm;
  };
  // Moves the current point into the canonical gauge; the objective and the
  // I-projections are unchanged.
  auto regauge = [&](Matrix& phi, TermEvaluation& ev) {
    const GaugeFix g = gauge_fix(phi, w);
    phi = g.phi;
    ev.gradient = ev.gradient * g.R.transpose();
    for (auto& s : ev.solutions)
      if (s) s = transform_solution(std::move(*s), g);
  };

  Matrix phi = gauge_fix(start, w).phi;
  TermEvaluation cur = evaluate_terms(terms, FeatureMap(phi), solver, {}, two_sided);
  r.evaluations = 1;
  r.inner_iterations = cur.inner_iterations;
  r.trace.push_back({cur.objective, grad_norm(cur.gradient)});
  r.termination = "iteration cap";

  std::vector<Matrix> s_hist, y_hist;
  bool canonical = true;
  double last_step = opts.step.initial_step;
  int it = 0;
  for (; it < opts.max_outer_iters; ++it) {
    // Convergence is judged in the canonical gauge.
    if (grad_norm(cur.gradient) <= opts.grad_tol && !canonical) {
      regauge(phi, cur);
      canonical = true;
      s_hist.clear();
      y_hist.clear();
    }
    if (grad_norm(cur.gradient) <= opts.grad_tol) {
      r.converged = true;
      r.termination = "gradient tolerance";
      break;
    }
    const bool quasi_newton = use_lbfgs && !s_hist.empty();
    Matrix dir = quasi_newton ? lbfgs_direction(cur.gradient, s_hist, y_hist, h0)
                              : Matrix(h0.asDiagonal() * cur.gradient);
    double slope = (dir.array() * cur.gradient.array()).sum();
    if (!(slope > 0.0)) {
      s_hist.clear();
      y_hist.clear();
      dir = h0.asDiagonal() * cur.gradient;
      slope = (dir.array() * cur.gradient.array()).sum();
    }
    const auto warm = warm_of(cur);
    // Objective differences near a maximum are O(|grad|^2); keep the inner
    // error below them.
    const double gn = grad_norm(cur.gradient);
    const double wanted = std::max(kTightInnerTolerance, 1e-3 * gn * gn);
    if (wanted < solver.tolerance) {
      solver.tolerance = wanted;
      cur = evaluate_terms(terms, FeatureMap(phi), solver, warm, two_sided);
      ++r.evaluations;
      r.inner_iterations += cur.inner_iterations;
      r.trace.back() = {cur.objective, grad_norm(cur.gradient)};
    }

    double t = (quasi_newton || !opts.step.reuse_step)
                   ? opts.step.initial_step
                   : std::min(opts.step.initial_step, last_step / opts.step.shrink);
    bool accepted = false;
    int unbounded = 0, tried = 0;
    TermEvaluation next;
    Matrix trial;
    for (int bt = 0; bt < opts.step.max_backtracks; ++bt, t *= opts.step.shrink) {
      trial = phi + t * dir;
      ++tried;
      ++r.evaluations;
      try {
        next = evaluate_terms(terms, FeatureMap(trial), solver, warm, two_sided);
      } catch (const InnerSolveError& e) {
        if (e.unbounded()) ++unbounded;
        continue;
      } catch (const InvalidArgument&) {
        continue;
      }
      r.inner_iterations += next.inner_iterations;
      if (next.objective >= cur.objective + opts.step.armijo * t * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (quasi_newton) {
        // Fall back to a gradient step before giving up.
        s_hist.clear();
        y_hist.clear();
        continue;
      }
      // Near a maximum the Armijo test can fail on inner-solve error alone;
      // retry once with the tightest inner tolerance.
      if (solver.tolerance > kTightInnerTolerance && unbounded < tried) {
        solver.tolerance = kTightInnerTolerance;
        cur = evaluate_terms(terms, FeatureMap(phi), solver, warm, two_sided);
        ++r.evaluations;
        r.inner_iterations += cur.inner_iterations;
        r.trace.back() = {cur.objective, grad_norm(cur.gradient)};
        continue;
      }
      r.diverged = unbounded == tried;
      r.termination = r.diverged ? "unbounded potentials" : "line search stalled";
      break;
    }
    if (!quasi_newton) last_step = t;

    if (use_lbfgs) {
      // Minimizing -L: y = -(G_new - G_old).
      Matrix sk = trial - phi;
      Matrix yk = cur.gradient - next.gradient;
      if ((sk.array() * yk.array()).sum() > 1e-12 * sk.norm() * yk.norm()) {
        s_hist.push_back(std::move(sk));
        y_hist.push_back(std::move(yk));
        if (static_cast<int>(s_hist.size()) > opts.step.memory) {
          s_hist.erase(s_hist.begin());
          y_hist.erase(y_hist.begin());
        }
      }
    }
    phi = std::move(trial);
    cur = std::move(next);
    canonical = false;
    r.trace.push_back({cur.objective, grad_norm(cur.gradient)});

    if (!use_lbfgs || phi.cwiseAbs().maxCoeff() > opts.step.regauge_threshold ||
        gauge_condition(gauge_fix(phi, w)) > opts.step.regauge_threshold) {
      regauge(phi, cur);
      canonical = true;
      s_hist.clear();
      y_hist.clear();
    }
  }
  if (!canonical) regauge(phi, cur);

  r.phi = FeatureMap(phi);
  r.objective_value = cur.objective;
  r.term_infos = cur.infos;
  r.grad_norm = grad_norm(cur.gradient);
  if (!r.converged && r.grad_norm <= opts.grad_tol) {
    r.converged = true;
    r.termination = "gradient tolerance";
  }
  r.solutions = std::move(cur.solutions);
  r.iterations = it;
  double plus = 0.0, minus = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i)
    (terms[i].sign == Sign::plus ? plus : minus) += terms[i].weight * r.term_infos[i];
  r.info_plus = plus;
  r.info_minus = minus;
  return r;
}

inline FitResult fit_terms(const std::vector<ObjectiveTerm>& terms,
                           Eigen::Index d, const FitOptions& opts,
                           bool two_sided,
                           const std::optional<Matrix>& warm_phi = std::nullopt) {
  opts.validate();
  validate_terms(terms, d);
  const JointTable& ref = reference_table(terms);

  std::vector<Matrix> starts;
  if (warm_phi) {
    if (warm_phi->rows() != ref.nx() || warm_phi->cols() != d)
      throw InvalidArgument("warm start features have the wrong shape");
    starts.push_back(*warm_phi);
  } else if (opts.svd_start) {
    Rng rng(substream_seed(opts.seed, "svd-start"));
    starts.push_back(svd_start(ref, d, rng));
  }
  for (int i = 0; i < opts.restarts; ++i) {
    Rng rng(substream_seed(opts.seed, "restart", static_cast<std::uint64_t>(i)));
    starts.push_back(rng.normal_matrix(ref.nx(), d, 0.1));
  }

  std::vector<std::optional<FitResult>> results(starts.size());
  std::vector<std::string> failures(starts.size());
  parallel_for(starts.size(), opts.jobs, [&](std::size_t i) {
    try {
      results[i] = ascend(terms, starts[i], opts, two_sided);
      results[i]->start_index = static_cast<int>(i);
    } catch (const Error& e) {
      failures[i] = e.what();
    }
  });

  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < results.size(); ++i)
    if (results[i] && (!best || results[i]->objective_value >
                                    results[*best]->objective_value))
      best = i;
  if (!best) {
    std::string msg = "all starts failed:";
    for (std::size_t i = 0; i < failures.size(); ++i)
      msg += " [" + std::to_string(i) + "] " + failures[i];
    throw FitError(msg);
  }
  return std::move(*results[*best]);
}

}  // namespace detail

struct ObjectiveGradient {
  double objective;
  double info_plus;
  double info_minus;
  Matrix gradient;  // dL/dphi
  MaxEntSolution relevance_solution;
  std::optional<MaxEntSolution> irrelevance_solution;  // absent when lambda = 0
};

inline ObjectiveGradient objective_and_gradient(
    const Objective& obj, const FeatureMap& phi, const SolverOptions& solver = {}) {
  obj.validate();
  if (phi.dim() != obj.d) throw InvalidArgument("feature dimension mismatch");
  TermEvaluation ev = detail::evaluate_terms(detail::two_sided_terms(obj), phi,
                                             solver, {}, true);
  return {ev.objective, ev.infos[0], ev.infos[1], std::move(ev.gradient),
          std::move(*ev.solutions[0]), std::move(ev.solutions[1])};
}

// Multi-table objective sum_i s_i w_i I_M[phi, p_i] and its gradient.
inline TermEvaluation multi_objective_and_gradient(
    const std::vector<ObjectiveTerm>& terms, const FeatureMap& phi,
    const SolverOptions& solver = {}) {
  detail::validate_terms(terms, phi.dim());
  return detail::evaluate_terms(terms, phi, solver, {}, false);
}

// Gradient ascent from an SVD start plus `restarts` random starts; returns
// the best final objective. When `warm_phi` is given it replaces the SVD
// start.
inline FitResult fit(const Objective& obj, const FitOptions& opts = {},
                     const std::optional<Matrix>& warm_phi = std::nullopt) {
  obj.validate();
  FitResult r = detail::fit_terms(detail::two_sided_terms(obj), obj.d, opts,
                                  true, warm_phi);
  r.info_plus = r.term_infos[0];
  r.info_minus = r.term_infos[1];
  // A zero-weight side is never solved during ascent; report it anyway.
  if (obj.lambda == 0.0) {
    try {
      r.info_minus = measurement_information(r.phi, obj.irrelevance, opts.solver).value;
    } catch (const Error&) {
      r.info_minus = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return r;
}

inline FitResult fit_multi(const std::vector<ObjectiveTerm>& terms,
                           Eigen::Index d, const FitOptions& opts = {}) {
  return detail::fit_terms(terms, d, opts, false);
}

// Max-abs entry of p+(x) D<psi+> - lambda p-(x) D<psi->, evaluated on the
// fit's terminal I-projections.
inline double stationarity_residual(const Objective& obj, const FitResult& fit) {
  obj.validate();
  if (fit.solutions.empty() || !fit.solutions[0])
    throw InvalidArgument("fit has no terminal relevance solution");
  Matrix s = entropy_gradient(fit.phi, obj.relevance, *fit.solutions[0]);
  if (obj.lambda != 0.0) {
    if (fit.solutions.size() < 2 || !fit.solutions[1])
      throw InvalidArgument("fit has no terminal irrelevance solution");
    s -= obj.lambda * entropy_gradient(fit.phi, obj.irrelevance, *fit.solutions[1]);
  }
  return s.cwiseAbs().maxCoeff();
}

// <log( p_hat+(x,y+) / p_hat-(x,y-)^lambda )> under
// p(x, y+, y-) = p+(y+|x) p-(y-|x) p(x). Equals L plus a phi-independent
// constant.
inline double log_likelihood_ratio_objective(const FeatureMap& phi,
                                             const JointTable& plus,
                                             const JointTable& minus,
                                             double lambda,
                                             const SolverOptions& solver = {}) {
  if (plus.nx() != minus.nx()) throw InvalidArgument("tables must share X");
  if ((plus.marginal_x() - minus.marginal_x()).cwiseAbs().maxCoeff() > 1e-9)
    throw InvalidArgument("p+ and p- must share the marginal p(x)");
  const MaxEntSolution sp = solve_maxent(phi, plus, solver);
  auto cross = [](const Matrix& p, const Matrix& q) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i)
      if (p.data()[i] > 0.0) s += p.data()[i] * std::log(q.data()[i]);
    return s;
  };
  double v = cross(plus.probs(), sp.p_hat.probs());
  if (lambda != 0.0) {
    const MaxEntSolution sm = solve_maxent(phi, minus, solver);
    v -= lambda * cross(minus.probs(), sm.p_hat.probs());
  }
  return v;
}

struct LocalMaxCheck {
  bool is_local_max = true;
  double max_increase = -std::numeric_limits<double>::infinity();
};

// Probes L at random perturbations of phi of the given relative size; a local
// maximum never improves beyond `slack`.
inline LocalMaxCheck check_local_maximum(const Objective& obj,
                                         const FeatureMap& phi, int trials,
                                         double scale, std::uint64_t seed,
                                         const SolverOptions& solver = {},
                                         double slack = 1e-9) {
  const double base = objective_and_gradient(obj, phi, solver).objective;
  Rng rng(substream_seed(seed, "local-max"));
  LocalMaxCheck c;
  for (int i = 0; i < trials; ++i) {
    Matrix delta = rng.normal_matrix(phi.nx(), phi.dim(), scale);
    const double v =
        objective_and_gradient(obj, FeatureMap(phi.values() + delta), solver).objective;
    c.max_increase = std::max(c.max_increase, v - base);
    if (v > base + slack) c.is_local_max = false;
  }
  return c;
}

}  // namespace sdris
