#pragma once

// Warm-started lambda sweeps with transition and hysteresis detection.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "sdris/optimizer.hpp"

namespace sdris {

struct SweepOptions {
  FitOptions fit;
  // Defaults: max(0.1 * I[p+], 0.01) and max(1e-4, 1e-3 * I[p+]).
  std::optional<double> jump_threshold;
  std::optional<double> hysteresis_tolerance;
};

struct SweepPoint {
  double lambda = 0.0;
  std::optional<FitResult> fit;
  std::string error;  // set when the fit failed
  bool from_warm_start = false;
};

enum class Branch { up, down };

inline const char* to_string(Branch b) { return b == Branch::up ? "up" : "down"; }

struct Transition {
  Branch branch;
  double lambda_lo;
  double lambda_hi;
  double delta_info_plus;  // signed change from lo to hi
};

struct LambdaInterval {
  double lo;
  double hi;
};

struct SweepResult {
  std::vector<double> lambdas;
  std::vector<SweepPoint> up_branch;
  std::vector<SweepPoint> down_branch;
  std::vector<Transition> transitions;
  std::vector<LambdaInterval> hysteresis_intervals;
  double jump_threshold = 0.0;
  double hysteresis_tolerance = 0.0;
};

namespace detail {

inline SweepPoint sweep_point(const Objective& base, double lambda,
                              const FitOptions& opts,
                              const std::optional<Matrix>& warm,
                              std::uint64_t fresh_seed) {
  SweepPoint pt;
  pt.lambda = lambda;
  Objective obj = base;
  obj.lambda = lambda;
  try {
    if (!warm) {
      pt.fit = fit(obj, opts);
      return pt;
    }
    FitOptions w = opts;
    w.restarts = 0;
    w.svd_start = true;
    std::optional<FitResult> from_warm;
    std::string warm_error;
    try {
      from_warm = fit(obj, w, warm);
    } catch (const Error& e) {
      warm_error = e.what();
    }
    FitOptions f = opts;
    f.restarts = 1;
    f.svd_start = false;
    f.seed = fresh_seed;
    std::optional<FitResult> fresh;
    try {
      fresh = fit(obj, f);
    } catch (const Error& e) {
      if (!from_warm) throw FitError(warm_error + "; fresh restart: " + e.what());
    }
    if (from_warm && (!fresh || from_warm->objective_value >= fresh->objective_value)) {
      pt.fit = std::move(from_warm);
      pt.from_warm_start = true;
    } else {
      pt.fit = std::move(fresh);
    }
  } catch (const Error& e) {
    pt.error = e.what();
  }
  return pt;
}

inline std::vector<SweepPoint> run_branch(const Objective& base,
                                          const std::vector<double>& lambdas,
                                          const FitOptions& opts, Branch branch) {
  const std::size_t n = lambdas.size();
  std::vector<SweepPoint> points(n);
  std::optional<Matrix> warm;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = branch == Branch::up ? k : n - 1 - k;
    const std::uint64_t seed =
        substream_seed(opts.seed, branch == Branch::up ? "sweep-up" : "sweep-down", i);
    points[i] = sweep_point(base, lambdas[i], opts, warm, seed);
    if (points[i].fit) warm = points[i].fit->phi.values();
  }
  return points;
}

}  // namespace detail

// Adjacent grid intervals on one branch where |I_M+| jumps by more than
// `threshold`.
inline std::vector<Transition> detect_transitions(const std::vector<SweepPoint>& pts,
                                                  Branch branch, double threshold) {
  std::vector<Transition> out;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (!pts[i].fit || !pts[i + 1].fit) continue;
    const double delta = pts[i + 1].fit->info_plus - pts[i].fit->info_plus;
    if (std::abs(delta) > threshold)
      out.push_back({branch, pts[i].lambda, pts[i + 1].lambda, delta});
  }
  return out;
}

// Maximal runs of grid points where the two branches' objectives differ by
// more than `tolerance`.
inline std::vector<LambdaInterval> detect_hysteresis(const std::vector<SweepPoint>& up,
                                                     const std::vector<SweepPoint>& down,
                                                     double tolerance) {
  std::vector<LambdaInterval> out;
  bool open = false;
  for (std::size_t i = 0; i < up.size() && i < down.size(); ++i) {
    const bool differs = up[i].fit && down[i].fit &&
                         std::abs(up[i].fit->objective_value -
                                  down[i].fit->objective_value) > tolerance;
    if (differs && !open) {
      out.push_back({up[i].lambda, up[i].lambda});
      open = true;
    } else if (differs) {
      out.back().hi = up[i].lambda;
    } else {
      open = false;
    }
  }
  return out;
}

inline SweepResult sweep_lambda(const Objective& base, const std::vector<double>& grid,
                                const SweepOptions& opts = {}) {
  if (grid.empty()) throw InvalidArgument("lambda grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0) || !std::isfinite(grid[i]))
      throw InvalidArgument("lambda grid entries must be finite and >= 0");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw InvalidArgument("lambda grid must be strictly ascending");
  }
  Objective probe = base;
  probe.lambda = grid.front();
  probe.validate();
  opts.fit.validate();

  SweepResult r;
  r.lambdas = grid;
  const double info = mutual_information(base.relevance);
  r.jump_threshold = opts.jump_threshold.value_or(std::max(0.1 * info, 0.01));
  r.hysteresis_tolerance =
      opts.hysteresis_tolerance.value_or(std::max(1e-4, 1e-3 * info));

  // The two branches are independent; restarts inside a fit stay sequential
  // when the branches already occupy the workers.
  FitOptions inner = opts.fit;
  if (opts.fit.jobs >= 2) inner.jobs = std::max(1, opts.fit.jobs / 2);
  std::vector<SweepPoint> branches[2];
  parallel_for(2, opts.fit.jobs, [&](std::size_t b) {
    branches[b] = detail::run_branch(base, grid, inner, b == 0 ? Branch::up : Branch::down);
  });
  r.up_branch = std::move(branches[0]);
  r.down_branch = std::move(branches[1]);

  r.transitions = detect_transitions(r.up_branch, Branch::up, r.jump_threshold);
  auto down = detect_transitions(r.down_branch, Branch::down, r.jump_threshold);
  r.transitions.insert(r.transitions.end(), down.begin(), down.end());
  r.hysteresis_intervals =
      detect_hysteresis(r.up_branch, r.down_branch, r.hysteresis_tolerance);
  return r;
}

// Per grid point, the better of the two branches (nullptr when both failed).
inline std::vector<const FitResult*> best_envelope(const SweepResult& r) {
  std::vector<const FitResult*> out(r.lambdas.size(), nullptr);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& u = r.up_branch[i].fit;
    const auto& d = r.down_branch[i].fit;
    if (u && (!d || u->objective_value >= d->objective_value))
      out[i] = &*u;
    else if (d)
      out[i] = &*d;
  }
  return out;
}

}  // namespace sdris
