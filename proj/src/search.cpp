#include "qbell/search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qbell::search {

namespace {

double mix64(std::uint64_t z) {  // splitmix64 finalizer, mapped to [0, 1)
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z = z ^ (z >> 31);
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

double halton(std::uint64_t index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
  }
  return r;
}

constexpr int kHaltonBases[8] = {2, 3, 5, 7, 11, 13, 17, 19};

// Quasi-random start point j, rotated per seed so that different seeds
// explore different sequences. Restarts cycle through shrinking box layers:
// the optima of interest often sit at small amplitudes, and a simplex started
// on the flat large-amplitude plateau can stall there.
std::vector<double> start_point(std::uint64_t seed, int j, int dim, double box) {
  constexpr double kLayers[4] = {1.0, 0.45, 0.2, 0.7};
  const double layer = box * kLayers[static_cast<std::size_t>(j) % 4];
  std::vector<double> x(static_cast<std::size_t>(dim));
  for (int d = 0; d < dim; ++d) {
    const double shift = mix64(seed ^ (0x5851f42d4c957f2dULL * (d + 1)));
    double u = halton(static_cast<std::uint64_t>(j) + 1, kHaltonBases[d]) + shift;
    u -= std::floor(u);
    x[static_cast<std::size_t>(d)] = -layer + 2.0 * layer * u;
  }
  return x;
}

MeasurementSettings to_settings(const std::vector<double>& x) {
  if (x.size() == 4)
    return {PhasePoint(x[0], 0.0), PhasePoint(x[1], 0.0), PhasePoint(x[2], 0.0),
            PhasePoint(x[3], 0.0)};
  return {PhasePoint(x[0], x[4]), PhasePoint(x[1], x[5]), PhasePoint(x[2], x[6]),
          PhasePoint(x[3], x[7])};
}

int effective_jobs(int jobs) {
#ifdef _OPENMP
  if (jobs == 0) return omp_get_max_threads();
  return std::max(1, jobs);
#else
  (void)jobs;
  return 1;
#endif
}

}  // namespace

std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master ^ (index * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> x0, double scale, double value_tolerance,
                          long max_evaluations) {
  const std::size_t n = x0.size();
  SimplexResult out;
  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> vals(n + 1);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += scale;
  for (std::size_t i = 0; i <= n; ++i) vals[i] = f(pts[i]);
  out.evaluations = static_cast<long>(n) + 1;

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  while (out.evaluations < max_evaluations) {
    for (std::size_t i = 0; i <= n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order[0], worst = order[n], second = order[n - 1];
    if (vals[worst] - vals[best] < value_tolerance) {
      out.converged = true;
      break;
    }
    for (std::size_t d = 0; d < n; ++d) {
      double c = 0.0;
      for (std::size_t i = 0; i <= n; ++i)
        if (i != worst) c += pts[i][d];
      centroid[d] = c / static_cast<double>(n);
    }
    for (std::size_t d = 0; d < n; ++d) xr[d] = 2.0 * centroid[d] - pts[worst][d];
    const double fr = f(xr);
    ++out.evaluations;
    if (fr < vals[order[0]]) {
      for (std::size_t d = 0; d < n; ++d) xe[d] = centroid[d] + 2.0 * (xr[d] - centroid[d]);
      const double fe = f(xe);
      ++out.evaluations;
      pts[worst] = fe < fr ? xe : xr;
      vals[worst] = std::min(fe, fr);
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    const bool outside = fr < vals[worst];
    for (std::size_t d = 0; d < n; ++d)
      xc[d] = centroid[d] + 0.5 * ((outside ? xr[d] : pts[worst][d]) - centroid[d]);
    const double fc = f(xc);
    ++out.evaluations;
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = xc;
      vals[worst] = fc;
      continue;
    }
    // shrink toward the best vertex
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t d = 0; d < n; ++d)
        pts[i][d] = pts[best][d] + 0.5 * (pts[i][d] - pts[best][d]);
      vals[i] = f(pts[i]);
      ++out.evaluations;
    }
  }
  std::size_t arg = 0;
  for (std::size_t i = 1; i <= n; ++i)
    if (vals[i] < vals[arg]) arg = i;
  out.x = pts[arg];
  out.value = vals[arg];
  return out;
}

namespace {

struct RestartOutcome {
  double magnitude = -1.0;
  std::vector<double> x;
  long evaluations = 0;
  bool converged = false;
};

// Runs one simplex descent of -|B| from x0. Must not leak exceptions (it is
// called inside OpenMP regions); evaluation failures act as a flat penalty.
RestartOutcome run_restart(const StateModel& state, const BellContext& ctx,
                           const SearchOptions& opts, std::vector<double> x0,
                           double scale) {
  auto objective = [&](const std::vector<double>& x) {
    try {
      return -bell::bell_value(state, to_settings(x), ctx).magnitude;
    } catch (const InadequateCutoffError&) {
      return 1e6;  // steer away from regions the oracle cannot resolve
    }
  };
  try {
    SimplexResult r = nelder_mead(objective, x0, scale, opts.value_tolerance,
                                  opts.max_evaluations);
    return {-r.value, std::move(r.x), r.evaluations, r.converged};
  } catch (const std::exception&) {
    RestartOutcome failed;
    failed.magnitude = -std::numeric_limits<double>::infinity();
    failed.x = std::move(x0);
    return failed;
  }
}

}  // namespace

OptimizationResult maximize_bell(const StateModel& state, const BellContext& ctx,
                                 const SearchOptions& opts,
                                 const MeasurementSettings* warm_start) {
  if (opts.restarts < 1) throw std::domain_error("maximize_bell: restarts must be >= 1");

  // Stage A: real-restricted multistart. Stage B: full complex multistart
  // seeded from the stage-A optimum (the real optimum is always reachable).
  const int n4 = opts.real_only ? opts.restarts : std::max(2, opts.restarts / 2);
  const int n8 = opts.real_only ? 0 : std::max(2, opts.restarts - n4);

  std::vector<std::vector<double>> starts4;
  starts4.reserve(static_cast<std::size_t>(n4) + 1);
  for (int j = 0; j < n4; ++j)
    starts4.push_back(start_point(opts.seed, j, 4, opts.initial_box));
  if (warm_start && opts.real_only) {
    starts4.push_back({warm_start->alpha1.re(), warm_start->alpha2.re(),
                       warm_start->beta1.re(), warm_start->beta2.re()});
  }

  std::vector<RestartOutcome> out4(starts4.size());
  const int jobs = effective_jobs(opts.jobs);
  if (jobs == 1) {
    for (std::size_t j = 0; j < starts4.size(); ++j)
      out4[j] = run_restart(state, ctx, opts, starts4[j], opts.simplex_scale);
  } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
#endif
    for (std::int64_t j = 0; j < static_cast<std::int64_t>(starts4.size()); ++j)
      out4[static_cast<std::size_t>(j)] = run_restart(
          state, ctx, opts, starts4[static_cast<std::size_t>(j)], opts.simplex_scale);
  }

  long evaluations = 0;
  std::size_t best4 = 0;
  for (std::size_t j = 0; j < out4.size(); ++j) {
    evaluations += out4[j].evaluations;
    if (out4[j].magnitude > out4[best4].magnitude) best4 = j;
  }

  RestartOutcome best = out4[best4];
  int restarts_used = static_cast<int>(starts4.size());

  if (!opts.real_only) {
    std::vector<std::vector<double>> starts8;
    starts8.reserve(static_cast<std::size_t>(n8) + 2);
    std::vector<double> seeded(8, 0.0);
    for (int d = 0; d < 4; ++d) seeded[static_cast<std::size_t>(d)] = best.x[static_cast<std::size_t>(d)];
    starts8.push_back(seeded);
    if (warm_start) {
      starts8.push_back({warm_start->alpha1.re(), warm_start->alpha2.re(),
                         warm_start->beta1.re(), warm_start->beta2.re(),
                         warm_start->alpha1.im(), warm_start->alpha2.im(),
                         warm_start->beta1.im(), warm_start->beta2.im()});
    }
    for (int j = 0; j < n8; ++j)
      starts8.push_back(start_point(split_seed(opts.seed, 0x8), j, 8, opts.initial_box));

    std::vector<RestartOutcome> out8(starts8.size());
    if (jobs == 1) {
      for (std::size_t j = 0; j < starts8.size(); ++j)
        out8[j] = run_restart(state, ctx, opts, starts8[j], opts.simplex_scale);
    } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
#endif
      for (std::int64_t j = 0; j < static_cast<std::int64_t>(starts8.size()); ++j)
        out8[static_cast<std::size_t>(j)] = run_restart(
            state, ctx, opts, starts8[static_cast<std::size_t>(j)], opts.simplex_scale);
    }
    for (std::size_t j = 0; j < out8.size(); ++j) {
      evaluations += out8[j].evaluations;
      if (out8[j].magnitude > best.magnitude) best = out8[j];
    }
    restarts_used += static_cast<int>(starts8.size());
  }

  // Polish from the incumbent with a tighter simplex.
  RestartOutcome polish =
      run_restart(state, ctx, opts, best.x, opts.simplex_scale * 0.1);
  evaluations += polish.evaluations;
  if (polish.magnitude > best.magnitude) best = polish;

  OptimizationResult result;
  result.settings = to_settings(best.x);
  result.best = bell::bell_value(state, result.settings, ctx);
  result.restarts_used = restarts_used;
  result.evaluations = evaluations;
  result.converged = polish.converged;
  return result;
}

namespace {

bool is_violation(const OptimizationResult& r, const SearchOptions& opts) {
  return r.best.magnitude > 2.0 + opts.violation_margin;
}

}  // namespace

ThresholdResult min_eta_threshold(const StateModel& state, SParameter s, double tol,
                                  const SearchOptions& opts) {
  if (!(tol > 0.0)) throw std::domain_error("min_eta_threshold: tol must be > 0");

  double hi = 1.0;
  OptimizationResult at_hi = maximize_bell(state, BellContext(s, hi), opts);
  if (!is_violation(at_hi, opts))
    throw NoViolationError("no violation at eta = 1 for the requested s");

  // March down in coarse steps until the violation disappears.
  double lo = hi;
  OptimizationResult probe = at_hi;
  while (true) {
    const double next = lo - 0.05;
    if (next < 0.05)
      throw NoViolationError("violation persists down to eta = 0.05; no threshold");
    MeasurementSettings warm = probe.settings;
    probe = maximize_bell(state, BellContext(s, next), opts, &warm);
    if (!is_violation(probe, opts)) {
      lo = next;
      break;
    }
    lo = next;
    hi = next;
    at_hi = probe;
  }

  while (hi - lo > 2.0 * tol) {
    const double mid = 0.5 * (hi + lo);
    MeasurementSettings warm = at_hi.settings;
    const OptimizationResult at_mid =
        maximize_bell(state, BellContext(s, mid), opts, &warm);
    if (is_violation(at_mid, opts)) {
      hi = mid;
      at_hi = at_mid;
    } else {
      lo = mid;
    }
  }

  ThresholdResult out;
  out.threshold = 0.5 * (hi + lo);
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  out.tolerance = tol;
  out.at_bracket_hi = at_hi;
  return out;
}

ThresholdResult min_s_threshold(const StateModel& state, double eta, double tol,
                                const SearchOptions& opts) {
  if (!(tol > 0.0)) throw std::domain_error("min_s_threshold: tol must be > 0");
  if (!(eta > 0.0) || eta > 1.0)
    throw std::domain_error("min_s_threshold: eta must lie in (0, 1]");

  // Find a violated s scanning down from 0; the violated region need not
  // reach s = 0, so keep scanning past non-violated points.
  const double floor_s = -6.0;
  double hi = 0.0;
  OptimizationResult at_hi;
  bool found = false;
  OptimizationResult probe;
  bool have_probe = false;
  for (double sv = 0.0; sv >= floor_s - 1e-12 && !found; sv -= 0.25) {
    const MeasurementSettings* warm = have_probe ? &probe.settings : nullptr;
    probe = maximize_bell(state, BellContext(SParameter(sv), eta), opts, warm);
    have_probe = true;
    if (is_violation(probe, opts)) {
      hi = sv;
      at_hi = probe;
      found = true;
    }
  }
  if (!found) throw NoViolationError("no violation found on s in [-6, 0]");

  double lo = hi;
  OptimizationResult walk = at_hi;
  while (true) {
    const double next = lo - 0.25;
    if (next < floor_s)
      throw NoViolationError("violation persists down to s = -6; no threshold");
    MeasurementSettings warm = walk.settings;
    walk = maximize_bell(state, BellContext(SParameter(next), eta), opts, &warm);
    if (!is_violation(walk, opts)) {
      lo = next;
      break;
    }
    lo = next;
    hi = next;
    at_hi = walk;
  }

  while (hi - lo > 2.0 * tol) {
    const double mid = 0.5 * (hi + lo);
    MeasurementSettings warm = at_hi.settings;
    const OptimizationResult at_mid =
        maximize_bell(state, BellContext(SParameter(mid), eta), opts, &warm);
    if (is_violation(at_mid, opts)) {
      hi = mid;
      at_hi = at_mid;
    } else {
      lo = mid;
    }
  }

  ThresholdResult out;
  out.threshold = 0.5 * (hi + lo);
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  out.tolerance = tol;
  out.at_bracket_hi = at_hi;
  return out;
}

namespace {

void scan_row(const StateModel& state, const std::vector<double>& eta_grid,
              double s_value, std::size_t row, const ScanOptions& opts,
              std::vector<ScanCell>& cells) {
  const std::size_t ncol = eta_grid.size();
  // Evaluate from the largest eta downward: the violation branch continues
  // smoothly from high efficiency, so warm starts track it across the
  // boundary. Output order (and per-cell seeds) stay tied to grid position.
  std::vector<std::size_t> order(ncol);
  for (std::size_t col = 0; col < ncol; ++col) order[col] = col;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return eta_grid[a] > eta_grid[b];
  });

  const MeasurementSettings* warm = nullptr;
  MeasurementSettings carry;
  for (std::size_t col : order) {
    const std::size_t idx = row * ncol + col;
    ScanCell& cell = cells[idx];
    cell.s = s_value;
    cell.eta = eta_grid[col];
    SearchOptions cell_opts = opts.search;
    cell_opts.seed = split_seed(opts.search.seed, idx);
    cell_opts.jobs = 1;  // parallelism lives at row level
    try {
      cell.result = maximize_bell(state, BellContext(SParameter(s_value), eta_grid[col]),
                                  cell_opts, warm);
      if (cell.result.converged) {
        carry = cell.result.settings;
        warm = &carry;
      }
    } catch (const std::exception&) {
      cell.failed = true;
      warm = nullptr;
    }
  }
}

}  // namespace

ScanResult scan_grid(const StateModel& state, const std::vector<double>& s_grid,
                     const std::vector<double>& eta_grid, const ScanOptions& opts) {
  if (s_grid.empty() || eta_grid.empty())
    throw std::domain_error("scan_grid: grids must be non-empty");
  ScanResult out;
  out.s_axis = s_grid;
  out.eta_axis = eta_grid;
  out.cells.resize(s_grid.size() * eta_grid.size());

  const int jobs = effective_jobs(opts.search.jobs);
  if (jobs == 1) {
    for (std::size_t row = 0; row < s_grid.size(); ++row)
      scan_row(state, eta_grid, s_grid[row], row, opts, out.cells);
  } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
#endif
    for (std::int64_t row = 0; row < static_cast<std::int64_t>(s_grid.size()); ++row)
      scan_row(state, eta_grid, s_grid[static_cast<std::size_t>(row)],
               static_cast<std::size_t>(row), opts, out.cells);
  }

  if (opts.audit) {
    // Cold re-run of every 20th cell, no warm start; deterministic pick.
    for (std::size_t idx = 0; idx < out.cells.size(); idx += 20) {
      const ScanCell& cell = out.cells[idx];
      if (cell.failed) continue;
      SearchOptions cell_opts = opts.search;
      cell_opts.seed = split_seed(opts.search.seed, idx);
      cell_opts.jobs = opts.search.jobs;
      const OptimizationResult cold = maximize_bell(
          state, BellContext(SParameter(cell.s), cell.eta), cell_opts);
      out.audit_max_discrepancy =
          std::max(out.audit_max_discrepancy,
                   std::fabs(cold.best.magnitude - cell.result.best.magnitude));
      ++out.audited_cells;
    }
  }
  return out;
}

}  // namespace qbell::search
