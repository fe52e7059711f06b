#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "qbell/bell.hpp"
#include "qbell/state.hpp"
#include "qbell/types.hpp"

namespace qbell::search {

struct SearchOptions {
  int restarts = 32;             // multistart budget (split between stages)
  int max_evaluations = 20000;   // per restart
  double initial_box = 2.0;      // quasi-random starts in [-box, box]^d
  double simplex_scale = 0.2;
  double value_tolerance = 1e-10;
  bool real_only = false;        // restrict settings to the real axis
  double violation_margin = 1e-6;  // threshold predicate: |B| > 2 + margin
  std::uint64_t seed = 0;
  int jobs = 1;                  // 1 = serial reference path, 0 = all cores
};

struct OptimizationResult {
  BellValue best;
  MeasurementSettings settings;
  int restarts_used = 0;
  long evaluations = 0;
  bool converged = false;
};

struct ThresholdResult {
  double threshold = 0.0;
  double bracket_lo = 0.0;   // predicate false here
  double bracket_hi = 0.0;   // predicate true here
  double tolerance = 0.0;
  OptimizationResult at_bracket_hi;  // optimum on the violated side
};

struct ScanCell {
  double s = 0.0;
  double eta = 0.0;
  OptimizationResult result;
  bool failed = false;       // evaluation error; result is meaningless
};

struct ScanResult {
  std::vector<double> s_axis;
  std::vector<double> eta_axis;
  std::vector<ScanCell> cells;  // row-major over (s, eta)
  int audited_cells = 0;
  double audit_max_discrepancy = 0.0;
};

/// Downhill-simplex minimizer (no gradients). Stops when the simplex value
/// spread drops below value_tolerance or the evaluation budget is spent.
struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  long evaluations = 0;
  bool converged = false;
};
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> x0, double scale, double value_tolerance,
                          long max_evaluations);

/// Deterministic per-work-item seed stream.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t index);

/// Maximizes |<B>| over measurement settings by multistart downhill simplex:
/// a real-restricted stage over (alpha1, alpha2, beta1, beta2) on the real
/// axis, then (unless real_only) a full 8-parameter complex stage seeded from
/// the real optimum, plus quasi-random restarts. Deterministic given the
/// seed; restarts are independent work items (parallel when jobs != 1).
OptimizationResult maximize_bell(const StateModel& state, const BellContext& ctx,
                                 const SearchOptions& opts,
                                 const MeasurementSettings* warm_start = nullptr);

/// Smallest efficiency with a violation at fixed s: bisection of the
/// predicate [max |B| > 2 + margin] over eta, warm-starting each inner
/// optimization from the violated side. Throws NoViolationError when even
/// eta = 1 shows no violation.
ThresholdResult min_eta_threshold(const StateModel& state, SParameter s, double tol,
                                  const SearchOptions& opts);

/// Most negative s with a violation at fixed eta; same bracketing rules.
ThresholdResult min_s_threshold(const StateModel& state, double eta, double tol,
                                const SearchOptions& opts);

struct ScanOptions {
  SearchOptions search;
  bool audit = false;   // re-run every 20th cell cold and record discrepancy
};

/// Per-cell maximize_bell over the (s, eta) grid with warm starts chained
/// along each s-row. Cells never abort the scan; failures are marked.
/// Rows are independent work items; results are identical for any jobs.
ScanResult scan_grid(const StateModel& state, const std::vector<double>& s_grid,
                     const std::vector<double>& eta_grid, const ScanOptions& opts);

}  // namespace qbell::search
