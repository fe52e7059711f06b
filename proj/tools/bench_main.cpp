// Timing comparison between the serial reference path (jobs = 1) and the
// OpenMP path (jobs = 0, all cores) for the three data-parallel workloads:
// grid scans, optimizer restarts, and the oracle equivalence suite.
// Also asserts that both paths produce identical results.

#include <chrono>
#include <cmath>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qbell/search.hpp"
#include "qbell/selftest.hpp"

using namespace qbell;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Row {
  const char* name;
  double serial_s;
  double parallel_s;
  bool identical;
};

void print_row(const Row& row) {
  std::printf("%-34s %9.3f s %9.3f s   x%5.2f   results %s\n", row.name, row.serial_s,
              row.parallel_s, row.serial_s / row.parallel_s,
              row.identical ? "identical" : "DIFFER");
}

Row bench_scan() {
  const StateModel state = SinglePhotonEntangled{};
  std::vector<double> s_grid, eta_grid;
  for (int i = 0; i < 13; ++i) s_grid.push_back(-1.2 + 0.1 * i);
  for (int i = 0; i < 5; ++i) eta_grid.push_back(0.88 + 0.03 * i);

  search::ScanOptions opts;
  opts.search.restarts = 8;
  opts.search.seed = 42;

  opts.search.jobs = 1;
  auto t0 = Clock::now();
  const search::ScanResult serial = search::scan_grid(state, s_grid, eta_grid, opts);
  const double ts = seconds_since(t0);

  opts.search.jobs = 0;
  t0 = Clock::now();
  const search::ScanResult parallel = search::scan_grid(state, s_grid, eta_grid, opts);
  const double tp = seconds_since(t0);

  bool same = serial.cells.size() == parallel.cells.size();
  for (std::size_t i = 0; same && i < serial.cells.size(); ++i)
    same = serial.cells[i].result.best.magnitude == parallel.cells[i].result.best.magnitude;
  return {"scan 13x5 cells (restarts 8)", ts, tp, same};
}

Row bench_restarts() {
  const StateModel state = Tmss(2.0);
  const BellContext ctx(SParameter(0.0), 1.0);
  search::SearchOptions opts;
  opts.restarts = 64;
  opts.seed = 7;

  opts.jobs = 1;
  auto t0 = Clock::now();
  const auto serial = search::maximize_bell(state, ctx, opts);
  const double ts = seconds_since(t0);

  opts.jobs = 0;
  t0 = Clock::now();
  const auto parallel = search::maximize_bell(state, ctx, opts);
  const double tp = seconds_since(t0);

  return {"maximize tmss r=2 (restarts 64)", ts, tp,
          serial.best.magnitude == parallel.best.magnitude};
}

Row bench_oracle() {
  auto t0 = Clock::now();
  const auto serial = selftest::equivalence_suite(96, 3, std::nullopt, 1);
  const double ts = seconds_since(t0);

  t0 = Clock::now();
  const auto parallel = selftest::equivalence_suite(96, 3, std::nullopt, 0);
  const double tp = seconds_since(t0);

  return {"oracle equivalence (96 trials)", ts, tp,
          serial.max_abs_dev == parallel.max_abs_dev};
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, %d threads available\n\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; parallel path degenerates to serial\n\n");
#endif
  std::printf("%-34s %11s %11s %8s\n", "workload", "serial", "parallel", "speedup");
  print_row(bench_scan());
  print_row(bench_restarts());
  print_row(bench_oracle());
  return 0;
}
