#include "qbell/selftest.hpp"

#include <algorithm>
#include <cstdint>
#include <numbers>
#include <random>
#include <sstream>

#include "qbell/bell.hpp"
#include "qbell/kernels.hpp"
#include "qbell/search.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qbell::selftest {

SuiteReport equivalence_suite(int trials, std::uint64_t seed,
                              std::optional<fock::FockCutoff> cutoff, int jobs) {
  SuiteReport report;
  report.trials = trials;
  std::vector<double> devs(static_cast<std::size_t>(trials), 0.0);
  std::vector<std::string> cases(static_cast<std::size_t>(trials));
  std::vector<std::string> errors(static_cast<std::size_t>(trials));

  auto run_trial = [&](int i) {
    std::mt19937_64 rng(search::split_seed(seed, static_cast<std::uint64_t>(i)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto disk_point = [&]() {
      const double radius = 1.5 * std::sqrt(unit(rng));
      const double angle = 2.0 * std::numbers::pi * unit(rng);
      return PhasePoint(radius * std::cos(angle), radius * std::sin(angle));
    };
    const PhasePoint alpha = disk_point();
    const PhasePoint beta = disk_point();
    const SParameter s(-2.0 * unit(rng));
    const bool use_tmss = (i % 2) == 1;
    const double r = use_tmss ? std::max(1e-3, 1.5 * unit(rng)) : 0.0;

    std::ostringstream echo;
    double analytic = 0.0;
    try {
      StateModel state = use_tmss ? StateModel(Tmss(r)) : StateModel(SinglePhotonEntangled{});
      echo << state_name(state) << " alpha=" << format_complex(alpha.value())
           << " beta=" << format_complex(beta.value()) << " s=" << s.value();
      if (use_tmss) echo << " r=" << r;
      analytic = kernels::w_pair(state, alpha, beta, s);
      const fock::FockCutoff cut =
          cutoff ? *cutoff : fock::cutoff_for(state, 1.5, s.value());
      const fock::FockDensityMatrix rho = fock::build_density(state, cut);
      const double oracle = fock::w_pair_oracle(rho, alpha, beta, s, cutoff);
      devs[static_cast<std::size_t>(i)] = std::fabs(analytic - oracle);
      cases[static_cast<std::size_t>(i)] = echo.str();
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(i)] = echo.str() + ": " + e.what();
    }
  };

#ifdef _OPENMP
  const int nthreads = jobs == 0 ? omp_get_max_threads() : std::max(1, jobs);
#else
  const int nthreads = 1;
#endif
  if (nthreads == 1) {
    for (int i = 0; i < trials; ++i) run_trial(i);
  } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
#endif
    for (int i = 0; i < trials; ++i) run_trial(i);
  }

  for (int i = 0; i < trials; ++i) {
    if (!errors[static_cast<std::size_t>(i)].empty() && report.error.empty())
      report.error = errors[static_cast<std::size_t>(i)];
    if (devs[static_cast<std::size_t>(i)] > report.max_abs_dev) {
      report.max_abs_dev = devs[static_cast<std::size_t>(i)];
      report.worst_case = cases[static_cast<std::size_t>(i)];
    }
  }
  report.passed = report.error.empty() && report.max_abs_dev < 1e-8;
  return report;
}

SuiteReport loss_suite(int trials, std::uint64_t seed) {
  SuiteReport report;

  const StateModel sp = SinglePhotonEntangled{};
  const StateModel tm = Tmss(0.4);
  const fock::FockDensityMatrix rho_sp =
      fock::build_density(sp, fock::cutoff_for(sp, 0.0, -2.0));
  const fock::FockDensityMatrix rho_tm =
      fock::build_density(tm, fock::cutoff_for(tm, 0.0, -2.0));
  const fock::PhotonNumberDistribution p_sp =
      fock::photon_distribution(rho_sp.reduced_a());
  const fock::PhotonNumberDistribution p_tm =
      fock::photon_distribution(rho_tm.reduced_a());

  std::vector<std::pair<double, double>> grid;
  for (double s : {0.0, -0.5, -1.0, -1.5})
    for (double eta : {0.6, 0.8, 1.0}) grid.emplace_back(s, eta);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> s_draw(-2.0, 0.0);
  std::uniform_real_distribution<double> eta_draw(0.5, 1.0);
  for (int i = 0; i < trials; ++i) grid.emplace_back(s_draw(rng), eta_draw(rng));
  report.trials = static_cast<int>(grid.size());

  try {
    for (const auto& [sv, eta] : grid) {
      const SParameter s(sv);
      const SParameter sprime = bell::effective_s(s, eta);
      const PhasePoint origin(0.0, 0.0);
      const struct {
        const fock::PhotonNumberDistribution& p;
        const StateModel& state;
        const char* name;
      } cases[] = {{p_sp, sp, "single-photon"}, {p_tm, tm, "tmss r=0.4"}};
      for (const auto& c : cases) {
        const double measured = fock::measured_w_origin(c.p, s, eta);
        const double remapped = kernels::w_marginal(c.state, origin, sprime) / eta;
        const double dev = std::fabs(measured - remapped);
        if (dev > report.max_abs_dev) {
          report.max_abs_dev = dev;
          std::ostringstream echo;
          echo << c.name << " s=" << sv << " eta=" << eta;
          report.worst_case = echo.str();
        }
      }
    }
  } catch (const std::exception& e) {
    report.error = e.what();
  }
  report.passed = report.error.empty() && report.max_abs_dev < 1e-8;
  return report;
}

}  // namespace qbell::selftest
