#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "qbell/fock.hpp"

namespace qbell::selftest {

struct SuiteReport {
  int trials = 0;
  double max_abs_dev = 0.0;
  std::string worst_case;   // echo of the offending inputs
  bool passed = false;      // max_abs_dev < 1e-8 and no evaluation error
  std::string error;        // set when a trial threw (e.g. inadequate cutoff)
};

/// Analytic kernels vs Fock-trace oracle on seeded random inputs
/// (|alpha|, |beta| <= 1.5, s in [-2, 0], r in (0, 1.5]), alternating the
/// two state families. cutoff overrides the Pi-series truncation.
SuiteReport equivalence_suite(int trials, std::uint64_t seed,
                              std::optional<fock::FockCutoff> cutoff = std::nullopt,
                              int jobs = 1);

/// Binomial-loss identity: measured_w_origin(P, s, eta) = W(0; s')/eta for
/// both reduced states, on the fixed grid s in {0,-0.5,-1,-1.5} x
/// eta in {0.6, 0.8, 1.0} plus seeded random (s, eta) pairs.
SuiteReport loss_suite(int trials, std::uint64_t seed);

}  // namespace qbell::selftest
