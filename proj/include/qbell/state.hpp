#pragma once

#include <variant>

#include "qbell/density.hpp"
#include "qbell/types.hpp"

namespace qbell {

/// (|0,1> + |1,0>)/sqrt(2): one photon split on a 50:50 beam splitter.
struct SinglePhotonEntangled {};

/// Two-mode squeezed vacuum, sech(r) sum_n tanh(r)^n |n,n>, r > 0.
struct Tmss {
  double r;
  explicit Tmss(double r_in) : r(r_in) {
    if (!(r_in > 0.0) || !std::isfinite(r_in))
      throw std::domain_error("Tmss: squeezing r must be > 0");
  }
};

/// Any truncated two-mode density matrix; evaluated through the Fock oracle.
struct GenericFock {
  fock::FockDensityMatrix matrix;
};

using StateModel = std::variant<SinglePhotonEntangled, Tmss, GenericFock>;

std::string state_name(const StateModel& state);

}  // namespace qbell
