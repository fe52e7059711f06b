#pragma once

#include "qbell/state.hpp"
#include "qbell/types.hpp"

namespace qbell::kernels {

/// Precomputed Gaussian coefficients of the TMSS quasiprobability:
/// R = s^2 - 2 s cosh(2r) + 1,  S = cosh(2r) - s.
struct GaussianFactors {
  double R;
  double S;
};

GaussianFactors gaussian_factors(SParameter s, double r);

/// Two-mode quasiprobability of the single-photon entangled state,
/// W(alpha, beta; s) = 4/(pi^2 (1-s)^2) * (-(1+s)/(1-s)
///                     + 2|alpha+beta|^2/(1-s)^2) * exp(-2(|a|^2+|b|^2)/(1-s)).
double w_single_photon_pair(PhasePoint alpha, PhasePoint beta, SParameter s);

/// Its single-mode marginal,
/// (1/(pi(1-s))) * (-2s/(1-s) + 4|alpha|^2/(1-s)^2) * exp(-2|alpha|^2/(1-s)).
double w_single_photon_marginal(PhasePoint alpha, SParameter s);

/// Two-mode quasiprobability of the TMSS with squeezing r > 0,
/// 4/(pi^2 R) * exp(-(2/R) {S(|a|^2+|b|^2) - sinh(2r)(ab + conj(ab))}).
/// Strictly positive everywhere.
double w_tmss_pair(PhasePoint alpha, PhasePoint beta, SParameter s, double r);

/// Its single-mode marginal, 2/(pi S) * exp(-2|alpha|^2 / S).
double w_tmss_marginal(PhasePoint alpha, SParameter s, double r);

/// Dispatch over the state model; GenericFock delegates to the Fock oracle.
double w_pair(const StateModel& state, PhasePoint alpha, PhasePoint beta, SParameter s);

/// Single-mode marginal of the chosen party. The two analytic families are
/// mode-symmetric; GenericFock traces out the other mode.
enum class Mode { A, B };
double w_marginal(const StateModel& state, PhasePoint alpha, SParameter s,
                  Mode mode = Mode::A);

/// Displacement realized by a high-transmissivity beam splitter fed with a
/// strong coherent field xi: alpha = xi * sqrt((1-T)/T), 0 < T < 1.
PhasePoint lo_displacement(PhasePoint xi, double T);

}  // namespace qbell::kernels
