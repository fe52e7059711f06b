#pragma once

#include <optional>

#include "qbell/density.hpp"
#include "qbell/state.hpp"
#include "qbell/types.hpp"

namespace qbell::fock {

/// Matrix element <m|D(alpha)|n> of the Glauber displacement operator,
/// computed from the closed associated-Laguerre form with log-factorial
/// scaling. Stable for indices into the hundreds; |result| <= 1.
std::complex<double> displacement_element(int m, int n, PhasePoint alpha);

/// Result of a truncated Pi(alpha; s) build.
struct PiBlock {
  Eigen::MatrixXcd matrix;             // rows x rows, Hermitian
  int terms = 0;                       // number of series terms summed
  double last_term_contribution = 0.0; // |t|^(terms-1) * ||column||^2
};

/// Top-left rows x rows block of Pi(alpha; s) = sum_n t^n D|n><n|D^dag with
/// t = (s+1)/(s-1), summing exactly n_terms terms (n = 0 .. n_terms-1).
PiBlock pi_block(PhasePoint alpha, SParameter s, int rows, int n_terms);

/// As pi_block, but the series length is chosen adaptively: terms are added
/// until the per-term contribution has been negligible for a sustained run
/// past the external window. Throws InadequateCutoffError if 8192 terms do
/// not suffice.
PiBlock pi_block_adaptive(PhasePoint alpha, SParameter s, int rows);

/// Square truncation summing n <= cutoff.n_max on a (n_max+1) x (n_max+1)
/// block.
Eigen::MatrixXcd pi_matrix(PhasePoint alpha, SParameter s, const FockCutoff& cutoff);

/// Truncated density matrix of a state model. For the two analytic families
/// this is the projector onto the truncated state vector, renormalization
/// left undone so the discarded tail weight stays visible in the trace.
/// Fails when the truncated tail exceeds tail_bound.
FockDensityMatrix build_density(const StateModel& state, const FockCutoff& cutoff,
                                double tail_bound = 1e-12);

/// Smallest n_max for a TMSS with tanh(r)^(2(n_max+1)) <= tail_bound.
int tmss_cutoff_for_tail(double r, double tail_bound = 1e-12);

/// Brute-force trace evaluation
/// W(alpha, beta; s) = 4/(pi^2 (1-s)^2) Tr[rho Pi(alpha;s) x Pi(beta;s)].
/// pi_cutoff bounds the Pi series (defaults to an adequate internal choice);
/// throws InadequateCutoffError when the last summed term still contributes
/// more than 1e-10.
double w_pair_oracle(const FockDensityMatrix& rho, PhasePoint alpha, PhasePoint beta,
                     SParameter s, std::optional<FockCutoff> pi_cutoff = std::nullopt);

/// Single-mode analogue, W(alpha; s) = 2/(pi(1-s)) Tr[rho_1 Pi(alpha; s)].
double w_single_oracle(const Eigen::MatrixXcd& rho_single_mode, PhasePoint alpha,
                       SParameter s, std::optional<FockCutoff> pi_cutoff = std::nullopt);

/// Diagonal of a single-mode density matrix in the number basis.
PhotonNumberDistribution photon_distribution(const Eigen::MatrixXcd& rho_single_mode);

/// Binomial loss channel with overall efficiency eta in (0, 1]:
/// P_eta(m) = sum_{n>=m} P(n) C(n,m) (1-eta)^(n-m) eta^m.
PhotonNumberDistribution apply_loss(const PhotonNumberDistribution& p, double eta);

/// Measured quasiprobability at the origin,
/// W_eta(0; s) = 2/(pi(1-s)) sum_m ((s+1)/(s-1))^m P_eta(m).
/// Equals W(0; s')/eta with s' = -(1-s-eta)/eta.
double measured_w_origin(const PhotonNumberDistribution& p, SParameter s, double eta);

/// Adequate truncation for trace evaluations: max of the floor 40, the
/// state-tail requirement (tail <= 1e-12), and the Pi-series requirement
/// (|t|^n times the displaced-vacuum Poisson tail at settings_radius
/// <= 1e-10).
FockCutoff cutoff_for(const StateModel& state, double settings_radius, double s_min);

}  // namespace qbell::fock
