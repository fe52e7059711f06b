#pragma once

#include <optional>

#include "qbell/fock.hpp"
#include "qbell/state.hpp"
#include "qbell/types.hpp"

namespace qbell::bell {

/// Eigenvalue of the observable O(alpha; s) on the n-th displaced number
/// state: (1-s) t^n + s for -1 < s <= 0, and 2 t^n - 1 for s <= -1,
/// with t = (s+1)/(s-1). Always lambda_0 = 1 and |lambda_n| <= 1.
double eigenvalue(int n, SParameter s);

/// Efficiency remap s' = -(1 - s - eta)/eta. Exactly s at eta = 1.
SParameter effective_s(SParameter s, double eta);

/// Measured CHSH-type Bell expectation for the given settings. The four
/// two-mode terms and the two marginals are evaluated at s' and combined
/// with the branch coefficients
///   pi^2(1-s)^4/(4 eta^2), pi s (1-s)^2/eta, 2s^2      for -1 < s <= 0,
///   pi^2(1-s)^2/eta^2,    -2 pi (1-s)/eta,  2          for s <= -1.
BellValue bell_value(const StateModel& state, const MeasurementSettings& settings,
                     const BellContext& ctx);

/// Same quantity evaluated through the operator route: O(alpha; s) built
/// from truncated Pi(alpha; s') matrices, four correlators, CHSH sum.
/// Agrees with bell_value to truncation accuracy.
BellValue bell_value_via_operator(const StateModel& state,
                                  const MeasurementSettings& settings,
                                  const BellContext& ctx,
                                  std::optional<fock::FockCutoff> cutoff = std::nullopt);

/// Thermal-environment smoothing expressed as a shift of s:
/// s(tau) = (1 - exp(gamma tau)) (1 + 2 n_bar) <= 0.
/// Informational only; a time-dependent s is not a valid local-realistic
/// observable, so this quantity must not feed a Bell test.
double thermal_s_shift(double gamma_tau, double n_bar);

namespace detail {
/// bell_value with the coefficient branch forced, for seam tests at s = -1.
BellValue bell_value_with_branch(const StateModel& state,
                                 const MeasurementSettings& settings,
                                 const BellContext& ctx, bool low_branch);
}  // namespace detail

}  // namespace qbell::bell
