#include "qbell/kernels.hpp"

#include <numbers>

#include "qbell/fock.hpp"

namespace qbell::kernels {

namespace {
constexpr double kPi = std::numbers::pi;
}

GaussianFactors gaussian_factors(SParameter s, double r) {
  if (!(r > 0.0) || !std::isfinite(r))
    throw std::domain_error("gaussian_factors: squeezing r must be > 0");
  const double sv = s.value();
  const double ch = std::cosh(2.0 * r);
  return {sv * sv - 2.0 * sv * ch + 1.0, ch - sv};
}

double w_single_photon_pair(PhasePoint alpha, PhasePoint beta, SParameter s) {
  const double one_minus = 1.0 - s.value();
  const double a2 = std::norm(alpha.value());
  const double b2 = std::norm(beta.value());
  const double sum2 = std::norm(alpha.value() + beta.value());
  const double bracket =
      -(1.0 + s.value()) / one_minus + 2.0 * sum2 / (one_minus * one_minus);
  return 4.0 / (kPi * kPi * one_minus * one_minus) * bracket *
         std::exp(-2.0 * (a2 + b2) / one_minus);
}

double w_single_photon_marginal(PhasePoint alpha, SParameter s) {
  const double one_minus = 1.0 - s.value();
  const double a2 = std::norm(alpha.value());
  const double bracket =
      -2.0 * s.value() / one_minus + 4.0 * a2 / (one_minus * one_minus);
  return bracket / (kPi * one_minus) * std::exp(-2.0 * a2 / one_minus);
}

double w_tmss_pair(PhasePoint alpha, PhasePoint beta, SParameter s, double r) {
  const auto [R, S] = gaussian_factors(s, r);
  const double a2 = std::norm(alpha.value());
  const double b2 = std::norm(beta.value());
  // alpha*beta + conj(alpha)*conj(beta) = 2 Re(alpha*beta)
  const double cross = 2.0 * (alpha.value() * beta.value()).real();
  const double expo = -(2.0 / R) * (S * (a2 + b2) - std::sinh(2.0 * r) * cross);
  return 4.0 / (kPi * kPi * R) * std::exp(expo);
}

double w_tmss_marginal(PhasePoint alpha, SParameter s, double r) {
  const double S = gaussian_factors(s, r).S;
  return 2.0 / (kPi * S) * std::exp(-2.0 * std::norm(alpha.value()) / S);
}

double w_pair(const StateModel& state, PhasePoint alpha, PhasePoint beta, SParameter s) {
  if (std::holds_alternative<SinglePhotonEntangled>(state))
    return w_single_photon_pair(alpha, beta, s);
  if (const auto* tmss = std::get_if<Tmss>(&state))
    return w_tmss_pair(alpha, beta, s, tmss->r);
  return fock::w_pair_oracle(std::get<GenericFock>(state).matrix, alpha, beta, s);
}

double w_marginal(const StateModel& state, PhasePoint alpha, SParameter s, Mode mode) {
  if (std::holds_alternative<SinglePhotonEntangled>(state))
    return w_single_photon_marginal(alpha, s);
  if (const auto* tmss = std::get_if<Tmss>(&state))
    return w_tmss_marginal(alpha, s, tmss->r);
  const auto& rho = std::get<GenericFock>(state).matrix;
  return fock::w_single_oracle(mode == Mode::A ? rho.reduced_a() : rho.reduced_b(),
                               alpha, s);
}

PhasePoint lo_displacement(PhasePoint xi, double T) {
  if (!(T > 0.0) || !(T < 1.0))
    throw std::domain_error("lo_displacement: transmissivity T must lie in (0, 1)");
  const double scale = std::sqrt((1.0 - T) / T);
  return PhasePoint(xi.re() * scale, xi.im() * scale);
}

}  // namespace qbell::kernels
