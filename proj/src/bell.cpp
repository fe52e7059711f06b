#include "qbell/bell.hpp"

#include <algorithm>
#include <numbers>

#include "qbell/kernels.hpp"

namespace qbell::bell {

namespace {

constexpr double kPi = std::numbers::pi;

struct BranchCoefficients {
  double pair;      // multiplies the four two-mode terms
  double marginal;  // multiplies W(alpha1) + W(beta1)
  double constant;
};

BranchCoefficients coefficients(double s, double eta, bool low_branch) {
  const double one_minus = 1.0 - s;
  if (!low_branch) {
    // -1 < s <= 0
    return {kPi * kPi * one_minus * one_minus * one_minus * one_minus /
                (4.0 * eta * eta),
            kPi * s * one_minus * one_minus / eta, 2.0 * s * s};
  }
  // s <= -1
  return {kPi * kPi * one_minus * one_minus / (eta * eta),
          -2.0 * kPi * one_minus / eta, 2.0};
}

BellValue combine(const StateModel& state, const MeasurementSettings& settings,
                  const BellContext& ctx, bool low_branch) {
  const SParameter sp = effective_s(ctx.s, ctx.eta);
  const double four = kernels::w_pair(state, settings.alpha1, settings.beta1, sp) +
                      kernels::w_pair(state, settings.alpha1, settings.beta2, sp) +
                      kernels::w_pair(state, settings.alpha2, settings.beta1, sp) -
                      kernels::w_pair(state, settings.alpha2, settings.beta2, sp);
  const double marg =
      kernels::w_marginal(state, settings.alpha1, sp, kernels::Mode::A) +
      kernels::w_marginal(state, settings.beta1, sp, kernels::Mode::B);
  const BranchCoefficients c = coefficients(ctx.s.value(), ctx.eta, low_branch);
  return BellValue::from(c.pair * four + c.marginal * marg + c.constant);
}

}  // namespace

double eigenvalue(int n, SParameter s) {
  if (n < 0) throw std::domain_error("eigenvalue: n must be >= 0");
  if (n == 0) return 1.0;  // both branches give exactly 1 at t^0
  const double t = s.weight_base();
  double tpow = 1.0;
  for (int k = 0; k < n; ++k) tpow *= t;
  return s.value() > -1.0 ? (1.0 - s.value()) * tpow + s.value() : 2.0 * tpow - 1.0;
}

SParameter effective_s(SParameter s, double eta) {
  if (!(eta > 0.0) || eta > 1.0)
    throw std::domain_error("effective_s: eta must lie in (0, 1]");
  if (eta == 1.0) return s;  // keep the identity exact
  return SParameter(-(1.0 - s.value() - eta) / eta);
}

BellValue bell_value(const StateModel& state, const MeasurementSettings& settings,
                     const BellContext& ctx) {
  return combine(state, settings, ctx, ctx.s.value() <= -1.0);
}

BellValue detail::bell_value_with_branch(const StateModel& state,
                                         const MeasurementSettings& settings,
                                         const BellContext& ctx, bool low_branch) {
  return combine(state, settings, ctx, low_branch);
}

BellValue bell_value_via_operator(const StateModel& state,
                                  const MeasurementSettings& settings,
                                  const BellContext& ctx,
                                  std::optional<fock::FockCutoff> cutoff) {
  const double s = ctx.s.value();
  const SParameter sp = effective_s(ctx.s, ctx.eta);
  const bool low_branch = s <= -1.0;
  const double radius =
      std::max({settings.alpha1.abs(), settings.alpha2.abs(), settings.beta1.abs(),
                settings.beta2.abs()});
  const fock::FockCutoff cut =
      cutoff ? *cutoff : fock::cutoff_for(state, radius, sp.value());
  const fock::FockDensityMatrix rho = fock::build_density(state, cut);

  // The eta-dressed observable keeps the original two-branch shape with Pi
  // evaluated at s': the 1/eta factors cancel against 1 - s' = (1 - s)/eta.
  auto observable = [&](PhasePoint gamma, int rows) {
    fock::PiBlock pb;
    if (cutoff) {
      pb = fock::pi_block(gamma, sp, rows, cutoff->n_max() + 1);
      if (pb.last_term_contribution > 1e-10)
        throw InadequateCutoffError("bell_value_via_operator: Pi series truncated",
                                    pb.last_term_contribution);
    } else {
      pb = fock::pi_block_adaptive(gamma, sp, rows);
    }
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(rows, rows);
    return low_branch ? (2.0 * pb.matrix - id).eval()
                      : ((1.0 - s) * pb.matrix + s * id).eval();
  };
  const Eigen::MatrixXcd a1 = observable(settings.alpha1, rho.dim_a());
  const Eigen::MatrixXcd a2 = observable(settings.alpha2, rho.dim_a());
  const Eigen::MatrixXcd b1 = observable(settings.beta1, rho.dim_b());
  const Eigen::MatrixXcd b2 = observable(settings.beta2, rho.dim_b());

  auto correlator = [&](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    std::complex<double> acc = 0.0;
    for (int k = 0; k < rho.rank(); ++k) {
      const Eigen::MatrixXcd y = rho.component_matrix(k);
      acc += rho.weights()[static_cast<std::size_t>(k)] *
             (y.conjugate().cwiseProduct(a * y * b.transpose())).sum();
    }
    if (std::abs(acc.imag()) > 1e-9)
      throw std::runtime_error("bell_value_via_operator: complex correlator");
    return acc.real();
  };

  const double value = correlator(a1, b1) + correlator(a1, b2) + correlator(a2, b1) -
                       correlator(a2, b2);
  return BellValue::from(value);
}

double thermal_s_shift(double gamma_tau, double n_bar) {
  if (!(gamma_tau >= 0.0)) throw std::domain_error("thermal_s_shift: gamma_tau >= 0");
  if (!(n_bar >= 0.0)) throw std::domain_error("thermal_s_shift: n_bar >= 0");
  return (1.0 - std::exp(gamma_tau)) * (1.0 + 2.0 * n_bar);
}

}  // namespace qbell::bell
