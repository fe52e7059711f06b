#include "qbell/fock.hpp"

#include <algorithm>
#include <numbers>

namespace qbell::fock {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kStateTailBound = 1e-12;
constexpr double kTraceTermBound = 1e-10;
constexpr int kCutoffFloor = 40;

// Associated Laguerre L_k^{(d)}(x) by upward recurrence.
double laguerre(int k, int d, double x) {
  if (k == 0) return 1.0;
  double lm1 = 1.0;
  double l = 1.0 + d - x;
  for (int j = 1; j < k; ++j) {
    const double lp1 = ((2.0 * j + 1.0 + d - x) * l - (j + d) * lm1) / (j + 1.0);
    lm1 = l;
    l = lp1;
  }
  return l;
}

}  // namespace

std::complex<double> displacement_element(int m, int n, PhasePoint alpha) {
  if (m < 0 || n < 0)
    throw std::domain_error("displacement_element: indices must be >= 0");
  const std::complex<double> a = alpha.value();
  const double x = std::norm(a);
  if (x == 0.0) return m == n ? 1.0 : 0.0;

  const int k = std::min(m, n);
  const int d = std::abs(m - n);
  // <m|D|n> = sqrt(k!/(k+d)!) z^d exp(-x/2) L_k^{(d)}(x),
  // z = alpha for m >= n and -conj(alpha) for m < n.
  const double log_mag = 0.5 * (std::lgamma(k + 1.0) - std::lgamma(k + d + 1.0)) +
                         d * std::log(std::abs(a)) - 0.5 * x;
  const double mag = std::exp(log_mag);
  if (mag == 0.0) return 0.0;  // underflowed prefactor; element is negligible
  const double arg = d == 0 ? 0.0 : d * std::arg(m >= n ? a : -std::conj(a));
  return mag * laguerre(k, d, x) * std::polar(1.0, arg);
}

namespace {

// Shared accumulation core. When n_terms == 0 the series length is chosen
// adaptively: summation stops once the per-term contribution |t|^n ||v_n||^2
// has stayed below 0.005 * kTraceTermBound for eight consecutive terms past
// both the external window and the floor.
PiBlock accumulate_pi(PhasePoint alpha, SParameter s, int rows, int n_terms,
                      int max_terms) {
  const double t = s.weight_base();
  PiBlock out;
  out.matrix = Eigen::MatrixXcd::Zero(rows, rows);
  Eigen::VectorXcd col(rows);
  double tpow = 1.0;  // t^0 = 1 also at s = -1 where t = 0
  int quiet_run = 0;
  for (int n = 0; n_terms > 0 ? n < n_terms : n < max_terms; ++n) {
    for (int m = 0; m < rows; ++m) col(m) = displacement_element(m, n, alpha);
    const double contribution = std::abs(tpow) * col.squaredNorm();
    if (tpow != 0.0)
      out.matrix.selfadjointView<Eigen::Lower>().rankUpdate(col, tpow);
    out.last_term_contribution = contribution;
    out.terms = n + 1;
    tpow *= t;
    if (n_terms == 0) {
      quiet_run = contribution < 0.005 * kTraceTermBound ? quiet_run + 1 : 0;
      if (quiet_run >= 8 && n + 1 >= rows && n + 1 >= kCutoffFloor + 1) break;
    }
  }
  Eigen::MatrixXcd full = out.matrix.selfadjointView<Eigen::Lower>();
  out.matrix = std::move(full);
  return out;
}

}  // namespace

PiBlock pi_block_adaptive(PhasePoint alpha, SParameter s, int rows) {
  if (rows < 1) throw std::domain_error("pi_block_adaptive: rows must be >= 1");
  PiBlock b = accumulate_pi(alpha, s, rows, 0, 8192);
  if (b.last_term_contribution > kTraceTermBound)
    throw InadequateCutoffError("pi series did not converge within 8192 terms",
                                b.last_term_contribution);
  return b;
}

PiBlock pi_block(PhasePoint alpha, SParameter s, int rows, int n_terms) {
  if (rows < 1) throw std::domain_error("pi_block: rows must be >= 1");
  if (n_terms < 1) throw std::domain_error("pi_block: need at least one term");
  return accumulate_pi(alpha, s, rows, n_terms, n_terms);
}

Eigen::MatrixXcd pi_matrix(PhasePoint alpha, SParameter s, const FockCutoff& cutoff) {
  return pi_block(alpha, s, cutoff.dim(), cutoff.dim()).matrix;
}

int tmss_cutoff_for_tail(double r, double tail_bound) {
  if (!(r > 0.0)) throw std::domain_error("tmss_cutoff_for_tail: r must be > 0");
  // Discarded weight above n_max is tanh(r)^(2(n_max+1)).
  const double log_tanh = std::log(std::tanh(r));
  const int n = static_cast<int>(std::ceil(std::log(tail_bound) / (2.0 * log_tanh))) - 1;
  return std::max(1, n);
}

FockDensityMatrix build_density(const StateModel& state, const FockCutoff& cutoff,
                                double tail_bound) {
  const int dim = cutoff.dim();
  if (std::holds_alternative<SinglePhotonEntangled>(state)) {
    // Exact at any cutoff >= 1: the state lives on {|0,1>, |1,0>}.
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim) * dim);
    const double amp = 1.0 / std::sqrt(2.0);
    psi(0 * dim + 1) = amp;
    psi(1 * dim + 0) = amp;
    return FockDensityMatrix::pure(dim, dim, std::move(psi), 0.0);
  }
  if (const auto* tmss = std::get_if<Tmss>(&state)) {
    const double th = std::tanh(tmss->r);
    const double tail = std::pow(th, 2.0 * dim);
    if (tail > tail_bound)
      throw std::domain_error("build_density: cutoff too small for requested TMSS tail");
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim) * dim);
    double c = 1.0 / std::cosh(tmss->r);
    for (int n = 0; n < dim; ++n) {
      psi(static_cast<Eigen::Index>(n) * dim + n) = c;
      c *= th;
    }
    return FockDensityMatrix::pure(dim, dim, std::move(psi), tail);
  }
  return std::get<GenericFock>(state).matrix;
}

namespace {

// Terms needed so that |t|^n * (Poisson tail of lambda = radius^2 beyond n)
// drops under bound. The tail is bounded by p_n / (1 - lambda/(n+1)) once
// n + 1 > 2 lambda.
int pi_terms_needed(double radius, double t_abs, double bound) {
  const double lambda = std::max(radius * radius, 1e-12);
  const double log_t = t_abs > 0.0 ? std::log(t_abs) : -745.0;
  const double log_bound = std::log(bound);
  double log_p = -lambda;  // log of e^-lambda lambda^n / n! at n = 0
  int n = 0;
  for (; n < 100000; ++n) {
    if (n + 1.0 > 2.0 * lambda) {
      const double log_tail = log_p - std::log1p(-lambda / (n + 1.0));
      if (n * log_t + log_tail <= log_bound) break;
    }
    log_p += std::log(lambda) - std::log(n + 1.0);
  }
  return n + 1;
}

// Tr[rho (PA x PB)] for a factored density, accumulated per pure component:
// <psi| PA x PB |psi> = sum_{ma,mb} conj(Y(ma,mb)) (PA Y PB^T)(ma,mb).
std::complex<double> two_mode_trace(const FockDensityMatrix& rho,
                                    const Eigen::MatrixXcd& pa,
                                    const Eigen::MatrixXcd& pb) {
  std::complex<double> acc = 0.0;
  for (int k = 0; k < rho.rank(); ++k) {
    const Eigen::MatrixXcd y = rho.component_matrix(k);
    acc += rho.weights()[static_cast<std::size_t>(k)] *
           (y.conjugate().cwiseProduct(pa * y * pb.transpose())).sum();
  }
  return acc;
}

}  // namespace

double w_pair_oracle(const FockDensityMatrix& rho, PhasePoint alpha, PhasePoint beta,
                     SParameter s, std::optional<FockCutoff> pi_cutoff) {
  PiBlock pa, pb;
  if (pi_cutoff) {
    pa = pi_block(alpha, s, rho.dim_a(), pi_cutoff->n_max() + 1);
    pb = pi_block(beta, s, rho.dim_b(), pi_cutoff->n_max() + 1);
    const double last = std::max(pa.last_term_contribution, pb.last_term_contribution);
    if (last > kTraceTermBound)
      throw InadequateCutoffError(
          "w_pair_oracle: Pi series truncated too early (last term " +
              std::to_string(last) + ")",
          last);
  } else {
    pa = pi_block_adaptive(alpha, s, rho.dim_a());
    pb = pi_block_adaptive(beta, s, rho.dim_b());
  }

  const std::complex<double> tr = two_mode_trace(rho, pa.matrix, pb.matrix);
  if (std::abs(tr.imag()) > 1e-10)
    throw std::runtime_error("w_pair_oracle: trace has non-negligible imaginary part");
  const double one_minus = 1.0 - s.value();
  return 4.0 / (kPi * kPi * one_minus * one_minus) * tr.real();
}

double w_single_oracle(const Eigen::MatrixXcd& rho_single_mode, PhasePoint alpha,
                       SParameter s, std::optional<FockCutoff> pi_cutoff) {
  if (rho_single_mode.rows() != rho_single_mode.cols())
    throw std::domain_error("w_single_oracle: density matrix must be square");
  const int rows = static_cast<int>(rho_single_mode.rows());
  PiBlock p;
  if (pi_cutoff) {
    p = pi_block(alpha, s, rows, pi_cutoff->n_max() + 1);
    if (p.last_term_contribution > kTraceTermBound)
      throw InadequateCutoffError("w_single_oracle: Pi series truncated too early",
                                  p.last_term_contribution);
  } else {
    p = pi_block_adaptive(alpha, s, rows);
  }
  const std::complex<double> tr = (rho_single_mode * p.matrix).trace();
  if (std::abs(tr.imag()) > 1e-10)
    throw std::runtime_error("w_single_oracle: trace has non-negligible imaginary part");
  return 2.0 / (kPi * (1.0 - s.value())) * tr.real();
}

PhotonNumberDistribution photon_distribution(const Eigen::MatrixXcd& rho_single_mode) {
  if (rho_single_mode.rows() != rho_single_mode.cols())
    throw std::domain_error("photon_distribution: density matrix must be square");
  PhotonNumberDistribution p;
  p.probs.resize(static_cast<std::size_t>(rho_single_mode.rows()));
  for (Eigen::Index n = 0; n < rho_single_mode.rows(); ++n)
    p.probs[static_cast<std::size_t>(n)] = rho_single_mode(n, n).real();
  return p;
}

PhotonNumberDistribution apply_loss(const PhotonNumberDistribution& p, double eta) {
  if (!(eta > 0.0) || eta > 1.0)
    throw std::domain_error("apply_loss: eta must lie in (0, 1]");
  p.validate();
  if (eta == 1.0) return p;
  const std::size_t n_max = p.probs.size();
  PhotonNumberDistribution out;
  out.probs.assign(n_max, 0.0);
  for (std::size_t n = 0; n < n_max; ++n) {
    if (p.probs[n] == 0.0) continue;
    double term = std::pow(1.0 - eta, static_cast<double>(n));  // m = 0
    if (term == 0.0 && n > 0) {
      // (1-eta)^n underflowed; accumulate this row in log space
      for (std::size_t m = 0; m <= n; ++m) {
        const double lg = std::lgamma(n + 1.0) - std::lgamma(m + 1.0) -
                          std::lgamma(n - m + 1.0) + m * std::log(eta) +
                          (n - m) * std::log1p(-eta);
        out.probs[m] += p.probs[n] * std::exp(lg);
      }
      continue;
    }
    // binom(n, m) eta^m (1-eta)^(n-m) via the ratio recurrence in m
    for (std::size_t m = 0; m <= n; ++m) {
      out.probs[m] += p.probs[n] * term;
      if (m < n)
        term *= (static_cast<double>(n - m) / (m + 1.0)) * (eta / (1.0 - eta));
    }
  }
  return out;
}

double measured_w_origin(const PhotonNumberDistribution& p, SParameter s, double eta) {
  const PhotonNumberDistribution smeared = apply_loss(p, eta);
  const double t = s.weight_base();
  double acc = 0.0;
  double tpow = 1.0;
  for (double prob : smeared.probs) {
    acc += tpow * prob;
    tpow *= t;
  }
  return 2.0 / (kPi * (1.0 - s.value())) * acc;
}

FockCutoff cutoff_for(const StateModel& state, double settings_radius, double s_min) {
  if (!(settings_radius >= 0.0))
    throw std::domain_error("cutoff_for: settings_radius must be >= 0");
  int state_need = 1;
  if (const auto* tmss = std::get_if<Tmss>(&state))
    state_need = tmss_cutoff_for_tail(tmss->r, kStateTailBound);
  else if (const auto* gf = std::get_if<GenericFock>(&state))
    state_need = std::max(gf->matrix.dim_a(), gf->matrix.dim_b()) - 1;

  const double t_abs = std::abs(SParameter(std::min(0.0, s_min)).weight_base());
  const int pi_need = pi_terms_needed(settings_radius, t_abs, kTraceTermBound) - 1;
  return FockCutoff(std::max({kCutoffFloor, state_need, pi_need}));
}

}  // namespace qbell::fock
