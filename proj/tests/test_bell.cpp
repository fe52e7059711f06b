#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "qbell/bell.hpp"
#include "qbell/kernels.hpp"
#include "qbell/search.hpp"

using namespace qbell;
using namespace qbell::bell;

namespace {
constexpr double kPi = std::numbers::pi;
const PhasePoint kOrigin(0.0, 0.0);
const MeasurementSettings kZeros{kOrigin, kOrigin, kOrigin, kOrigin};

MeasurementSettings random_settings(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(-radius, radius);
  return {PhasePoint(u(rng), u(rng)), PhasePoint(u(rng), u(rng)),
          PhasePoint(u(rng), u(rng)), PhasePoint(u(rng), u(rng))};
}
}  // namespace

TEST_CASE("eigenvalue: parity at s = 0, on-off dichotomy at s = -1") {
  for (int n = 0; n < 8; ++n)
    CHECK(eigenvalue(n, SParameter(0.0)) == (n % 2 ? -1.0 : 1.0));
  CHECK(eigenvalue(0, SParameter(-1.0)) == 1.0);
  for (int n = 1; n < 6; ++n) CHECK(eigenvalue(n, SParameter(-1.0)) == -1.0);
  CHECK(eigenvalue(1, SParameter(-0.5)) == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("eigenvalue: lambda_0 = 1 exactly and |lambda_n| <= 1") {
  for (double s = -3.0; s <= 0.0; s += 0.05) {
    CHECK(eigenvalue(0, SParameter(s)) == 1.0);
    for (int n = 1; n <= 200; n += 13) {
      const double lam = eigenvalue(n, SParameter(s));
      CHECK(std::fabs(lam) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("effective_s: identity at eta = 1, pinned remaps, monotone property") {
  CHECK(effective_s(SParameter(0.0), 1.0).value() == 0.0);
  CHECK(effective_s(SParameter(-0.37), 1.0).value() == -0.37);
  CHECK(effective_s(SParameter(-1.0), 0.5).value() == doctest::Approx(-3.0));
  CHECK(effective_s(SParameter(0.0), 0.83).value() ==
        doctest::Approx(-0.17 / 0.83).epsilon(1e-14));
  for (double s : {0.0, -0.4, -1.3})
    for (double eta : {0.3, 0.6, 0.99})
      CHECK(effective_s(SParameter(s), eta).value() <= s + 1e-15);
  CHECK_THROWS_AS(effective_s(SParameter(0.0), 0.0), std::domain_error);
  CHECK_THROWS_AS(effective_s(SParameter(0.0), 1.2), std::domain_error);
}

TEST_CASE("boundary exactness: all-zero settings give -2 and +2") {
  const BellContext ideal(SParameter(0.0), 1.0);
  const BellValue sp = bell_value(SinglePhotonEntangled{}, kZeros, ideal);
  CHECK(std::fabs(sp.value - (-2.0)) < 1e-12);
  CHECK_FALSE(sp.violated);
  for (double r : {0.3, 1.0, 2.0}) {
    const BellValue tm = bell_value(Tmss(r), kZeros, ideal);
    CHECK(std::fabs(tm.value - 2.0) < 1e-12);
    CHECK_FALSE(tm.violated);
  }
}

TEST_CASE("branch continuity at s = -1 over random settings and states") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const MeasurementSettings st = random_settings(rng, 1.5);
    const double eta = 0.55 + 0.45 * u(rng);
    const BellContext ctx(SParameter(-1.0), eta);
    const StateModel state =
        trial % 2 ? StateModel(Tmss(0.2 + u(rng))) : StateModel(SinglePhotonEntangled{});
    const double low = detail::bell_value_with_branch(state, st, ctx, true).value;
    const double high = detail::bell_value_with_branch(state, st, ctx, false).value;
    CHECK(low == doctest::Approx(high).epsilon(1e-12));
  }
}

TEST_CASE("observable is continuous at the branch seam s = -1") {
  // (1-s) Pi + s id with s = -1 equals 2 Pi - id entrywise.
  const SParameter s(-1.0);
  const fock::PiBlock pi = fock::pi_block_adaptive(PhasePoint(0.45, -0.3), s, 24);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(24, 24);
  const Eigen::MatrixXcd high = (1.0 - s.value()) * pi.matrix + s.value() * id;
  const Eigen::MatrixXcd low = 2.0 * pi.matrix - id;
  CHECK((high - low).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("operator route agrees with the kernel route") {
  const BellContext ideal(SParameter(0.0), 1.0);
  const BellValue direct = bell_value(SinglePhotonEntangled{}, kZeros, ideal);
  const BellValue op = bell_value_via_operator(SinglePhotonEntangled{}, kZeros, ideal);
  CHECK(std::fabs(direct.value - op.value) < 1e-9);
  CHECK(std::fabs(op.value - (-2.0)) < 1e-9);

  std::mt19937_64 rng(23);
  const MeasurementSettings st = random_settings(rng, 1.0);
  const BellContext dressed(SParameter(-1.0), 0.9);
  const BellValue k1 = bell_value(Tmss(0.6), st, dressed);
  const BellValue o1 = bell_value_via_operator(Tmss(0.6), st, dressed);
  CHECK(std::fabs(k1.value - o1.value) < 1e-8);
}

TEST_CASE("operator route agrees across states, branches and efficiencies") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    const MeasurementSettings st = random_settings(rng, 1.0);
    const double s = -1.8 * u(rng);
    const double eta = 0.6 + 0.4 * u(rng);
    const BellContext ctx(SParameter(s), eta);
    const StateModel state =
        trial % 2 ? StateModel(Tmss(0.3 + 0.6 * u(rng))) : StateModel(SinglePhotonEntangled{});
    const double kernel_route = bell_value(state, st, ctx).value;
    const double operator_route = bell_value_via_operator(state, st, ctx).value;
    CHECK(kernel_route == doctest::Approx(operator_route).epsilon(1e-8));
  }
}

TEST_CASE("operator route agrees for generic Fock states too") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  auto coherent = [](std::complex<double> g, int n) {
    return std::exp(-0.5 * std::norm(g)) * std::pow(g, n) /
           std::sqrt(std::tgamma(n + 1.0));
  };
  const std::complex<double> ga(u(rng), u(rng)), gb(u(rng), u(rng));
  const int dim = 16;
  Eigen::VectorXcd psi(static_cast<Eigen::Index>(dim) * dim);
  for (int na = 0; na < dim; ++na)
    for (int nb = 0; nb < dim; ++nb)
      psi(static_cast<Eigen::Index>(na) * dim + nb) = coherent(ga, na) * coherent(gb, nb);
  const GenericFock state{fock::FockDensityMatrix::pure(dim, dim, psi)};
  for (int trial = 0; trial < 3; ++trial) {
    const MeasurementSettings st = random_settings(rng, 0.8);
    const BellContext ctx(SParameter(trial == 0 ? 0.0 : -0.9 * trial), 0.85);
    const double kernel_route = bell_value(state, st, ctx).value;
    const double operator_route = bell_value_via_operator(state, st, ctx).value;
    CHECK(kernel_route == doctest::Approx(operator_route).epsilon(1e-8));
  }
}

TEST_CASE("eta = 1 context reduces to the ideal inequality") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 6; ++trial) {
    const MeasurementSettings st = random_settings(rng, 1.2);
    for (double s : {0.0, -0.6, -1.0, -1.4}) {
      const BellContext ctx(SParameter(s), 1.0);
      CHECK(effective_s(ctx.s, 1.0).value() == s);
      const double kernel_route = bell_value(SinglePhotonEntangled{}, st, ctx).value;
      const double operator_route =
          bell_value_via_operator(SinglePhotonEntangled{}, st, ctx).value;
      CHECK(kernel_route == doctest::Approx(operator_route).epsilon(1e-9));
    }
  }
}

TEST_CASE("fixed-settings information loss is monotone on eta in [0.5, 1]") {
  for (double s : {0.0, -1.0}) {
    double prev = -1.0;
    for (int k = 0; k <= 10; ++k) {
      const double eta = std::min(1.0, 0.5 + 0.05 * k);
      const double mag =
          bell_value(SinglePhotonEntangled{}, kZeros, BellContext(SParameter(s), eta))
              .magnitude;
      CHECK(mag >= prev - 1e-12);
      prev = mag;
    }
  }
}

TEST_CASE("LR sanity: separable coherent products stay within the bound") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 3; ++trial) {
    // truncated coherent product |g_a> x |g_b|, |g| <= 1
    const std::complex<double> ga(u(rng) * 0.7, u(rng) * 0.7);
    const std::complex<double> gb(u(rng) * 0.7, u(rng) * 0.7);
    const int dim = 18;
    auto coherent = [](std::complex<double> g, int n) {
      return std::exp(-0.5 * std::norm(g)) * std::pow(g, n) /
             std::sqrt(std::tgamma(n + 1.0));
    };
    Eigen::VectorXcd psi(static_cast<Eigen::Index>(dim) * dim);
    for (int na = 0; na < dim; ++na)
      for (int nb = 0; nb < dim; ++nb)
        psi(static_cast<Eigen::Index>(na) * dim + nb) = coherent(ga, na) * coherent(gb, nb);
    const GenericFock state{fock::FockDensityMatrix::pure(dim, dim, psi)};
    search::SearchOptions opts;
    opts.restarts = 8;
    opts.jobs = 0;
    opts.seed = 100u + static_cast<unsigned>(trial);
    const BellContext ctx(SParameter(-0.5 * std::abs(u(rng))), 1.0);
    const auto result = search::maximize_bell(state, ctx, opts);
    CHECK(result.best.magnitude <= 2.0 + 1e-9);
  }
}

TEST_CASE("thermal s-shift: pinned values and sign") {
  CHECK(thermal_s_shift(0.0, 3.7) == 0.0);
  CHECK(thermal_s_shift(std::log(2.0), 0.0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(thermal_s_shift(std::log(2.0), 1.0) == doctest::Approx(-3.0).epsilon(1e-14));
  for (double gt : {0.0, 0.3, 2.0})
    for (double nb : {0.0, 0.5, 4.0}) CHECK(thermal_s_shift(gt, nb) <= 0.0);
  CHECK_THROWS_AS(thermal_s_shift(-0.1, 0.0), std::domain_error);
  CHECK_THROWS_AS(thermal_s_shift(0.1, -1.0), std::domain_error);
}
