#pragma once

// Independent displacement-operator oracle: D(alpha) = exp(alpha a^dag -
// conj(alpha) a) evaluated by a dense matrix exponential on a truncated
// space. Used only to cross-check the closed Laguerre form.

#include <Eigen/Dense>
#include <complex>
#include <unsupported/Eigen/MatrixFunctions>

namespace qbell::testsupport {

inline Eigen::MatrixXcd displacement_expm(std::complex<double> alpha, int dim) {
  Eigen::MatrixXcd annihilate = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) annihilate(n - 1, n) = std::sqrt(static_cast<double>(n));
  const Eigen::MatrixXcd gen =
      alpha * annihilate.adjoint() - std::conj(alpha) * annihilate;
  return gen.exp();
}

}  // namespace qbell::testsupport
