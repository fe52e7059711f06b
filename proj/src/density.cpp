#include "qbell/density.hpp"

#include <Eigen/Eigenvalues>

namespace qbell::fock {

FockDensityMatrix::FockDensityMatrix(int dim_a, int dim_b, std::vector<double> w,
                                     std::vector<Eigen::VectorXcd> v, double tail)
    : dim_a_(dim_a), dim_b_(dim_b), weights_(std::move(w)), vectors_(std::move(v)),
      tail_weight_(tail) {
  if (dim_a_ < 1 || dim_b_ < 1)
    throw std::domain_error("FockDensityMatrix: mode dimensions must be >= 1");
  if (weights_.size() != vectors_.size())
    throw std::domain_error("FockDensityMatrix: weight/vector count mismatch");
  const Eigen::Index n = static_cast<Eigen::Index>(dim_a_) * dim_b_;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    if (!(weights_[k] >= 0.0))
      throw std::domain_error("FockDensityMatrix: mixture weights must be >= 0");
    if (vectors_[k].size() != n)
      throw std::domain_error("FockDensityMatrix: component vector has wrong length");
  }
}

FockDensityMatrix FockDensityMatrix::pure(int dim_a, int dim_b, Eigen::VectorXcd psi,
                                          double tail_weight) {
  std::vector<Eigen::VectorXcd> v;
  v.push_back(std::move(psi));
  return FockDensityMatrix(dim_a, dim_b, {1.0}, std::move(v), tail_weight);
}

FockDensityMatrix FockDensityMatrix::mixture(int dim_a, int dim_b,
                                             std::vector<double> weights,
                                             std::vector<Eigen::VectorXcd> vectors,
                                             double tail_weight) {
  return FockDensityMatrix(dim_a, dim_b, std::move(weights), std::move(vectors),
                           tail_weight);
}

FockDensityMatrix FockDensityMatrix::from_dense(int dim_a, int dim_b,
                                                const Eigen::MatrixXcd& rho) {
  const Eigen::Index n = static_cast<Eigen::Index>(dim_a) * dim_b;
  if (rho.rows() != n || rho.cols() != n)
    throw std::domain_error("from_dense: matrix shape does not match mode dimensions");
  const double herm_err = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm_err > 1e-12)
    throw std::domain_error("from_dense: matrix is not Hermitian within 1e-12");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (rho + rho.adjoint()));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("from_dense: eigendecomposition failed");
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -1e-10)
    throw std::domain_error("from_dense: matrix is not positive semidefinite");

  std::vector<double> w;
  std::vector<Eigen::VectorXcd> v;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double lam = es.eigenvalues()(k);
    if (lam > 1e-14) {
      w.push_back(lam);
      v.push_back(es.eigenvectors().col(k));
    }
  }
  const double tr = rho.trace().real();
  return FockDensityMatrix(dim_a, dim_b, std::move(w), std::move(v),
                           std::max(0.0, 1.0 - tr));
}

double FockDensityMatrix::trace() const {
  double t = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k)
    t += weights_[k] * vectors_[k].squaredNorm();
  return t;
}

std::complex<double> FockDensityMatrix::entry(Eigen::Index i, Eigen::Index j) const {
  std::complex<double> e = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k)
    e += weights_[k] * vectors_[k](i) * std::conj(vectors_[k](j));
  return e;
}

Eigen::MatrixXcd FockDensityMatrix::dense() const {
  const Eigen::Index n = static_cast<Eigen::Index>(dim_a_) * dim_b_;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t k = 0; k < weights_.size(); ++k)
    rho.noalias() += weights_[k] * vectors_[k] * vectors_[k].adjoint();
  return rho;
}

Eigen::MatrixXcd FockDensityMatrix::component_matrix(int k) const {
  // Mode-A-major flattening: psi(na * dim_b + nb) = Y(na, nb).
  return Eigen::Map<const Eigen::Matrix<std::complex<double>, Eigen::Dynamic,
                                        Eigen::Dynamic, Eigen::RowMajor>>(
      vectors_[static_cast<std::size_t>(k)].data(), dim_a_, dim_b_);
}

Eigen::MatrixXcd FockDensityMatrix::reduced_a() const {
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim_a_, dim_a_);
  for (int k = 0; k < rank(); ++k) {
    const Eigen::MatrixXcd y = component_matrix(k);
    rho.noalias() += weights_[static_cast<std::size_t>(k)] * y * y.adjoint();
  }
  return rho;
}

Eigen::MatrixXcd FockDensityMatrix::reduced_b() const {
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim_b_, dim_b_);
  for (int k = 0; k < rank(); ++k) {
    const Eigen::MatrixXcd y = component_matrix(k);
    rho.noalias() += weights_[static_cast<std::size_t>(k)] * y.transpose() * y.conjugate();
  }
  return rho;
}

}  // namespace qbell::fock
