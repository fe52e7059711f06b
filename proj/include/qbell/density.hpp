#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qbell/types.hpp"

namespace qbell::fock {

/// Truncation of the single-mode number basis; dimension is n_max + 1.
class FockCutoff {
 public:
  explicit FockCutoff(int n_max) : n_max_(n_max) {
    if (n_max < 1) throw std::domain_error("FockCutoff: n_max must be >= 1");
  }
  int n_max() const noexcept { return n_max_; }
  int dim() const noexcept { return n_max_ + 1; }

 private:
  int n_max_;
};

/// Photon number probabilities P(0), P(1), ...
struct PhotonNumberDistribution {
  std::vector<double> probs;

  double sum() const {
    double s = 0.0;
    for (double p : probs) s += p;
    return s;
  }
  void validate() const {
    for (double p : probs) {
      if (!(p >= 0.0) || !std::isfinite(p))
        throw std::domain_error("PhotonNumberDistribution: entries must be >= 0");
    }
    if (sum() > 1.0 + 1e-12)
      throw std::domain_error("PhotonNumberDistribution: total probability exceeds 1");
  }
};

/// Truncated two-mode density matrix, stored as a convex mixture of pure
/// state vectors (mode-A-major flattening |n_A, n_B> -> n_A * dim_b + n_B).
/// The factored form keeps memory at rank * dim_a * dim_b instead of
/// (dim_a * dim_b)^2 and is Hermitian and positive by construction.
class FockDensityMatrix {
 public:
  static FockDensityMatrix pure(int dim_a, int dim_b, Eigen::VectorXcd psi,
                                double tail_weight = 0.0);
  static FockDensityMatrix mixture(int dim_a, int dim_b, std::vector<double> weights,
                                   std::vector<Eigen::VectorXcd> vectors,
                                   double tail_weight = 0.0);
  /// Validates the density-matrix invariants (Hermitian to 1e-12, PSD to -1e-10 on the
  /// smallest eigenvalue) and eigendecomposes. Intended for small dimensions.
  static FockDensityMatrix from_dense(int dim_a, int dim_b, const Eigen::MatrixXcd& rho);

  int dim_a() const noexcept { return dim_a_; }
  int dim_b() const noexcept { return dim_b_; }
  int rank() const noexcept { return static_cast<int>(weights_.size()); }
  double tail_weight() const noexcept { return tail_weight_; }

  double trace() const;
  std::complex<double> entry(Eigen::Index i, Eigen::Index j) const;
  Eigen::MatrixXcd dense() const;

  /// Partial traces (dense single-mode density matrices).
  Eigen::MatrixXcd reduced_a() const;
  Eigen::MatrixXcd reduced_b() const;

  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<Eigen::VectorXcd>& vectors() const noexcept { return vectors_; }

  /// Component k reshaped to a dim_a x dim_b amplitude matrix Y(n_A, n_B).
  Eigen::MatrixXcd component_matrix(int k) const;

 private:
  FockDensityMatrix(int dim_a, int dim_b, std::vector<double> w,
                    std::vector<Eigen::VectorXcd> v, double tail);

  int dim_a_ = 0;
  int dim_b_ = 0;
  std::vector<double> weights_;
  std::vector<Eigen::VectorXcd> vectors_;
  double tail_weight_ = 0.0;
};

}  // namespace qbell::fock
