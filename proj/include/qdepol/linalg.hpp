#pragma once

#include <utility>

#include "qdepol/errors.hpp"
#include "qdepol/types.hpp"

namespace qdepol {

/// Qubit state parameterization: rho = (1 + a . sigma) / 2 with |a| <= 1.
class BlochVector {
 public:
  BlochVector() : a_(Vector3::Zero()) {}
  explicit BlochVector(const Vector3& a);
  BlochVector(Real x, Real y, Real z) : BlochVector(Vector3(x, y, z)) {}

  const Vector3& vec() const { return a_; }
  Real norm() const { return a_.norm(); }

 private:
  Vector3 a_;
};

/// Hermitian, unit-trace, positive-semidefinite matrix of dimension 2 or 4.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m);

  /// Skips validation. For hot paths constructing states that are valid by
  /// construction (e.g. Bloch reconstruction, unitary conjugation).
  static DensityMatrix trusted(ComplexMatrix m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }
  Complex operator()(int i, int j) const { return m_(i, j); }

 private:
  DensityMatrix() = default;
  ComplexMatrix m_;
};

bool is_hermitian(const ComplexMatrix& m, Real tol = hermitian_tol);

DensityMatrix bloch_to_density(const BlochVector& a);
BlochVector density_to_bloch(const DensityMatrix& rho);

/// Eigendecomposition of a Hermitian matrix. Eigenvalues ascending,
/// eigenvectors as columns of a unitary matrix.
std::pair<Eigen::VectorXd, ComplexMatrix> hermitian_eig(const ComplexMatrix& m);

/// Hermitian PSD square root. Eigenvalues in [eig_error_floor, 0) are
/// clipped to zero; anything lower raises NotPsdError.
ComplexMatrix psd_sqrt(const ComplexMatrix& m);

/// F(rho, sigma) = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, in [0, 1].
Real uhlmann_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Kronecker product of two qubit states.
DensityMatrix tensor(const DensityMatrix& rho_a, const DensityMatrix& rho_b);

Matrix2c partial_trace_first(const Matrix4c& m);
Matrix2c partial_trace_second(const Matrix4c& m);

}  // namespace qdepol
