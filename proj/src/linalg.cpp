#include "qdepol/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace qdepol {

BlochVector::BlochVector(const Vector3& a) : a_(a) {
  if (a_.norm() > 1.0 + bloch_norm_tol) {
    throw InvalidStateError("Bloch vector norm " + std::to_string(a_.norm()) +
                            " exceeds 1");
  }
}

bool is_hermitian(const ComplexMatrix& m, Real tol) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

DensityMatrix::DensityMatrix(ComplexMatrix m) {
  const auto n = m.rows();
  if ((n != 2 && n != 4) || m.cols() != n) {
    throw DimensionError("density matrix must be 2x2 or 4x4");
  }
  if (!is_hermitian(m)) {
    throw InvalidStateError("density matrix is not Hermitian");
  }
  const Complex tr = m.trace();
  if (std::abs(tr - Complex(1, 0)) > trace_tol) {
    throw InvalidStateError("density matrix trace differs from 1");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < eig_clip_floor) {
    throw InvalidStateError("density matrix has a negative eigenvalue");
  }
  m_ = std::move(m);
}

DensityMatrix DensityMatrix::trusted(ComplexMatrix m) {
  DensityMatrix rho;
  rho.m_ = std::move(m);
  return rho;
}

DensityMatrix bloch_to_density(const BlochVector& a) {
  const Vector3& v = a.vec();
  Matrix2c m = 0.5 * (pauli(0) + v.x() * pauli(1) + v.y() * pauli(2) +
                      v.z() * pauli(3));
  return DensityMatrix::trusted(m);
}

BlochVector density_to_bloch(const DensityMatrix& rho) {
  if (rho.dim() != 2) {
    throw DimensionError("Bloch extraction requires a 2x2 state");
  }
  Vector3 a;
  for (int i = 0; i < 3; ++i) {
    a[i] = (rho.matrix() * pauli(i + 1)).trace().real();
  }
  return BlochVector(a);
}

std::pair<Eigen::VectorXd, ComplexMatrix> hermitian_eig(
    const ComplexMatrix& m) {
  if (!is_hermitian(m)) {
    throw ContractError("hermitian_eig requires a Hermitian matrix");
  }
  // Symmetrize so round-off in the strictly-upper part cannot leak through.
  const ComplexMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  return {es.eigenvalues(), es.eigenvectors()};
}

ComplexMatrix psd_sqrt(const ComplexMatrix& m) {
  auto [vals, vecs] = hermitian_eig(m);
  if (vals.minCoeff() < eig_error_floor) {
    throw NotPsdError("matrix has eigenvalue " +
                      std::to_string(vals.minCoeff()) +
                      "; not positive semidefinite");
  }
  Eigen::VectorXd sq = vals.cwiseMax(0.0).cwiseSqrt();
  ComplexMatrix r = vecs * sq.asDiagonal() * vecs.adjoint();
  return 0.5 * (r + r.adjoint()).eval();
}

Real uhlmann_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw DimensionError("fidelity requires equal-dimension states");
  }
  const ComplexMatrix root = psd_sqrt(rho.matrix());
  ComplexMatrix inner = root * sigma.matrix() * root;
  inner = 0.5 * (inner + inner.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(inner, Eigen::EigenvaluesOnly);
  // Eigenvalues that are pure round-off must not leak through the square
  // root (sqrt(1e-16) would cost 1e-8 of accuracy on rank-deficient states).
  const Real floor = 1e-13 * std::max(1e-300, es.eigenvalues().maxCoeff());
  Real s = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()[i] > floor) s += std::sqrt(es.eigenvalues()[i]);
  }
  return s * s;
}

DensityMatrix tensor(const DensityMatrix& rho_a, const DensityMatrix& rho_b) {
  if (rho_a.dim() != 2 || rho_b.dim() != 2) {
    throw DimensionError("tensor expects two qubit states");
  }
  Matrix4c out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      out.block<2, 2>(2 * i, 2 * j) = rho_a(i, j) * rho_b.matrix();
    }
  }
  return DensityMatrix::trusted(out);
}

Matrix2c partial_trace_first(const Matrix4c& m) {
  Matrix2c out = Matrix2c::Zero();
  for (int k = 0; k < 2; ++k) {
    out += m.block<2, 2>(2 * k, 2 * k);
  }
  return out;
}

Matrix2c partial_trace_second(const Matrix4c& m) {
  Matrix2c out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      out(i, j) = m(2 * i, 2 * j) + m(2 * i + 1, 2 * j + 1);
    }
  }
  return out;
}

}  // namespace qdepol
