#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>

namespace qdepol {

using Real = double;
using Complex = std::complex<double>;

using Vector3 = Eigen::Vector3d;
using Vector4 = Eigen::Vector4d;
using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;

// Dense complex matrix of runtime dimension 2 or 4, stack-allocated.
using ComplexMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;

// Absolute tolerances; all matrix entries handled here are O(1).
inline constexpr Real hermitian_tol = 1e-12;
inline constexpr Real trace_tol = 1e-12;
inline constexpr Real bloch_norm_tol = 1e-12;
inline constexpr Real eig_clip_floor = -1e-10;   // round-off: clip to zero
inline constexpr Real eig_error_floor = -1e-6;   // below this: genuinely invalid
inline constexpr Real cp_clip_floor = -1e-10;
inline constexpr Real cp_error_floor = -1e-6;

/// Pauli matrix sigma_i with sigma_0 = identity.
inline const Matrix2c& pauli(int i) {
  static const std::array<Matrix2c, 4> sigma = [] {
    std::array<Matrix2c, 4> s;
    const Complex I(0, 1);
    s[0] << 1, 0, 0, 1;
    s[1] << 0, 1, 1, 0;
    s[2] << 0, -I, I, 0;
    s[3] << 1, 0, 0, -1;
    return s;
  }();
  return sigma.at(static_cast<std::size_t>(i));
}

/// Per-axis contraction factors of the averaged channel at time t.
/// The map acts on a Bloch vector componentwise, a_i -> lam_i * a_i.
struct LambdaVector {
  Vector3 lam{1, 1, 1};
  Real t = 0;

  LambdaVector() = default;
  LambdaVector(Real lx, Real ly, Real lz, Real time) : lam(lx, ly, lz), t(time) {}
  LambdaVector(const Vector3& l, Real time) : lam(l), t(time) {}
};

}  // namespace qdepol
