#pragma once

#include "qdepol/linalg.hpp"
#include "qdepol/types.hpp"

namespace qdepol {

/// Two-qubit pure state a|00> + b|01> + c|10> + d|11>, normalized.
struct TwoQubitPureAmps {
  Eigen::Vector4cd amps;

  explicit TwoQubitPureAmps(const Eigen::Vector4cd& a);
  TwoQubitPureAmps(Complex a, Complex b, Complex c, Complex d)
      : TwoQubitPureAmps(Eigen::Vector4cd(a, b, c, d)) {}
};

/// Rank-2 family: equal mixture of |00> and |11> plus coherence m between
/// them, m in [0, 1] (m = 1 is the Bell state, m = 0 the incoherent mixture).
struct MFamilyState {
  Real m = 0;

  explicit MFamilyState(Real value);
};

DensityMatrix pure_density(const TwoQubitPureAmps& psi);
DensityMatrix m_family_density(const MFamilyState& state);

/// Closed form for a qubit input with Bloch vector a:
///   F = (xi + sqrt(chi (1 - a^2))) / 2,
///   xi = 1 + sum a_i^2 lam_i,  chi = 1 - sum a_i^2 lam_i^2.
Real single_qubit_fidelity(const BlochVector& a, const LambdaVector& lambda);

/// Closed form for a pure two-qubit input under an isotropic channel
/// (lam_x = lam_y = lam_z = L):
///   F = ((1+L)/2)^2 - 4 L ((1-L)/2) |bc - ad|^2.
/// Anisotropic input raises UnsupportedFormulaError; use uhlmann_fidelity.
Real two_qubit_pure_fidelity(const TwoQubitPureAmps& psi,
                             const LambdaVector& lambda);

/// Closed form for the m family (any contraction vector):
///   F = [1 + lz^2 + m^2 (lx^2 + ly^2)
///        + sqrt(1 - m^2) sqrt((1 + lz^2)^2 - m^2 (lx^2 + ly^2)^2)] / 4.
Real two_qubit_m_fidelity(const MFamilyState& state, const LambdaVector& lambda);

}  // namespace qdepol
