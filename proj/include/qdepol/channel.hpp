#pragma once

#include <functional>

#include "qdepol/linalg.hpp"
#include "qdepol/types.hpp"

namespace qdepol {

/// Operator-sum coefficients: K_i = k_i sigma_i with sum k_i^2 = 1.
struct KrausCoefficients {
  Vector4 k{1, 0, 0, 0};
};

struct CpReport {
  bool completely_positive = false;
  Vector4 quarter_sums = Vector4::Zero();  // 4 k_i^2 before clipping
};

/// Nonnegativity of the four radicands (1 +- lx +- ly +- lz) / 4 with an even
/// number of minus signs; this is the complete-positivity condition for the
/// Pauli-diagonal channel family.
CpReport cp_check(const LambdaVector& lambda) noexcept;

/// k_0 = sqrt(1+lx+ly+lz)/2 and cyclic sign patterns. Radicands in
/// [cp_clip_floor, 0) are treated as round-off and clipped; below
/// cp_error_floor raises NotCompletelyPositiveError.
KrausCoefficients kraus_from_lambda(const LambdaVector& lambda);

/// Channel action on a qubit: Bloch components contract as a_i -> lam_i a_i.
DensityMatrix apply_single(const LambdaVector& lambda, const DensityMatrix& rho);

/// Same channel through the operator-sum route sum_i k_i^2 sigma_i rho sigma_i.
/// Kept separate so the two algebraic routes can be compared directly.
DensityMatrix apply_single_kraus(const LambdaVector& lambda,
                                 const DensityMatrix& rho);

/// Independent per-qubit channels on a 4x4 state:
/// sum_{rs} (K_r (x) K_s) rho (K_r (x) K_s)^dagger.
DensityMatrix apply_two_qubit(const LambdaVector& lambda_a,
                              const LambdaVector& lambda_b,
                              const DensityMatrix& rho);

struct DivisibilityReport {
  bool divisible = false;
  Real residual = 0;
};

/// Semigroup test for a Pauli-diagonal map family: composition reduces to
/// lam_i(t) lam_i(s) vs lam_i(t+s); the report carries the max deviation.
DivisibilityReport divisibility_check(
    const std::function<Vector3(Real)>& lambda_of_t, Real t, Real s, Real tol);

}  // namespace qdepol
