#include "qdepol/channel.hpp"

#include <cmath>
#include <string>

#include "qdepol/errors.hpp"

namespace qdepol {

CpReport cp_check(const LambdaVector& lambda) noexcept {
  const Real lx = lambda.lam.x();
  const Real ly = lambda.lam.y();
  const Real lz = lambda.lam.z();
  CpReport report;
  report.quarter_sums[0] = 0.25 * (1 + lx + ly + lz);
  report.quarter_sums[1] = 0.25 * (1 + lx - ly - lz);
  report.quarter_sums[2] = 0.25 * (1 - lx + ly - lz);
  report.quarter_sums[3] = 0.25 * (1 - lx - ly + lz);
  report.completely_positive = report.quarter_sums.minCoeff() >= cp_clip_floor;
  return report;
}

KrausCoefficients kraus_from_lambda(const LambdaVector& lambda) {
  const CpReport report = cp_check(lambda);
  const Real min_sum = report.quarter_sums.minCoeff();
  if (min_sum < cp_error_floor) {
    throw NotCompletelyPositiveError(
        "contraction vector is not completely positive (quarter sum " +
        std::to_string(min_sum) + ")");
  }
  KrausCoefficients kc;
  for (int i = 0; i < 4; ++i) {
    kc.k[i] = std::sqrt(std::max(0.0, report.quarter_sums[i]));
  }
  return kc;
}

DensityMatrix apply_single(const LambdaVector& lambda,
                           const DensityMatrix& rho) {
  if (rho.dim() != 2) throw DimensionError("apply_single expects a qubit state");
  const CpReport report = cp_check(lambda);
  if (report.quarter_sums.minCoeff() < cp_error_floor) {
    throw NotCompletelyPositiveError(
        "contraction vector is not completely positive");
  }
  const Vector3 a = density_to_bloch(rho).vec();
  const Vector3 contracted = lambda.lam.cwiseProduct(a);
  Matrix2c out = 0.5 * pauli(0);
  for (int i = 0; i < 3; ++i) out += 0.5 * contracted[i] * pauli(i + 1);
  return DensityMatrix::trusted(out);
}

DensityMatrix apply_single_kraus(const LambdaVector& lambda,
                                 const DensityMatrix& rho) {
  if (rho.dim() != 2) throw DimensionError("apply_single expects a qubit state");
  const KrausCoefficients kc = kraus_from_lambda(lambda);
  Matrix2c out = Matrix2c::Zero();
  for (int i = 0; i < 4; ++i) {
    out += kc.k[i] * kc.k[i] * (pauli(i) * rho.matrix() * pauli(i));
  }
  return DensityMatrix::trusted(out);
}

DensityMatrix apply_two_qubit(const LambdaVector& lambda_a,
                              const LambdaVector& lambda_b,
                              const DensityMatrix& rho) {
  if (rho.dim() != 4) {
    throw DimensionError("apply_two_qubit expects a 4x4 state");
  }
  const KrausCoefficients ka = kraus_from_lambda(lambda_a);
  const KrausCoefficients kb = kraus_from_lambda(lambda_b);
  Matrix4c out = Matrix4c::Zero();
  for (int r = 0; r < 4; ++r) {
    if (ka.k[r] == 0) continue;
    for (int s = 0; s < 4; ++s) {
      if (kb.k[s] == 0) continue;
      Matrix4c op;
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          op.block<2, 2>(2 * i, 2 * j) = pauli(r)(i, j) * pauli(s);
        }
      }
      const Real weight = ka.k[r] * ka.k[r] * kb.k[s] * kb.k[s];
      out += weight * (op * rho.matrix() * op.adjoint());
    }
  }
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityMatrix::trusted(out);
}

DivisibilityReport divisibility_check(
    const std::function<Vector3(Real)>& lambda_of_t, Real t, Real s, Real tol) {
  if (t < 0 || s < 0) throw ContractError("times must be nonnegative");
  const Vector3 at_t = lambda_of_t(t);
  const Vector3 at_s = lambda_of_t(s);
  const Vector3 at_sum = lambda_of_t(t + s);
  DivisibilityReport report;
  report.residual =
      (at_sum - at_t.cwiseProduct(at_s)).cwiseAbs().maxCoeff();
  report.divisible = report.residual <= tol;
  return report;
}

}  // namespace qdepol
