#include "qdepol/fidelity.hpp"

#include <cmath>

#include "qdepol/channel.hpp"
#include "qdepol/errors.hpp"

namespace qdepol {

TwoQubitPureAmps::TwoQubitPureAmps(const Eigen::Vector4cd& a) : amps(a) {
  if (std::abs(amps.squaredNorm() - 1.0) > 1e-12) {
    throw InvalidStateError("two-qubit amplitudes must be normalized");
  }
}

MFamilyState::MFamilyState(Real value) : m(value) {
  if (m < 0 || m > 1) throw InvalidStateError("m must lie in [0, 1]");
}

DensityMatrix pure_density(const TwoQubitPureAmps& psi) {
  Matrix4c m = psi.amps * psi.amps.adjoint();
  return DensityMatrix::trusted(m);
}

DensityMatrix m_family_density(const MFamilyState& state) {
  Matrix4c m = Matrix4c::Zero();
  m(0, 0) = 0.5;
  m(3, 3) = 0.5;
  m(0, 3) = 0.5 * state.m;
  m(3, 0) = 0.5 * state.m;
  return DensityMatrix::trusted(m);
}

namespace {

void require_cp(const LambdaVector& lambda) {
  if (cp_check(lambda).quarter_sums.minCoeff() < cp_error_floor) {
    throw NotCompletelyPositiveError(
        "contraction vector is not completely positive");
  }
}

}  // namespace

Real single_qubit_fidelity(const BlochVector& a, const LambdaVector& lambda) {
  require_cp(lambda);
  const Vector3& v = a.vec();
  Real xi = 1.0;
  Real chi = 1.0;
  for (int i = 0; i < 3; ++i) {
    xi += v[i] * v[i] * lambda.lam[i];
    chi -= v[i] * v[i] * lambda.lam[i] * lambda.lam[i];
  }
  const Real purity_gap = 1.0 - v.squaredNorm();
  return 0.5 * (xi + std::sqrt(std::max(0.0, chi * purity_gap)));
}

Real two_qubit_pure_fidelity(const TwoQubitPureAmps& psi,
                             const LambdaVector& lambda) {
  require_cp(lambda);
  const Real lx = lambda.lam.x();
  if (std::abs(lambda.lam.y() - lx) > 1e-12 ||
      std::abs(lambda.lam.z() - lx) > 1e-12) {
    throw UnsupportedFormulaError(
        "pure-state closed form requires an isotropic contraction; "
        "use uhlmann_fidelity on the channel output instead");
  }
  const Complex cross =
      psi.amps[1] * psi.amps[2] - psi.amps[0] * psi.amps[3];
  const Real half_up = 0.5 * (1.0 + lx);
  const Real half_down = 0.5 * (1.0 - lx);
  return half_up * half_up - 4.0 * lx * half_down * std::norm(cross);
}

Real two_qubit_m_fidelity(const MFamilyState& state,
                          const LambdaVector& lambda) {
  require_cp(lambda);
  const Real m = state.m;
  const Real zz = lambda.lam.z() * lambda.lam.z();
  const Real transverse = lambda.lam.x() * lambda.lam.x() +
                          lambda.lam.y() * lambda.lam.y();
  const Real a = 1.0 + zz;
  const Real radicand = a * a - m * m * transverse * transverse;
  return 0.25 * (a + m * m * transverse +
                 std::sqrt(std::max(0.0, 1.0 - m * m)) *
                     std::sqrt(std::max(0.0, radicand)));
}

}  // namespace qdepol
