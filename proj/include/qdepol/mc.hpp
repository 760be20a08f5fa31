#pragma once

#include <cstdint>

#include "qdepol/linalg.hpp"
#include "qdepol/noise.hpp"
#include "qdepol/types.hpp"

namespace qdepol {

/// Closed-form description of one realization: the qubit Bloch vector turns
/// about the unit field direction by angle 2 r t.
struct RealizationRotation {
  Vector3 axis = Vector3::UnitZ();
  Real angle = 0;      // 2 r t
  Real magnitude = 0;  // |r|

  static RealizationRotation from_field(const Vector3& r, Real t);
};

/// Unitary for one realization: cos(rt) 1 + i sin(rt) (rhat . sigma).
Matrix2c rotation_unitary(const Vector3& r, Real t);

/// Exact single-realization evolution; r = 0 leaves the state untouched and
/// purity is conserved identically.
DensityMatrix evolve_fixed_r(const DensityMatrix& rho0, const Vector3& r, Real t);

struct McEstimate {
  ComplexMatrix mean;
  Eigen::MatrixXd stderr_re;  // standard error of each entry's real part
  Eigen::MatrixXd stderr_im;
  long samples = 0;
  std::uint64_t seed = 0;

  /// Combined per-entry standard error sqrt(se_re^2 + se_im^2).
  Eigen::MatrixXd std_error() const;
};

/// Average of evolve_fixed_r over `samples` draws of the field.
///
/// Samples are organized in fixed-size blocks; every block derives its
/// generator from (seed, block index) and is reduced by pairwise summation
/// in sample order, so the result is bit-identical for any thread count.
McEstimate mc_average(const NoiseModel& model, const DensityMatrix& rho0,
                      Real t, long samples, std::uint64_t seed,
                      int threads = 0);

/// Two-qubit variant with independent fields per qubit:
/// mean of (U_{r1} (x) U_{r2}) rho (.)^dagger.
McEstimate mc_average_two_qubit(const NoiseModel& model,
                                const DensityMatrix& rho0, Real t,
                                long samples, std::uint64_t seed,
                                int threads = 0);

}  // namespace qdepol
