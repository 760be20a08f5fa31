#pragma once

#include <functional>
#include <vector>

#include "qdepol/rng.hpp"
#include "qdepol/types.hpp"

namespace qdepol {

enum class Axis { X = 0, Y = 1, Z = 2 };

/// Immutable description of the random-field distribution p(r).
///
/// Built-in families:
///   Lorentzian3Axis  three Cauchy lines of half-width gamma/2, one per axis,
///                    each carrying probability 1/3
///   TelegraphAxis    two-point law (+-amplitude) on a single axis
///   GaussianAniso    independent centered normals, per-axis pdf
///                    proportional to exp(-x_i^2 / d_i^2)
///   RadialCustom     spherically symmetric with user radial density on
///                    [0, r_max]; sampled via a tabulated inverse CDF
class NoiseModel {
 public:
  enum class Kind { Lorentzian3Axis, TelegraphAxis, GaussianAniso, RadialCustom };

  static NoiseModel lorentzian(Real gamma);
  static NoiseModel telegraph(Axis axis, Real amplitude);
  static NoiseModel gaussian(const Vector3& widths);
  static NoiseModel radial(std::function<Real(Real)> pdf, Real r_max);

  Kind kind() const { return kind_; }
  Real gamma() const { return gamma_; }
  Real amplitude() const { return amplitude_; }
  Axis axis() const { return axis_; }
  const Vector3& widths() const { return widths_; }
  Real r_max() const { return r_max_; }

  /// p(r) is spherically symmetric.
  bool isotropic() const;

  /// lambda_analytic covers this model.
  bool has_closed_form() const;

  /// Largest rate parameter; t * rate_scale() sets the oscillation regime.
  Real rate_scale() const;

  Real radial_pdf(Real r) const;
  Real radial_inverse_cdf(Real u) const;

 private:
  NoiseModel() = default;

  Kind kind_ = Kind::Lorentzian3Axis;
  Real gamma_ = 0;
  Real amplitude_ = 0;
  Axis axis_ = Axis::X;
  Vector3 widths_ = Vector3::Zero();
  Real r_max_ = 0;
  std::function<Real(Real)> pdf_;
  std::vector<Real> inverse_cdf_;  // RadialCustom, 4096 equiprobable knots
};

enum class LambdaMethod { Analytic, Quadrature, Asymptotic };

struct LambdaResult {
  LambdaVector value;
  LambdaMethod method = LambdaMethod::Analytic;
  Real error_estimate = 0;
};

/// Closed-form contraction factors. Throws NoClosedFormError for models
/// without one (anisotropic Gaussian, custom radial density).
LambdaVector lambda_analytic(const NoiseModel& model, Real t);

/// Numerical evaluation of the contraction integral
///   lambda_i(t) = <r_i^2/r^2 + (1 - r_i^2/r^2) cos(2 r t)>_p
/// (the sin^2 form folded through sin^2 = (1 - cos)/2, so the oscillatory
/// part is a damped cosine transform). Throws ConvergenceError if the node
/// budget is exhausted.
LambdaVector lambda_quadrature(const NoiseModel& model, Real t, Real tol);

/// Same, with the evaluation path and error estimate reported.
LambdaResult lambda_quadrature_ex(const NoiseModel& model, Real t, Real tol);

/// t -> infinity limit: the angular second moments <r_i^2/r^2>.
LambdaVector asymptotic_lambda(const NoiseModel& model);

/// Preferred evaluation: analytic when available, else quadrature; beyond
/// t * rate_scale() > 50 the oscillating average is replaced by its
/// stationary value and tagged Asymptotic.
LambdaResult eval_lambda(const NoiseModel& model, Real t, Real tol);

/// One sample of the random field r, distributed per p(r).
Vector3 sample_r(const NoiseModel& model, Rng& rng);

}  // namespace qdepol
