#include "qdepol/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "qdepol/errors.hpp"
#include "qdepol/quadrature.hpp"

namespace qdepol {

namespace {

constexpr Real oscillation_guard = 50.0;  // t * rate scale beyond which the
                                          // oscillating average is stationary

Real clamp_unit(Real x) {
  if (x > 1.0 && x < 1.0 + 1e-6) return 1.0;
  if (x < -1.0 && x > -1.0 - 1e-6) return -1.0;
  return x;
}

Vector3 clamp_unit(Vector3 v) {
  for (int i = 0; i < 3; ++i) v[i] = clamp_unit(v[i]);
  return v;
}

}  // namespace

NoiseModel NoiseModel::lorentzian(Real gamma) {
  if (!(gamma > 0)) throw ContractError("Lorentzian width must be positive");
  NoiseModel m;
  m.kind_ = Kind::Lorentzian3Axis;
  m.gamma_ = gamma;
  return m;
}

NoiseModel NoiseModel::telegraph(Axis axis, Real amplitude) {
  if (!(amplitude > 0)) {
    throw ContractError("telegraph amplitude must be positive");
  }
  NoiseModel m;
  m.kind_ = Kind::TelegraphAxis;
  m.axis_ = axis;
  m.amplitude_ = amplitude;
  return m;
}

NoiseModel NoiseModel::gaussian(const Vector3& widths) {
  if (!(widths.minCoeff() > 0)) {
    throw ContractError("Gaussian widths must be positive");
  }
  NoiseModel m;
  m.kind_ = Kind::GaussianAniso;
  m.widths_ = widths;
  return m;
}

NoiseModel NoiseModel::radial(std::function<Real(Real)> pdf, Real r_max) {
  if (!(r_max > 0)) throw ContractError("radial support cutoff must be positive");
  if (!pdf) throw ContractError("radial pdf must be callable");

  NoiseModel m;
  m.kind_ = Kind::RadialCustom;
  m.r_max_ = r_max;
  m.pdf_ = std::move(pdf);

  // Cumulative trapezoid on a dense grid, then 4096 equiprobable knots.
  const int grid = 8192;
  std::vector<Real> cdf(grid + 1, 0.0);
  std::vector<Real> rs(grid + 1);
  const Real h = r_max / grid;
  Real prev = m.pdf_(0.0);
  rs[0] = 0.0;
  for (int j = 1; j <= grid; ++j) {
    rs[j] = j * h;
    const Real cur = m.pdf_(rs[j]);
    cdf[j] = cdf[j - 1] + 0.5 * h * (prev + cur);
    prev = cur;
  }
  const Real total = cdf[grid];
  if (std::abs(total - 1.0) > 1e-6) {
    throw ContractError("radial pdf integrates to " + std::to_string(total) +
                        ", must be 1 within 1e-6");
  }

  const int knots = 4096;
  m.inverse_cdf_.resize(knots);
  int j = 0;
  for (int k = 0; k < knots; ++k) {
    const Real target = total * k / (knots - 1);
    while (j < grid && cdf[j + 1] < target) ++j;
    const Real lo = cdf[j];
    const Real hi = cdf[std::min(j + 1, grid)];
    const Real frac = hi > lo ? (target - lo) / (hi - lo) : 0.0;
    m.inverse_cdf_[k] = rs[j] + frac * h;
  }
  m.inverse_cdf_.back() = r_max;
  return m;
}

bool NoiseModel::isotropic() const {
  switch (kind_) {
    case Kind::RadialCustom:
      return true;
    case Kind::GaussianAniso:
      return widths_.x() == widths_.y() && widths_.y() == widths_.z();
    default:
      return false;
  }
}

bool NoiseModel::has_closed_form() const {
  switch (kind_) {
    case Kind::Lorentzian3Axis:
    case Kind::TelegraphAxis:
      return true;
    case Kind::GaussianAniso:
      return isotropic();
    case Kind::RadialCustom:
      return false;
  }
  return false;
}

Real NoiseModel::rate_scale() const {
  switch (kind_) {
    case Kind::Lorentzian3Axis:
      return gamma_;
    case Kind::TelegraphAxis:
      return amplitude_;
    case Kind::GaussianAniso:
      return widths_.maxCoeff();
    case Kind::RadialCustom:
      return r_max_;
  }
  return 0;
}

Real NoiseModel::radial_pdf(Real r) const {
  if (kind_ != Kind::RadialCustom) {
    throw ContractError("radial_pdf is defined for RadialCustom models only");
  }
  return pdf_(r);
}

Real NoiseModel::radial_inverse_cdf(Real u) const {
  if (kind_ != Kind::RadialCustom) {
    throw ContractError("inverse cdf is defined for RadialCustom models only");
  }
  u = std::clamp(u, 0.0, 1.0);
  const Real pos = u * (inverse_cdf_.size() - 1);
  const auto k = static_cast<std::size_t>(pos);
  if (k + 1 >= inverse_cdf_.size()) return inverse_cdf_.back();
  const Real frac = pos - static_cast<Real>(k);
  return (1 - frac) * inverse_cdf_[k] + frac * inverse_cdf_[k + 1];
}

LambdaVector lambda_analytic(const NoiseModel& model, Real t) {
  if (t < 0) throw ContractError("time must be nonnegative");
  if (t == 0) return LambdaVector(Vector3::Ones(), 0.0);

  switch (model.kind()) {
    case NoiseModel::Kind::Lorentzian3Axis: {
      const Real l = (1.0 + 2.0 * std::exp(-model.gamma() * t)) / 3.0;
      return LambdaVector(Vector3::Constant(l), t);
    }
    case NoiseModel::Kind::TelegraphAxis: {
      Vector3 l = Vector3::Constant(std::cos(2.0 * model.amplitude() * t));
      l[static_cast<int>(model.axis())] = 1.0;
      return LambdaVector(l, t);
    }
    case NoiseModel::Kind::GaussianAniso: {
      if (!model.isotropic()) {
        throw NoClosedFormError(
            "anisotropic Gaussian has no closed form; use quadrature");
      }
      const Real d = model.widths().x();
      const Real x = d * d * t * t;
      const Real l = 1.0 / 3.0 + (2.0 / 3.0) * (1.0 - 2.0 * x) * std::exp(-x);
      return LambdaVector(Vector3::Constant(clamp_unit(l)), t);
    }
    case NoiseModel::Kind::RadialCustom:
      throw NoClosedFormError("custom radial density has no closed form");
  }
  throw ContractError("unknown model kind");
}

namespace {

// --- Lorentzian: three Cauchy lines. The off-axis contribution is the
// Cauchy average of cos(2 u t); the on-axis direction is untouched.
Vector3 lorentzian_quadrature(Real gamma, Real t, Real tol, Real* achieved,
                              bool* ok) {
  const Real half_width = 0.5 * gamma;
  auto line = [half_width](Real u) {
    return (2.0 / M_PI) * half_width / (u * u + half_width * half_width);
  };
  const OscResult r = cosine_transform(
      line, 2.0 * t, half_width, std::numeric_limits<Real>::infinity(), tol);
  *achieved = r.error_estimate;
  *ok = r.converged;
  return Vector3::Constant(1.0 / 3.0 + (2.0 / 3.0) * r.value);
}

// --- Isotropic Gaussian: radial reduction. The radial cosine average
//   (4/sqrt(pi)) int_0^inf s^2 e^{-s^2} cos(2 d t s) ds
// is evaluated by escalating Gauss-Hermite rules.
Vector3 gaussian_isotropic_quadrature(Real d, Real t, Real tol, Real* achieved,
                                      bool* ok) {
  auto level = [&](int n) {
    const GaussRule& gh = gauss_hermite(n);
    const Real b = 2.0 * d * t;
    Real s = 0;
    for (int i = 0; i < gh.x.size(); ++i) {
      s += gh.w[i] * gh.x[i] * gh.x[i] * std::cos(b * gh.x[i]);
    }
    return 2.0 / std::sqrt(M_PI) * s;
  };
  constexpr int levels[] = {32, 64, 128, 192, 256};
  Real prev = level(levels[0]);
  Real diff = std::numeric_limits<Real>::infinity();
  for (std::size_t k = 1; k < std::size(levels); ++k) {
    const Real cur = level(levels[k]);
    diff = (2.0 / 3.0) * std::abs(cur - prev);
    if (diff < 0.5 * tol) {
      *achieved = diff;
      *ok = true;
      return Vector3::Constant(1.0 / 3.0 + (2.0 / 3.0) * cur);
    }
    prev = cur;
  }
  *achieved = diff;
  *ok = false;
  return Vector3::Constant(1.0 / 3.0 + (2.0 / 3.0) * prev);
}

// --- Anisotropic Gaussian: spherical reduction. For a fixed direction n the
// radial integral has the closed form
//   int_0^inf r^2 e^{-Q r^2} cos(2 r t) dr
//     = (sqrt(pi) / (4 Q^{3/2})) (1 - 2 t^2 / Q) e^{-t^2 / Q},
// with Q(n) = sum_i n_i^2 / d_i^2, so only a smooth non-oscillatory angular
// integral is left. It is evaluated on one octant with escalating product
// Gauss-Legendre rules and self-normalized by the identical quadrature of
// the angular weight, which makes t = 0 exact at every level.
Vector3 gaussian_sphere(const Vector3& d, Real t, Real tol, bool moments_only,
                        Real* achieved, bool* ok) {
  const Real dmin = d.minCoeff();
  const bool skip_cosine = moments_only || t * t * dmin * dmin > 45.0;

  auto level = [&](int n) {
    const GaussRule& gl = gauss_legendre(n);
    Vector3 num = Vector3::Zero();
    Real norm = 0;
    for (int ic = 0; ic < n; ++ic) {
      const Real c = 0.5 * (gl.x[ic] + 1.0);  // cos(theta) on [0, 1]
      const Real wc = 0.5 * gl.w[ic];
      const Real s = std::sqrt(std::max(0.0, 1.0 - c * c));
      for (int ip = 0; ip < n; ++ip) {
        const Real phi = 0.25 * M_PI * (gl.x[ip] + 1.0);
        const Real wp = 0.25 * M_PI * gl.w[ip];
        const Vector3 dir(s * std::cos(phi), s * std::sin(phi), c);
        const Real q = dir.cwiseQuotient(d).squaredNorm();
        const Real weight = wc * wp / (q * std::sqrt(q));
        Real g = 0;
        if (!skip_cosine) {
          const Real x = t * t / q;
          g = (1.0 - 2.0 * x) * std::exp(-x);
        }
        norm += weight;
        for (int i = 0; i < 3; ++i) {
          const Real n2 = dir[i] * dir[i];
          num[i] += weight * (n2 + (1.0 - n2) * g);
        }
      }
    }
    return Vector3(num / norm);
  };

  constexpr int levels[] = {12, 16, 24, 32, 48, 64};
  Vector3 prev = level(levels[0]);
  Real diff = std::numeric_limits<Real>::infinity();
  for (std::size_t k = 1; k < std::size(levels); ++k) {
    const Vector3 cur = level(levels[k]);
    diff = (cur - prev).cwiseAbs().maxCoeff();
    if (diff < 0.5 * tol) {
      *achieved = diff;
      *ok = true;
      return cur;
    }
    prev = cur;
  }
  *achieved = diff;
  *ok = false;
  return prev;
}

// --- Custom radial density: finite-domain cosine transform.
Vector3 radial_quadrature(const NoiseModel& model, Real t, Real tol,
                          Real* achieved, bool* ok) {
  auto f = [&model](Real r) { return model.radial_pdf(r); };
  const OscResult r = cosine_transform(f, 2.0 * t, model.r_max() / 32.0,
                                       model.r_max(), tol);
  *achieved = r.error_estimate;
  *ok = r.converged;
  return Vector3::Constant(1.0 / 3.0 + (2.0 / 3.0) * r.value);
}

}  // namespace

LambdaResult lambda_quadrature_ex(const NoiseModel& model, Real t, Real tol) {
  if (t < 0) throw ContractError("time must be nonnegative");
  if (!(tol > 0)) throw ContractError("tolerance must be positive");
  if (t == 0) {
    return {LambdaVector(Vector3::Ones(), 0.0), LambdaMethod::Quadrature, 0};
  }

  // The two-point telegraph measure evaluates exactly; no oscillation issue.
  if (model.kind() == NoiseModel::Kind::TelegraphAxis) {
    Vector3 l = Vector3::Constant(std::cos(2.0 * model.amplitude() * t));
    l[static_cast<int>(model.axis())] = 1.0;
    return {LambdaVector(l, t), LambdaMethod::Quadrature, 0};
  }

  // Deep in the oscillatory regime the squared trigonometric average has
  // settled to 1/2 far below any practical tolerance; report the stationary
  // value instead of chasing cancellation.
  if (t * model.rate_scale() > oscillation_guard) {
    LambdaVector inf = asymptotic_lambda(model);
    return {LambdaVector(inf.lam, t), LambdaMethod::Asymptotic, 0};
  }

  Real achieved = 0;
  bool ok = false;
  Vector3 lam;
  switch (model.kind()) {
    case NoiseModel::Kind::Lorentzian3Axis:
      lam = lorentzian_quadrature(model.gamma(), t, tol, &achieved, &ok);
      break;
    case NoiseModel::Kind::GaussianAniso:
      lam = model.isotropic()
                ? gaussian_isotropic_quadrature(model.widths().x(), t, tol,
                                                &achieved, &ok)
                : gaussian_sphere(model.widths(), t, tol, false, &achieved, &ok);
      break;
    case NoiseModel::Kind::RadialCustom:
      lam = radial_quadrature(model, t, tol, &achieved, &ok);
      break;
    default:
      throw ContractError("unknown model kind");
  }
  if (!ok) {
    throw ConvergenceError("contraction quadrature did not converge", achieved);
  }
  return {LambdaVector(clamp_unit(lam), t), LambdaMethod::Quadrature, achieved};
}

LambdaVector lambda_quadrature(const NoiseModel& model, Real t, Real tol) {
  return lambda_quadrature_ex(model, t, tol).value;
}

LambdaVector asymptotic_lambda(const NoiseModel& model) {
  switch (model.kind()) {
    case NoiseModel::Kind::Lorentzian3Axis:
    case NoiseModel::Kind::RadialCustom:
      return LambdaVector(Vector3::Constant(1.0 / 3.0),
                          std::numeric_limits<Real>::infinity());
    case NoiseModel::Kind::TelegraphAxis: {
      Vector3 l = Vector3::Zero();
      l[static_cast<int>(model.axis())] = 1.0;
      return LambdaVector(l, std::numeric_limits<Real>::infinity());
    }
    case NoiseModel::Kind::GaussianAniso: {
      if (model.isotropic()) {
        return LambdaVector(Vector3::Constant(1.0 / 3.0),
                            std::numeric_limits<Real>::infinity());
      }
      Real achieved = 0;
      bool ok = false;
      const Vector3 m =
          gaussian_sphere(model.widths(), 0.0, 1e-10, true, &achieved, &ok);
      if (!ok) {
        throw ConvergenceError("angular moment quadrature did not converge",
                               achieved);
      }
      return LambdaVector(m, std::numeric_limits<Real>::infinity());
    }
  }
  throw ContractError("unknown model kind");
}

LambdaResult eval_lambda(const NoiseModel& model, Real t, Real tol) {
  if (t == 0) return {LambdaVector(Vector3::Ones(), 0.0), LambdaMethod::Analytic, 0};
  if (model.has_closed_form()) {
    return {lambda_analytic(model, t), LambdaMethod::Analytic, 0};
  }
  return lambda_quadrature_ex(model, t, tol);
}

Vector3 sample_r(const NoiseModel& model, Rng& rng) {
  switch (model.kind()) {
    case NoiseModel::Kind::Lorentzian3Axis: {
      const int axis = std::min(2, static_cast<int>(3.0 * rng.uniform01()));
      Vector3 r = Vector3::Zero();
      r[axis] = rng.cauchy(0.5 * model.gamma());
      return r;
    }
    case NoiseModel::Kind::TelegraphAxis: {
      Vector3 r = Vector3::Zero();
      r[static_cast<int>(model.axis())] =
          rng.uniform01() <= 0.5 ? model.amplitude() : -model.amplitude();
      return r;
    }
    case NoiseModel::Kind::GaussianAniso: {
      // per-axis pdf ~ exp(-x^2/d^2): standard deviation d/sqrt(2)
      const Real inv_sqrt2 = 1.0 / std::sqrt(2.0);
      Vector3 r;
      for (int i = 0; i < 3; ++i) {
        r[i] = model.widths()[i] * inv_sqrt2 * rng.normal();
      }
      return r;
    }
    case NoiseModel::Kind::RadialCustom: {
      const Real radius = model.radial_inverse_cdf(rng.uniform01());
      const Real z = 2.0 * rng.uniform01() - 1.0;
      const Real phi = 2.0 * M_PI * rng.uniform01();
      const Real s = std::sqrt(std::max(0.0, 1.0 - z * z));
      return radius * Vector3(s * std::cos(phi), s * std::sin(phi), z);
    }
  }
  throw ContractError("unknown model kind");
}

}  // namespace qdepol
