#pragma once

#include <functional>

#include "qdepol/types.hpp"

namespace qdepol {

struct GaussRule {
  Eigen::ArrayXd x;
  Eigen::ArrayXd w;
};

/// Gauss-Legendre rule on [-1, 1]; cached per node count.
const GaussRule& gauss_legendre(int n);

/// Gauss-Hermite rule for weight exp(-x^2) on the full line; cached.
/// Nodes/weights from the Golub-Welsch tridiagonal eigenproblem.
const GaussRule& gauss_hermite(int n);

struct OscResult {
  Real value = 0;
  Real error_estimate = 0;
  bool converged = false;
  long blocks = 0;
};

/// integral_0^upper f(v) cos(freq v) dv.
///
/// `scale` is the smoothness scale of f near the origin; panels never exceed
/// 0.35 * max(scale, v), so integrands with a sharp peak at zero and slow
/// algebraic tails (Cauchy lines) are resolved at every magnitude.
/// For upper = infinity the tail is summed half-period by half-period; the
/// alternating block sums are contracted by iterated averaging, which
/// converges long before the raw envelope falls below tolerance.
OscResult cosine_transform(const std::function<Real(Real)>& f, Real freq,
                           Real scale, Real upper, Real tol);

}  // namespace qdepol
