#include "qdepol/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <vector>

#include "qdepol/errors.hpp"

namespace qdepol {

namespace {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights are
// mu0 * (first eigenvector component)^2.
GaussRule golub_welsch(int n, const std::function<Real(int)>& off_diag,
                       Real mu0) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const Real b = off_diag(k);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  GaussRule rule;
  rule.x = es.eigenvalues().array();
  rule.w = mu0 * es.eigenvectors().row(0).array().square();
  return rule;
}

const GaussRule& cached_rule(std::map<int, GaussRule>& cache, std::mutex& mu,
                             int n, const std::function<GaussRule(int)>& make) {
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, make(n)).first;
  }
  return it->second;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  static std::map<int, GaussRule> cache;
  static std::mutex mu;
  return cached_rule(cache, mu, n, [](int m) {
    return golub_welsch(
        m, [](int k) { return k / std::sqrt(4.0 * k * k - 1.0); }, 2.0);
  });
}

const GaussRule& gauss_hermite(int n) {
  static std::map<int, GaussRule> cache;
  static std::mutex mu;
  return cached_rule(cache, mu, n, [](int m) {
    return golub_welsch(
        m, [](int k) { return std::sqrt(0.5 * k); }, std::sqrt(M_PI));
  });
}

namespace {

Real gl16_panel(const std::function<Real(Real)>& f, Real freq, Real a, Real b) {
  const GaussRule& gl = gauss_legendre(16);
  const Real half = 0.5 * (b - a);
  const Real mid = 0.5 * (a + b);
  Real s = 0;
  for (int i = 0; i < gl.x.size(); ++i) {
    const Real v = mid + half * gl.x[i];
    s += gl.w[i] * f(v) * std::cos(freq * v);
  }
  return s * half;
}

// Integrate [a, b] with panels of width <= min(0.35 max(scale, v), period/8).
Real span(const std::function<Real(Real)>& f, Real freq, Real scale, Real a,
          Real b) {
  Real s = 0;
  Real v = a;
  const Real phase_cap =
      freq > 0 ? M_PI / (4.0 * freq) : std::numeric_limits<Real>::infinity();
  while (v < b) {
    Real w = std::min(0.35 * std::max(scale, v), phase_cap);
    w = std::min(w, b - v);
    s += gl16_panel(f, freq, v, v + w);
    v += w;
  }
  return s;
}

// Iterated averaging of the most recent partial sums. Equivalent to an Euler
// transform of the alternating block series.
Real accelerate(const std::vector<Real>& partials, int max_terms = 64) {
  const int n = std::min<int>(static_cast<int>(partials.size()), max_terms);
  std::vector<Real> buf(partials.end() - n, partials.end());
  while (buf.size() > 1) {
    for (std::size_t i = 0; i + 1 < buf.size(); ++i) {
      buf[i] = 0.5 * (buf[i] + buf[i + 1]);
    }
    buf.pop_back();
  }
  return buf.front();
}

}  // namespace

OscResult cosine_transform(const std::function<Real(Real)>& f, Real freq,
                           Real scale, Real upper, Real tol) {
  OscResult res;
  const bool infinite = !std::isfinite(upper);

  if (freq <= 0) {
    if (infinite) {
      throw ContractError(
          "cosine_transform needs a finite domain when freq = 0");
    }
    res.value = span(f, 0.0, scale, 0.0, upper);
    res.error_estimate = 0;
    res.converged = true;
    return res;
  }

  const long max_blocks = 4096;
  std::vector<Real> partials;
  partials.reserve(256);
  Real sum = 0;
  Real z_prev = 0;
  Real last_accel = std::numeric_limits<Real>::quiet_NaN();
  int stable_checks = 0;

  for (long k = 0; k < max_blocks; ++k) {
    const Real z = (static_cast<Real>(k) + 0.5) * M_PI / freq;
    if (!infinite && z >= upper) {
      sum += span(f, freq, scale, z_prev, upper);
      res.value = sum;
      res.error_estimate = 0;
      res.converged = true;
      res.blocks = k + 1;
      return res;
    }
    const Real block = span(f, freq, scale, z_prev, z);
    sum += block;
    z_prev = z;
    partials.push_back(sum);
    res.blocks = k + 1;

    if (!infinite) continue;

    if (k >= 3 && std::abs(block) < 0.05 * tol) {
      res.value = sum;
      res.error_estimate = std::abs(block);
      res.converged = true;
      return res;
    }
    if (k >= 23 && (k % 4) == 3) {
      const Real accel = accelerate(partials);
      if (std::isfinite(last_accel) &&
          std::abs(accel - last_accel) < 0.1 * tol) {
        if (++stable_checks >= 2) {
          res.value = accel;
          res.error_estimate = std::abs(accel - last_accel);
          res.converged = true;
          return res;
        }
      } else {
        stable_checks = 0;
      }
      last_accel = accel;
    }
  }

  res.value = std::isfinite(last_accel) ? last_accel : sum;
  res.error_estimate = std::isfinite(last_accel)
                           ? std::abs(accelerate(partials) - last_accel)
                           : std::abs(partials.back() - sum);
  res.converged = false;
  return res;
}

}  // namespace qdepol
