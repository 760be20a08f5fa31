#include <cmath>

#include "doctest.h"
#include "qdepol/channel.hpp"
#include "qdepol/errors.hpp"
#include "qdepol/noise.hpp"
#include "test_util.hpp"

using namespace qdepol;
using namespace qdepol::testutil;

TEST_CASE("kraus_from_lambda reference values") {
  const KrausCoefficients identity = kraus_from_lambda(LambdaVector(1, 1, 1, 0));
  CHECK((identity.k - Vector4(1, 0, 0, 0)).norm() < 1e-15);

  // isotropic steady state: k0 = 1/sqrt(2), k1 = k2 = k3 = 1/sqrt(6)
  const KrausCoefficients steady =
      kraus_from_lambda(LambdaVector(1.0 / 3, 1.0 / 3, 1.0 / 3, 1.0));
  CHECK(steady.k[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  for (int i = 1; i < 4; ++i) {
    CHECK(steady.k[i] == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-14));
  }

  // single-axis pattern: (|cos at|, |sin at|, 0, 0)
  const Real a = 0.9, t = 1.3;
  const Real c = std::cos(2 * a * t);
  const KrausCoefficients tel = kraus_from_lambda(LambdaVector(1, c, c, t));
  CHECK(tel.k[0] == doctest::Approx(std::abs(std::cos(a * t))).epsilon(1e-12));
  CHECK(tel.k[1] == doctest::Approx(std::abs(std::sin(a * t))).epsilon(1e-12));
  CHECK(tel.k[2] == 0.0);
  CHECK(tel.k[3] == 0.0);
}

TEST_CASE("kraus coefficients are normalized for every CP input") {
  Rng rng(31);
  for (int i = 0; i < 500; ++i) {
    // random CP-valid contraction: mix of quarter-sum weights
    Vector4 q;
    Real total = 0;
    for (int k = 0; k < 4; ++k) {
      q[k] = rng.uniform01();
      total += q[k];
    }
    q /= total;
    const Real lx = q[0] + q[1] - q[2] - q[3];
    const Real ly = q[0] - q[1] + q[2] - q[3];
    const Real lz = q[0] - q[1] - q[2] + q[3];
    const KrausCoefficients kc = kraus_from_lambda(LambdaVector(lx, ly, lz, 1));
    CHECK(std::abs(kc.k.squaredNorm() - 1.0) < 1e-10);
    CHECK(kc.k.minCoeff() >= 0.0);
  }
}

TEST_CASE("cp_check sign bookkeeping") {
  CHECK(cp_check(LambdaVector(1, 1, 1, 0)).completely_positive);
  const CpReport bad = cp_check(LambdaVector(1, 1, -1, 0));
  CHECK_FALSE(bad.completely_positive);
  CHECK(bad.quarter_sums.minCoeff() == doctest::Approx(-0.5));
  CHECK_THROWS_AS(kraus_from_lambda(LambdaVector(1, 1, -1, 0)),
                  NotCompletelyPositiveError);
}

TEST_CASE("cp_check clips round-off radicands") {
  // smallest quarter sum (1 - lx - ly + lz)/4 = -2.5e-11: inside the clip band
  const Real eps = 1e-10;
  const KrausCoefficients kc = kraus_from_lambda(LambdaVector(1, 1, 1 - eps, 0));
  CHECK(kc.k[3] == 0.0);
  CHECK(std::abs(kc.k.squaredNorm() - 1.0) < 1e-10);
}

TEST_CASE("quadrature-produced contractions are always CP") {
  std::vector<NoiseModel> models = {
      NoiseModel::lorentzian(1.0), NoiseModel::telegraph(Axis::X, 1.0),
      NoiseModel::gaussian(Vector3(1, 1, 1)),
      NoiseModel::gaussian(Vector3(1, 2, 3))};
  for (const auto& m : models) {
    for (int k = 0; k <= 100; ++k) {
      const Real t = 0.08 * k;
      const LambdaResult res = eval_lambda(m, t, 1e-9);
      CHECK(cp_check(res.value).completely_positive);
    }
  }
}

TEST_CASE("apply routes propagate the CP error") {
  Rng rng(211);
  const DensityMatrix rho = random_qubit_state(rng);
  const LambdaVector bad(1, 1, -1, 0);
  CHECK_THROWS_AS(apply_single(bad, rho), NotCompletelyPositiveError);
  CHECK_THROWS_AS(apply_single_kraus(bad, rho), NotCompletelyPositiveError);
  const DensityMatrix rho4 = tensor(rho, rho);
  CHECK_THROWS_AS(apply_two_qubit(bad, bad, rho4),
                  NotCompletelyPositiveError);
}

TEST_CASE("apply_single reference actions") {
  Rng rng(37);
  const DensityMatrix rho = random_qubit_state(rng);
  const DensityMatrix same = apply_single(LambdaVector(1, 1, 1, 0), rho);
  CHECK((same.matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-15);

  const DensityMatrix mixed = bloch_to_density(BlochVector(0, 0, 0));
  const DensityMatrix still =
      apply_single(LambdaVector(0.2, 0.1, 0.3, 1), mixed);
  CHECK((still.matrix() - mixed.matrix()).cwiseAbs().maxCoeff() < 1e-15);

  // isotropic 1/3 contraction of |0><0|: diag(2/3, 1/3)
  const DensityMatrix z_up = bloch_to_density(BlochVector(0, 0, 1));
  const DensityMatrix out =
      apply_single(LambdaVector(1.0 / 3, 1.0 / 3, 1.0 / 3, 1), z_up);
  CHECK(out(0, 0).real() == doctest::Approx(2.0 / 3).epsilon(1e-14));
  CHECK(out(1, 1).real() == doctest::Approx(1.0 / 3).epsilon(1e-14));
}

TEST_CASE("bloch route and operator-sum route agree") {
  Rng rng(41);
  for (int i = 0; i < 1000; ++i) {
    const DensityMatrix rho = random_qubit_state(rng);
    // random CP contraction via quarter-sum weights
    Vector4 q;
    Real total = 0;
    for (int k = 0; k < 4; ++k) {
      q[k] = rng.uniform01();
      total += q[k];
    }
    q /= total;
    const LambdaVector lambda(q[0] + q[1] - q[2] - q[3],
                              q[0] - q[1] + q[2] - q[3],
                              q[0] - q[1] - q[2] + q[3], 1.0);
    const DensityMatrix via_bloch = apply_single(lambda, rho);
    const DensityMatrix via_kraus = apply_single_kraus(lambda, rho);
    CHECK((via_bloch.matrix() - via_kraus.matrix()).cwiseAbs().maxCoeff() <
          1e-12);
    CHECK(std::abs(via_bloch.matrix().trace().real() - 1.0) < 1e-12);
    // positivity: 2x2 eigenvalues are (1 +- |a|)/2
    CHECK(density_to_bloch(via_bloch).vec().norm() <= 1.0 + 1e-12);
  }
}

TEST_CASE("contraction never grows a bloch component") {
  std::vector<NoiseModel> models = {
      NoiseModel::lorentzian(1.0), NoiseModel::telegraph(Axis::Z, 0.8),
      NoiseModel::gaussian(Vector3(1, 2, 3))};
  for (const auto& m : models) {
    for (int k = 1; k <= 60; ++k) {
      const Vector3 lam = eval_lambda(m, 0.1 * k, 1e-9).value.lam;
      for (int i = 0; i < 3; ++i) CHECK(std::abs(lam[i]) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("apply_two_qubit identity and factorization") {
  Rng rng(43);
  const LambdaVector identity(1, 1, 1, 0);
  const DensityMatrix rho = random_two_qubit_state(rng);
  CHECK((apply_two_qubit(identity, identity, rho).matrix() - rho.matrix())
            .cwiseAbs()
            .maxCoeff() < 1e-14);

  for (int i = 0; i < 200; ++i) {
    const DensityMatrix a = random_qubit_state(rng);
    const DensityMatrix b = random_qubit_state(rng);
    const LambdaVector la(0.7, 0.4, 0.3, 1.0);
    const LambdaVector lb(0.3, 0.3, 0.3, 1.0);
    const DensityMatrix joint = apply_two_qubit(la, lb, tensor(a, b));
    const DensityMatrix split = tensor(apply_single(la, a), apply_single(lb, b));
    CHECK((joint.matrix() - split.matrix()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(joint.matrix().trace().real() - 1.0) < 1e-12);
  }
}

TEST_CASE("entangled input loses more fidelity than a product input") {
  const Real lam = 1.0 / 3;
  const LambdaVector iso(lam, lam, lam, 1.0);

  Eigen::Vector4cd bell;
  bell << 1 / std::sqrt(2.0), 0, 0, 1 / std::sqrt(2.0);
  const DensityMatrix rho_bell = DensityMatrix::trusted(bell * bell.adjoint());
  const Real f_bell = (bell.adjoint() *
                       apply_two_qubit(iso, iso, rho_bell).matrix() * bell)(0)
                          .real();

  Eigen::Vector4cd prod;
  prod << 1, 0, 0, 0;
  const DensityMatrix rho_prod = DensityMatrix::trusted(prod * prod.adjoint());
  const Real f_prod = (prod.adjoint() *
                       apply_two_qubit(iso, iso, rho_prod).matrix() * prod)(0)
                          .real();
  CHECK(f_bell < f_prod);
}

TEST_CASE("divisibility: exponential family composes as a semigroup") {
  auto exp_lambda = [](Real t) {
    return Vector3(std::exp(-0.3 * t), std::exp(-0.7 * t), std::exp(-1.1 * t));
  };
  const DivisibilityReport r = divisibility_check(exp_lambda, 0.8, 1.7, 1e-12);
  CHECK(r.divisible);
  CHECK(r.residual < 1e-12);
}

TEST_CASE("divisibility: telegraph breaks the composition law") {
  const Real a = 1.0;
  auto tel = [a](Real t) {
    return Vector3(1.0, std::cos(2 * a * t), std::cos(2 * a * t));
  };
  const DivisibilityReport r = divisibility_check(tel, 0.5, 0.5, 1e-9);
  CHECK_FALSE(r.divisible);
  CHECK(r.residual > 0.1);
}

TEST_CASE("divisibility: lorentzian residual is reported as computed") {
  const Real gamma = 1.0;
  auto lor = [gamma](Real t) {
    return Vector3::Constant((1 + 2 * std::exp(-gamma * t)) / 3.0).eval();
  };
  const DivisibilityReport r = divisibility_check(lor, 0.5, 0.5, 1e-9);
  // exact composition defect of (1 + 2 e^{-t})/3 at t = s = 0.5
  const Real expected = std::abs((1 + 2 * std::exp(-1.0)) / 3.0 -
                                 std::pow((1 + 2 * std::exp(-0.5)) / 3.0, 2));
  CHECK(r.residual == doctest::Approx(expected).epsilon(1e-12));
  CHECK_FALSE(r.divisible);
}

TEST_CASE("unitality: the maximally mixed state is a fixed point") {
  Rng rng(47);
  const DensityMatrix mixed = bloch_to_density(BlochVector(0, 0, 0));
  for (int i = 0; i < 50; ++i) {
    Vector4 q;
    Real total = 0;
    for (int k = 0; k < 4; ++k) {
      q[k] = rng.uniform01();
      total += q[k];
    }
    q /= total;
    const LambdaVector lambda(q[0] + q[1] - q[2] - q[3],
                              q[0] - q[1] + q[2] - q[3],
                              q[0] - q[1] - q[2] + q[3], 1.0);
    CHECK((apply_single_kraus(lambda, mixed).matrix() - mixed.matrix())
              .cwiseAbs()
              .maxCoeff() < 1e-14);
  }
}
