// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// fails. argv[1] = path to the CLI binary (for the determinism criterion),
// argv[2] = scratch directory.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "qdepol/channel.hpp"
#include "qdepol/cli.hpp"
#include "qdepol/dynamics.hpp"
#include "qdepol/fidelity.hpp"
#include "qdepol/mc.hpp"
#include "qdepol/noise.hpp"
#include "qdepol/rng.hpp"
#include "test_util.hpp"

using namespace qdepol;
using namespace qdepol::testutil;

namespace {

struct Failure {
  std::string what;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

struct Harness {
  int failures = 0;

  void criterion(int id, const std::string& label,
                 const std::function<std::string()>& body) {
    try {
      const std::string detail = body();
      std::printf("PASS criterion %d: %s (%s)\n", id, label.c_str(),
                  detail.c_str());
    } catch (const Failure& f) {
      std::printf("FAIL criterion %d: %s -- %s\n", id, label.c_str(),
                  f.what.c_str());
      ++failures;
    } catch (const std::exception& e) {
      std::printf("FAIL criterion %d: %s -- exception: %s\n", id,
                  label.c_str(), e.what());
      ++failures;
    }
    std::fflush(stdout);
  }
};

std::string fmt(Real x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

Vector3 bloch_of(const ComplexMatrix& m) {
  return Vector3(2.0 * m(0, 1).real(), -2.0 * m(0, 1).imag(),
                 (m(0, 0) - m(1, 1)).real());
}

struct ParsedCsv {
  std::vector<std::vector<double>> rows;
};

ParsedCsv parse_numeric_csv(const std::string& text, std::size_t columns) {
  ParsedCsv out;
  std::istringstream in(text);
  std::string line;
  bool header_skipped = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_skipped) {
      header_skipped = true;
      continue;
    }
    std::vector<double> row;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) row.push_back(std::stod(field));
    if (row.size() == columns) out.rows.push_back(row);
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli_binary = argc > 1 ? argv[1] : "";
  const std::string tmp_dir = argc > 2 ? argv[2] : "acceptance_tmp";
  std::filesystem::create_directories(tmp_dir);

  Harness h;

  h.criterion(1, "telegraph closed form, Kraus equivalence, MC agreement", [] {
    const Real a = 1.0;
    Rng rng(10101);
    Real worst_eq = 0;
    for (int s = 0; s < 100; ++s) {
      const DensityMatrix rho = random_qubit_state(rng);
      for (int k = 1; k <= 20; ++k) {
        const Real t = 0.15 * k;
        const Real c = std::cos(2 * a * t);
        const LambdaVector lambda(1.0, c, c, t);
        const Matrix2c closed =
            std::cos(a * t) * std::cos(a * t) * rho.matrix() +
            std::sin(a * t) * std::sin(a * t) *
                (pauli(1) * rho.matrix() * pauli(1));
        const DensityMatrix via_bloch = apply_single(lambda, rho);
        const DensityMatrix via_kraus = apply_single_kraus(lambda, rho);
        worst_eq = std::max(
            worst_eq,
            (via_bloch.matrix() - via_kraus.matrix()).cwiseAbs().maxCoeff());
        worst_eq = std::max(
            worst_eq,
            (via_bloch.matrix() - closed).cwiseAbs().maxCoeff());
      }
    }
    require(worst_eq < 1e-12,
            "route disagreement " + fmt(worst_eq) + " >= 1e-12");

    // Monte-Carlo agreement at N = 1e5
    NoiseModel model = NoiseModel::telegraph(Axis::X, a);
    const DensityMatrix rho0 = bloch_to_density(BlochVector(0.2, -0.4, 0.8));
    Real worst_pull = 0;
    for (const Real t : {0.3, 0.7, 1.2, 2.0, 3.1}) {
      const Real c = std::cos(2 * a * t);
      const DensityMatrix analytic =
          apply_single(LambdaVector(1.0, c, c, t), rho0);
      const McEstimate est = mc_average(model, rho0, t, 100000, 271828);
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          const Real delta = std::abs(analytic(i, j) - est.mean(i, j));
          const Real sigma =
              std::hypot(est.stderr_re(i, j), est.stderr_im(i, j));
          const Real bound = std::max(3.0 * sigma, 1e-12);
          require(delta <= bound, "MC deviation " + fmt(delta) +
                                      " beyond 3 sigma at t=" + fmt(t));
          if (sigma > 0) worst_pull = std::max(worst_pull, delta / sigma);
        }
      }
    }
    return "max route diff " + fmt(worst_eq) + ", max MC pull " +
           fmt(worst_pull) + " sigma";
  });

  h.criterion(2, "isotropic gaussian plateau and fig1-upper curve", [] {
    NoiseModel model = NoiseModel::gaussian(Vector3(1, 1, 1));
    const KrausCoefficients at10 =
        kraus_from_lambda(eval_lambda(model, 10.0, 1e-9).value);
    const Vector4 plateau(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(6.0),
                          1.0 / std::sqrt(6.0), 1.0 / std::sqrt(6.0));
    const Real gap = (at10.k - plateau).cwiseAbs().maxCoeff();
    require(gap < 1e-3, "plateau gap " + fmt(gap) + " >= 1e-3");

    // fig1-upper CSV: past the transient the curves approach the plateau
    // monotonically
    RunConfig config = config_from_json(preset("fig1-upper"));
    std::ostringstream csv, log;
    require(run_kraus(config, csv, log) == 0, "kraus command failed");
    const ParsedCsv parsed = parse_numeric_csv(csv.str(), 5);
    require(parsed.rows.size() == 201, "unexpected row count");
    Vector4 prev_gap = Vector4::Constant(2.0);
    bool tail_started = false;
    for (const auto& row : parsed.rows) {
      if (row[0] < 1.5) continue;
      Vector4 k(row[1], row[2], row[3], row[4]);
      const Vector4 g = (k - plateau).cwiseAbs();
      if (tail_started) {
        require(g.maxCoeff() <= prev_gap.maxCoeff() + 1e-12,
                "non-monotone approach at t=" + fmt(row[0]));
      }
      prev_gap = g;
      tail_started = true;
    }
    require((prev_gap.maxCoeff()) < 1e-3, "final gap too large");
    return "plateau gap at t=10: " + fmt(gap);
  });

  h.criterion(3, "fig1-lower: quadrature vs MC, distinct plateaus", [] {
    const Vector3 d(1, 2, 3);
    NoiseModel model = NoiseModel::gaussian(d);
    const Vector3 a0 = Vector3(1, 1, 1) / std::sqrt(3.0);
    const DensityMatrix rho0 = bloch_to_density(BlochVector(a0));

    Real worst_pull = 0;
    for (int k = 1; k <= 10; ++k) {
      const Real t = 0.3 * k;
      const Vector3 lam = lambda_quadrature(model, t, 1e-9).lam;
      const McEstimate est = mc_average(model, rho0, t, 100000, 314159);
      const Vector3 mc = bloch_of(est.mean);
      const Vector3 sigma(2.0 * est.stderr_re(0, 1), 2.0 * est.stderr_im(0, 1),
                          2.0 * est.stderr_re(0, 0));
      for (int i = 0; i < 3; ++i) {
        const Real delta = std::abs(mc[i] - lam[i] * a0[i]);
        const Real bound = std::max(3.0 * sigma[i], 1e-12);
        require(delta <= bound, "MC deviation " + fmt(delta) + " > 3 sigma (" +
                                    fmt(bound) + ") at t=" + fmt(t));
        if (sigma[i] > 0) worst_pull = std::max(worst_pull, delta / sigma[i]);
      }
    }

    const Vector3 moments = asymptotic_lambda(model).lam;
    for (const Real t : {4.0, 6.0}) {
      const Vector3 lam = lambda_quadrature(model, t, 1e-9).lam;
      require((lam - moments).cwiseAbs().maxCoeff() < 1e-3,
              "plateau mismatch at t=" + fmt(t));
    }
    require(std::abs(moments.x() - moments.y()) > 0.05 &&
                std::abs(moments.y() - moments.z()) > 0.05,
            "plateaus not distinct");
    return "plateaus (" + fmt(moments.x()) + ", " + fmt(moments.y()) + ", " +
           fmt(moments.z()) + "), max MC pull " + fmt(worst_pull) + " sigma";
  });

  h.criterion(4, "lorentzian closed form, quadrature and steady state", [] {
    // derived-protocol validation of the closed form against MC at N = 1e6
    NoiseModel unit = NoiseModel::lorentzian(1.0);
    const DensityMatrix z_up = bloch_to_density(BlochVector(0, 0, 1));
    const McEstimate est = mc_average(unit, z_up, 1.0, 1000000, 112358);
    const Real az = (est.mean(0, 0) - est.mean(1, 1)).real();
    const Real closed = (1 + 2 * std::exp(-1.0)) / 3.0;
    const Real sigma = 2.0 * est.stderr_re(0, 0);
    require(std::abs(az - closed) <= 3.0 * sigma,
            "closed form vs MC: " + fmt(std::abs(az - closed)) + " > 3 sigma");

    Real worst = 0;
    for (const Real gamma : {0.5, 1.0, 2.0}) {
      NoiseModel model = NoiseModel::lorentzian(gamma);
      for (Real t = 0.0; t <= 5.0 + 1e-9; t += 0.25) {
        const Vector3 lam = lambda_quadrature(model, t, 1e-8).lam;
        const Real exact = (1 + 2 * std::exp(-gamma * t)) / 3.0;
        for (int i = 0; i < 3; ++i) {
          worst = std::max(worst, std::abs(lam[i] - exact));
        }
      }
    }
    require(worst < 1e-6, "quadrature error " + fmt(worst) + " >= 1e-6");

    // steady state contracts every Bloch vector by exactly 1/3
    Rng rng(5050);
    const LambdaVector steady(asymptotic_lambda(unit).lam, 0.0);
    Real worst_steady = 0;
    for (int i = 0; i < 100; ++i) {
      const Vector3 a = random_bloch(rng);
      const DensityMatrix out =
          apply_single_kraus(steady, bloch_to_density(BlochVector(a)));
      worst_steady = std::max(
          worst_steady,
          (density_to_bloch(out).vec() - a / 3.0).cwiseAbs().maxCoeff());
    }
    require(worst_steady < 1e-6,
            "steady-state contraction off by " + fmt(worst_steady));
    return "quadrature worst " + fmt(worst) + ", MC pull " +
           fmt(std::abs(az - closed) / std::max(sigma, 1e-300)) + " sigma";
  });

  h.criterion(5, "Kraus validity sweep and prefactor bookkeeping", [] {
    std::vector<NoiseModel> models = {
        NoiseModel::lorentzian(1.0), NoiseModel::telegraph(Axis::X, 1.0),
        NoiseModel::gaussian(Vector3(1, 1, 1)),
        NoiseModel::gaussian(Vector3(1, 2, 3))};
    Real worst_norm = 0;
    Real worst_radicand = 0;
    for (const auto& model : models) {
      for (int k = 0; k < 1000; ++k) {
        const Real t = 20.0 * k / 999.0;
        const LambdaResult res = eval_lambda(model, t, 1e-8);
        const CpReport cp = cp_check(res.value);
        worst_radicand = std::min(worst_radicand, cp.quarter_sums.minCoeff());
        const KrausCoefficients kc = kraus_from_lambda(res.value);
        worst_norm =
            std::max(worst_norm, std::abs(kc.k.squaredNorm() - 1.0));
      }
    }
    require(worst_norm < 1e-10, "normalization defect " + fmt(worst_norm));
    require(worst_radicand >= -1e-10,
            "negative radicand " + fmt(worst_radicand));

    // the /2 radicand variant printed for the three flip operators breaks
    // trace preservation; the /6 of the general expression is the valid one
    const Real t = 1.0;
    const Real e = std::exp(-t);
    const Real half_variant =
        (1 + e) / 2.0 + 3.0 * (1 - e) / 2.0;  // sum of k_i^2
    require(std::abs(half_variant - 1.0) > 0.5,
            "expected the /2 variant to violate normalization");
    const Real sixth_variant = (1 + e) / 2.0 + 3.0 * (1 - e) / 6.0;
    require(std::abs(sixth_variant - 1.0) < 1e-15,
            "the /6 variant must be normalized");
    return "worst |sum k^2 - 1| " + fmt(worst_norm) + ", min radicand " +
           fmt(worst_radicand);
  });

  h.criterion(6, "memory-kernel dynamics vs the telegraph closed form", [] {
    const Real a = 1.0;
    const DensityMatrix z_up = bloch_to_density(BlochVector(0, 0, 1));
    const EvolutionTrace derived =
        memory_kernel_evolve(2.0 * a * a, z_up, 2.0 * M_PI / a, 1e-3);
    Real worst = 0;
    for (std::size_t k = 0; k < derived.times.size(); ++k) {
      const Real az = density_to_bloch(derived.states[k]).vec().z();
      worst =
          std::max(worst, std::abs(az - std::cos(2 * a * derived.times[k])));
    }
    require(worst < 2e-4, "derived constant error " + fmt(worst) + " >= 2e-4");

    const EvolutionTrace printed =
        memory_kernel_evolve(0.5 * a * a, z_up, 2.0 * M_PI / a, 1e-3);
    Real printed_err = 0;
    for (std::size_t k = 0; k < printed.times.size(); ++k) {
      const Real az = density_to_bloch(printed.states[k]).vec().z();
      printed_err =
          std::max(printed_err, std::abs(az - std::cos(2 * a * printed.times[k])));
    }
    require(printed_err > 0.5,
            "printed constant unexpectedly reproduces the closed form");
    return "2a^2 error " + fmt(worst) + "; a^2/2 deviates by " +
           fmt(printed_err);
  });

  h.criterion(7, "divisibility verdicts", [] {
    auto exponential = [](Real t) {
      return Vector3(std::exp(-0.4 * t), std::exp(-0.9 * t),
                     std::exp(-1.3 * t));
    };
    const DivisibilityReport markov =
        divisibility_check(exponential, 0.7, 1.1, 1e-12);
    require(markov.divisible && markov.residual < 1e-12,
            "exponential family not recognized as divisible");

    const Real a = 1.0;
    auto telegraph = [a](Real t) {
      return Vector3(1.0, std::cos(2 * a * t), std::cos(2 * a * t));
    };
    const DivisibilityReport memory =
        divisibility_check(telegraph, 0.5, 0.5, 1e-9);
    require(!memory.divisible && memory.residual > 0.1,
            "telegraph composition defect " + fmt(memory.residual) +
                " not flagged");

    const Real gamma = 1.0;
    auto lorentzian = [gamma](Real t) {
      return Vector3::Constant((1 + 2 * std::exp(-gamma * t)) / 3.0).eval();
    };
    const DivisibilityReport reported =
        divisibility_check(lorentzian, 0.5, 0.5, 1e-9);
    require(std::isfinite(reported.residual) && reported.residual >= 0,
            "lorentzian residual not reported");
    return "exp residual " + fmt(markov.residual) + ", telegraph " +
           fmt(memory.residual) + ", lorentzian (recorded) " +
           fmt(reported.residual);
  });

  h.criterion(8, "fidelity closed forms against the general routes", [] {
    Rng rng(90210);
    Real worst_single = 0;
    for (int i = 0; i < 1000; ++i) {
      const Vector3 a = random_bloch(rng);
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
      const DensityMatrix rho = bloch_to_density(BlochVector(a));
      const Real closed = single_qubit_fidelity(BlochVector(a), lambda);
      const Real general = uhlmann_fidelity(rho, apply_single(lambda, rho));
      worst_single = std::max(worst_single, std::abs(closed - general));
    }
    require(worst_single < 1e-10,
            "single-qubit disagreement " + fmt(worst_single));

    Real worst_pure = 0;
    for (int i = 0; i < 500; ++i) {
      const TwoQubitPureAmps psi(random_pure_amps(rng));
      const Real lam = 0.1 + 0.8 * rng.uniform01();
      const LambdaVector iso(lam, lam, lam, 1.0);
      const DensityMatrix rho = pure_density(psi);
      const Real overlap =
          (psi.amps.adjoint() * apply_two_qubit(iso, iso, rho).matrix() *
           psi.amps)(0)
              .real();
      worst_pure = std::max(
          worst_pure, std::abs(two_qubit_pure_fidelity(psi, iso) - overlap));
    }
    require(worst_pure < 1e-10, "pure-state disagreement " + fmt(worst_pure));

    // m family on the fig-2 gaussian model
    NoiseModel model = NoiseModel::gaussian(Vector3(1, 1, 1));
    const Real m_grid[] = {1.0, 0.9, 0.7, 0.4, 0.0};
    Real worst_m = 0;
    for (int k = 1; k <= 25; ++k) {
      const Real t = 0.16 * k;
      const LambdaVector lambda = lambda_analytic(model, t);
      Real previous = -1;
      for (const Real m : m_grid) {
        const Real closed = two_qubit_m_fidelity(MFamilyState(m), lambda);
        const DensityMatrix rho = m_family_density(MFamilyState(m));
        const Real general =
            uhlmann_fidelity(rho, apply_two_qubit(lambda, lambda, rho));
        worst_m = std::max(worst_m, std::abs(closed - general));
        if (previous >= 0) {
          require(closed >= previous - 1e-12,
                  "ordering violated at t=" + fmt(t) + ", m=" + fmt(m));
        }
        previous = closed;
      }
    }
    require(worst_m < 1e-8, "m-family disagreement " + fmt(worst_m));

    const Real f_inf = two_qubit_m_fidelity(
        MFamilyState(0), lambda_analytic(model, 10.0));
    require(std::abs(f_inf - 5.0 / 9.0) < 1e-3,
            "late-time m=0 fidelity " + fmt(f_inf) + " != 5/9");
    return "worst: single " + fmt(worst_single) + ", pure " + fmt(worst_pure) +
           ", m-family " + fmt(worst_m);
  });

  h.criterion(9, "oracle command determinism across workers", [&] {
    require(!cli_binary.empty(), "CLI binary path not supplied");
    const std::string base = tmp_dir + "/det";
    const std::string cmd_prefix =
        cli_binary +
        " oracle --preset telegraph --samples 20000 --seed 7 --out ";
    struct Run {
      std::string file;
      std::string threads;
    };
    const Run runs[] = {{base + "_t1.csv", " --threads 1"},
                        {base + "_t4.csv", " --threads 4"},
                        {base + "_t4b.csv", " --threads 4"}};
    for (const Run& r : runs) {
      const std::string cmd = cmd_prefix + r.file + r.threads;
      require(std::system(cmd.c_str()) == 0, "command failed: " + cmd);
    }
    const std::string first = read_file(runs[0].file);
    require(!first.empty(), "empty CSV output");
    require(first == read_file(runs[1].file),
            "CSV differs between 1 and 4 workers");
    require(first == read_file(runs[2].file),
            "CSV differs between repeated runs");
    return "3 runs byte-identical (" + std::to_string(first.size()) +
           " bytes)";
  });

  std::printf("%d of 9 criteria passed\n", 9 - h.failures);
  return h.failures == 0 ? 0 : 1;
}
