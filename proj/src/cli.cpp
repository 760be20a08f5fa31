#include "qdepol/cli.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "qdepol/channel.hpp"
#include "qdepol/dynamics.hpp"
#include "qdepol/errors.hpp"
#include "qdepol/fidelity.hpp"
#include "qdepol/mc.hpp"
#include "qdepol/version.hpp"

namespace qdepol {

using nlohmann::json;

std::string format_real(Real x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

const char* method_name(LambdaMethod m) {
  switch (m) {
    case LambdaMethod::Analytic:
      return "analytic";
    case LambdaMethod::Quadrature:
      return "quadrature";
    case LambdaMethod::Asymptotic:
      return "asymptotic";
  }
  return "?";
}

void write_head(std::ostream& csv, const RunConfig& config) {
  // The echo records the experiment definition; worker count and output
  // location are execution details and must not break byte-identity.
  json echo = config.resolved;
  echo.erase("threads");
  echo.erase("out");
  csv << "# " << version_string << "\n";
  csv << "# config: " << echo.dump() << "\n";
}

std::vector<Real> grid_times(const GridSpec& grid) {
  std::vector<Real> t(grid.points);
  const Real dt = grid.points > 1
                      ? (grid.t_max - grid.t_min) / (grid.points - 1)
                      : 0.0;
  for (int i = 0; i < grid.points; ++i) t[i] = grid.t_min + i * dt;
  return t;
}

const std::map<std::string, json>& preset_table() {
  static const std::map<std::string, json> table = [] {
    std::map<std::string, json> p;
    p["telegraph"] = {
        {"model", {{"kind", "telegraph"}, {"axis", "x"}, {"amplitude", 1.0}}},
        {"grid", {{"t_min", 0.0}, {"t_max", 6.4}, {"points", 129}}},
        {"state", {{"bloch", {0.0, 0.0, 1.0}}}},
        {"dynamics", {{"step", 1e-3}, {"methods", {"exact-lambda", "memory-kernel"}}}}};
    p["lorentzian"] = {
        {"model", {{"kind", "lorentzian"}, {"gamma", 1.0}}},
        {"grid", {{"t_min", 0.0}, {"t_max", 5.0}, {"points", 101}}},
        {"state", {{"bloch", {0.0, 0.0, 1.0}}}},
        {"dynamics", {{"step", 1e-3}, {"methods", {"exact-lambda", "lindblad"}}}}};
    p["fig1-upper"] = {
        {"model", {{"kind", "gaussian"}, {"d", {1.0, 1.0, 1.0}}}},
        {"grid", {{"t_min", 0.0}, {"t_max", 10.0}, {"points", 201}}},
        {"state", {{"bloch", {0.0, 0.0, 1.0}}}}};
    p["fig1-lower"] = {
        {"model", {{"kind", "gaussian"}, {"d", {1.0, 2.0, 3.0}}}},
        {"grid", {{"t_min", 0.0}, {"t_max", 4.0}, {"points", 161}}},
        {"state", {{"bloch", {0.0, 0.0, 1.0}}}}};
    p["fig2"] = {
        {"model", {{"kind", "gaussian"}, {"d", {1.0, 1.0, 1.0}}}},
        {"grid", {{"t_min", 0.0}, {"t_max", 4.0}, {"points", 101}}},
        {"state", {{"m_values", {1.0, 0.9, 0.7, 0.4, 0.0}}}}};
    return p;
  }();
  return table;
}

}  // namespace

json preset(const std::string& name) {
  const auto& table = preset_table();
  auto it = table.find(name);
  if (it == table.end()) {
    std::string names;
    for (const auto& [key, value] : table) {
      names += (names.empty() ? "" : ", ") + key;
    }
    throw ContractError("unknown preset '" + name + "'; available: " + names);
  }
  return it->second;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [key, value] : preset_table()) names.push_back(key);
  return names;
}

NoiseModel model_from_json(const json& doc) {
  const std::string kind = doc.value("kind", "lorentzian");
  if (kind == "lorentzian") {
    return NoiseModel::lorentzian(doc.value("gamma", 1.0));
  }
  if (kind == "telegraph") {
    const std::string axis = doc.value("axis", "x");
    Axis a;
    if (axis == "x") {
      a = Axis::X;
    } else if (axis == "y") {
      a = Axis::Y;
    } else if (axis == "z") {
      a = Axis::Z;
    } else {
      throw ContractError("telegraph axis must be one of x, y, z");
    }
    return NoiseModel::telegraph(a, doc.value("amplitude", 1.0));
  }
  if (kind == "gaussian") {
    Vector3 d(1, 1, 1);
    if (doc.contains("d")) {
      const auto& arr = doc.at("d");
      if (!arr.is_array() || arr.size() != 3) {
        throw ContractError("gaussian widths d must be an array of 3 values");
      }
      for (int i = 0; i < 3; ++i) d[i] = arr[i].get<Real>();
    }
    return NoiseModel::gaussian(d);
  }
  if (kind == "radial-custom") {
    throw ContractError(
        "custom radial densities are a library-level interface "
        "(NoiseModel::radial); the CLI supports lorentzian, telegraph, "
        "gaussian");
  }
  throw ContractError("unknown model kind '" + kind +
                      "'; expected lorentzian, telegraph or gaussian");
}

RunConfig config_from_json(const json& doc) {
  RunConfig config;
  config.resolved = doc;
  config.model_json = doc.value("model", json{{"kind", "lorentzian"}});

  if (doc.contains("grid")) {
    const auto& g = doc.at("grid");
    config.grid.t_min = g.value("t_min", 0.0);
    config.grid.t_max = g.value("t_max", 5.0);
    config.grid.points = g.value("points", 101);
  }
  if (config.grid.t_min < 0) throw ContractError("t_min must be >= 0");
  if (config.grid.points < 2) throw ContractError("grid needs >= 2 points");
  if (config.grid.t_max <= config.grid.t_min) {
    throw ContractError("t_max must exceed t_min");
  }

  if (doc.contains("state")) {
    const auto& s = doc.at("state");
    if (s.contains("bloch")) {
      config.state.kind = StateSpec::Kind::Bloch;
      for (int i = 0; i < 3; ++i) config.state.bloch[i] = s.at("bloch")[i];
    } else if (s.contains("amps")) {
      config.state.kind = StateSpec::Kind::TwoQubitPure;
      const auto& arr = s.at("amps");
      if (!arr.is_array() || arr.size() != 4) {
        throw ContractError("state.amps must hold 4 [re, im] pairs");
      }
      for (int i = 0; i < 4; ++i) {
        config.state.amps[i] =
            Complex(arr[i][0].get<Real>(), arr[i][1].get<Real>());
      }
    } else if (s.contains("m_values")) {
      config.state.kind = StateSpec::Kind::MFamily;
      config.state.m_values = s.at("m_values").get<std::vector<Real>>();
      if (config.state.m_values.empty()) {
        throw ContractError("state.m_values must not be empty");
      }
    } else if (s.contains("m")) {
      config.state.kind = StateSpec::Kind::MFamily;
      config.state.m_values = {s.at("m").get<Real>()};
    } else {
      throw ContractError("state must define bloch, amps, m or m_values");
    }
  }

  config.samples = doc.value("samples", config.samples);
  config.seed = doc.value("seed", config.seed);
  config.threads = doc.value("threads", config.threads);
  config.quad_tol = doc.value("quad_tol", config.quad_tol);
  config.oracle_floor = doc.value("oracle_floor", config.oracle_floor);
  config.out = doc.value("out", config.out);
  if (!(config.quad_tol > 0) || !(config.oracle_floor > 0)) {
    throw ContractError("tolerances must be positive");
  }
  return config;
}

namespace {

DynamicsSpec dynamics_from_json(const json& doc) {
  DynamicsSpec spec;
  if (!doc.contains("dynamics")) return spec;
  const auto& d = doc.at("dynamics");
  spec.step = d.value("step", spec.step);
  if (d.contains("methods")) {
    spec.methods = d.at("methods").get<std::vector<std::string>>();
  }
  if (d.contains("kernel_constant")) {
    spec.kernel_constant = d.at("kernel_constant").get<Real>();
  }
  if (d.contains("exponential_rates")) {
    const auto& arr = d.at("exponential_rates");
    Vector3 rates;
    for (int i = 0; i < 3; ++i) rates[i] = arr[i].get<Real>();
    spec.exponential_rates = rates;
  }
  spec.div_t = d.value("div_t", spec.div_t);
  spec.div_s = d.value("div_s", spec.div_s);
  spec.div_tol = d.value("div_tol", spec.div_tol);
  return spec;
}

struct LambdaRow {
  LambdaResult result;
  bool cp_ok;
};

}  // namespace

int run_lambda(const RunConfig& config, std::ostream& csv, std::ostream& log) {
  const NoiseModel model = model_from_json(config.model_json);
  write_head(csv, config);
  csv << "t,lambda_x,lambda_y,lambda_z,method\n";
  int exit_code = 0;
  for (const Real t : grid_times(config.grid)) {
    try {
      const LambdaResult res = eval_lambda(model, t, config.quad_tol);
      const bool cp = cp_check(res.value).completely_positive;
      csv << format_real(t);
      for (int i = 0; i < 3; ++i) csv << "," << format_real(res.value.lam[i]);
      csv << "," << method_name(res.method) << "\n";
      if (!cp) {
        csv << "# error: t=" << format_real(t)
            << " contraction fails the complete-positivity check\n";
        exit_code = 2;
      }
    } catch (const ConvergenceError& e) {
      csv << "# error: t=" << format_real(t) << " " << e.what()
          << " (achieved " << format_real(e.achieved_error) << ")\n";
      exit_code = 2;
    }
  }
  if (exit_code != 0) log << "lambda: one or more rows failed\n";
  return exit_code;
}

int run_kraus(const RunConfig& config, std::ostream& csv, std::ostream& log) {
  const NoiseModel model = model_from_json(config.model_json);
  write_head(csv, config);
  csv << "t,k0,k1,k2,k3\n";
  int exit_code = 0;
  for (const Real t : grid_times(config.grid)) {
    try {
      const LambdaResult res = eval_lambda(model, t, config.quad_tol);
      const KrausCoefficients kc = kraus_from_lambda(res.value);
      csv << format_real(t);
      for (int i = 0; i < 4; ++i) csv << "," << format_real(kc.k[i]);
      csv << "\n";
    } catch (const Error& e) {
      csv << "# error: t=" << format_real(t) << " " << e.what() << "\n";
      exit_code = 2;
    }
  }
  if (exit_code != 0) log << "kraus: one or more rows failed\n";
  return exit_code;
}

int run_fidelity(const RunConfig& config, std::ostream& csv,
                 std::ostream& log) {
  const NoiseModel model = model_from_json(config.model_json);
  write_head(csv, config);
  const bool m_family = config.state.kind == StateSpec::Kind::MFamily;
  csv << (m_family ? "t,m,F_closed,F_uhlmann,abs_delta\n"
                   : "t,F_closed,F_uhlmann,abs_delta\n");

  int exit_code = 0;
  bool warned_anisotropic = false;
  const Real gate = 1e-8;

  for (const Real t : grid_times(config.grid)) {
    LambdaResult res;
    try {
      res = eval_lambda(model, t, config.quad_tol);
    } catch (const ConvergenceError& e) {
      csv << "# error: t=" << format_real(t) << " " << e.what() << "\n";
      exit_code = 2;
      continue;
    }
    const LambdaVector& lambda = res.value;

    auto emit = [&](std::optional<Real> m, Real closed, Real general) {
      const Real delta = std::abs(closed - general);
      csv << format_real(t) << ",";
      if (m) csv << format_real(*m) << ",";
      csv << format_real(closed) << "," << format_real(general) << ","
          << format_real(delta) << "\n";
      if (delta > gate) {
        log << "fidelity: closed form and Uhlmann disagree by "
            << format_real(delta) << " at t=" << format_real(t) << "\n";
        exit_code = 2;
      }
    };

    switch (config.state.kind) {
      case StateSpec::Kind::Bloch: {
        const BlochVector a(config.state.bloch);
        const DensityMatrix rho = bloch_to_density(a);
        const Real general =
            uhlmann_fidelity(rho, apply_single(lambda, rho));
        emit(std::nullopt, single_qubit_fidelity(a, lambda), general);
        break;
      }
      case StateSpec::Kind::TwoQubitPure: {
        const TwoQubitPureAmps psi(config.state.amps);
        const DensityMatrix rho = pure_density(psi);
        const DensityMatrix out = apply_two_qubit(lambda, lambda, rho);
        const Real general = uhlmann_fidelity(rho, out);
        Real closed;
        try {
          closed = two_qubit_pure_fidelity(psi, lambda);
        } catch (const UnsupportedFormulaError&) {
          if (!warned_anisotropic) {
            log << "fidelity: anisotropic contraction; pure-state closed "
                   "form unavailable, reporting the Uhlmann value twice\n";
            warned_anisotropic = true;
          }
          closed = general;
        }
        emit(std::nullopt, closed, general);
        break;
      }
      case StateSpec::Kind::MFamily: {
        for (const Real m : config.state.m_values) {
          const MFamilyState state(m);
          const DensityMatrix rho = m_family_density(state);
          const DensityMatrix out = apply_two_qubit(lambda, lambda, rho);
          emit(m, two_qubit_m_fidelity(state, lambda),
               uhlmann_fidelity(rho, out));
        }
        break;
      }
    }
  }
  return exit_code;
}

int run_oracle(const RunConfig& config, std::ostream& csv, std::ostream& log) {
  if (config.samples < 1000) {
    throw ContractError("oracle needs at least 1000 samples");
  }
  const NoiseModel model = model_from_json(config.model_json);
  const bool single = config.state.kind == StateSpec::Kind::Bloch;

  DensityMatrix rho0 = [&] {
    switch (config.state.kind) {
      case StateSpec::Kind::Bloch:
        return bloch_to_density(BlochVector(config.state.bloch));
      case StateSpec::Kind::TwoQubitPure:
        return pure_density(TwoQubitPureAmps(config.state.amps));
      case StateSpec::Kind::MFamily:
        return m_family_density(MFamilyState(config.state.m_values.front()));
    }
    throw ContractError("unreachable");
  }();

  write_head(csv, config);
  csv << "t,entry,analytic_re,analytic_im,mc_re,mc_im,stderr_re,stderr_im,"
         "abs_delta,bound,pass\n";

  int exit_code = 0;
  const auto times = grid_times(config.grid);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const Real t = times[i];
    const LambdaResult res = eval_lambda(model, t, config.quad_tol);

    const DensityMatrix analytic =
        single ? apply_single(res.value, rho0)
               : apply_two_qubit(res.value, res.value, rho0);
    const std::uint64_t point_seed =
        config.seed + 1000003ULL * static_cast<std::uint64_t>(i);
    const McEstimate est =
        single ? mc_average(model, rho0, t, config.samples, point_seed,
                            config.threads)
               : mc_average_two_qubit(model, rho0, t, config.samples,
                                      point_seed, config.threads);

    const int dim = analytic.dim();
    Real max_delta = 0;
    Real bound_at_max = 0;
    bool all_pass = true;
    for (int a = 0; a < dim; ++a) {
      for (int b = 0; b < dim; ++b) {
        const Complex av = analytic(a, b);
        const Complex mv = est.mean(a, b);
        const Real delta = std::abs(av - mv);
        const Real sigma = std::sqrt(est.stderr_re(a, b) * est.stderr_re(a, b) +
                                     est.stderr_im(a, b) * est.stderr_im(a, b));
        const Real bound = std::max(3.0 * sigma, config.oracle_floor);
        const bool pass = delta <= bound;
        all_pass = all_pass && pass;
        if (delta > max_delta) {
          max_delta = delta;
          bound_at_max = bound;
        }
        csv << format_real(t) << "," << a << b << ","
            << format_real(av.real()) << "," << format_real(av.imag()) << ","
            << format_real(mv.real()) << "," << format_real(mv.imag()) << ","
            << format_real(est.stderr_re(a, b)) << ","
            << format_real(est.stderr_im(a, b)) << "," << format_real(delta)
            << "," << format_real(bound) << "," << (pass ? 1 : 0) << "\n";
      }
    }
    csv << format_real(t) << ",summary,,,,,,," << format_real(max_delta)
        << "," << format_real(bound_at_max) << "," << (all_pass ? 1 : 0)
        << "\n";
    if (!all_pass) {
      log << "oracle: deviation " << format_real(max_delta)
          << " exceeds bound at t=" << format_real(t) << "\n";
      exit_code = 2;
    }
  }
  return exit_code;
}

int run_dynamics(const RunConfig& config, std::ostream& csv,
                 std::ostream& log) {
  const NoiseModel model = model_from_json(config.model_json);
  const DynamicsSpec spec = dynamics_from_json(config.resolved);
  if (config.state.kind != StateSpec::Kind::Bloch) {
    throw ContractError("dynamics runs on single-qubit (bloch) states");
  }
  const DensityMatrix rho0 = bloch_to_density(BlochVector(config.state.bloch));

  std::vector<std::string> methods = spec.methods;
  if (methods.empty()) {
    methods.push_back("exact-lambda");
    if (model.kind() == NoiseModel::Kind::Lorentzian3Axis) {
      methods.push_back("lindblad");
    }
    if (model.kind() == NoiseModel::Kind::TelegraphAxis) {
      methods.push_back("memory-kernel");
    }
  }

  const Real t_final = config.grid.t_max;
  const Real h = spec.step;
  const long n_steps = std::lround(t_final / h);
  const long stride =
      std::max<long>(1, n_steps / std::max(1, config.grid.points - 1));

  // Contraction source for the exact trace and the divisibility probe.
  std::function<Vector3(Real)> lambda_fn;
  if (spec.exponential_rates) {
    const Vector3 rates = *spec.exponential_rates;
    lambda_fn = [rates](Real t) {
      return Vector3(std::exp(-rates.x() * t), std::exp(-rates.y() * t),
                     std::exp(-rates.z() * t));
    };
  } else {
    const Real tol = config.quad_tol;
    lambda_fn = [model, tol](Real t) {
      return eval_lambda(model, t, tol).value.lam;
    };
  }

  write_head(csv, config);
  csv << "t,method";
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      csv << ",rho" << i << j << "_re,rho" << i << j << "_im";
    }
  }
  csv << ",ax,ay,az\n";

  auto emit_state = [&](Real t, const std::string& tag,
                        const DensityMatrix& rho) {
    csv << format_real(t) << "," << tag;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        csv << "," << format_real(rho(i, j).real()) << ","
            << format_real(rho(i, j).imag());
      }
    }
    const Vector3 a = density_to_bloch(rho).vec();
    for (int i = 0; i < 3; ++i) csv << "," << format_real(a[i]);
    csv << "\n";
  };

  int exit_code = 0;
  for (const std::string& method : methods) {
    try {
      if (method == "exact-lambda") {
        for (long k = 0; k * stride <= n_steps; ++k) {
          const Real t = static_cast<Real>(k * stride) * h;
          const LambdaVector lambda(lambda_fn(t), t);
          emit_state(t, method, apply_single(lambda, rho0));
        }
      } else if (method == "lindblad") {
        if (model.kind() != NoiseModel::Kind::Lorentzian3Axis) {
          throw ContractError(
              "lindblad trace requires a lorentzian model (rate gamma)");
        }
        const EvolutionTrace trace =
            lindblad_evolve(model.gamma(), rho0, t_final, h);
        for (long k = 0; k * stride < static_cast<long>(trace.times.size());
             ++k) {
          emit_state(trace.times[k * stride], method,
                     trace.states[k * stride]);
        }
      } else if (method == "memory-kernel") {
        Real kappa;
        if (spec.kernel_constant) {
          kappa = *spec.kernel_constant;
        } else {
          if (model.kind() != NoiseModel::Kind::TelegraphAxis) {
            throw ContractError(
                "memory-kernel trace requires a telegraph model or an "
                "explicit kernel_constant");
          }
          const Real a = model.amplitude();
          kappa = 2.0 * a * a;
          log << "memory kernel constant: 2*a^2 = " << format_real(kappa)
              << " (printed alternative a^2/2 = " << format_real(0.5 * a * a)
              << " available via dynamics.kernel_constant)\n";
        }
        const EvolutionTrace trace =
            memory_kernel_evolve(kappa, rho0, t_final, h);
        for (long k = 0; k * stride < static_cast<long>(trace.times.size());
             ++k) {
          emit_state(trace.times[k * stride], method,
                     trace.states[k * stride]);
        }
      } else {
        throw ContractError("unknown dynamics method '" + method + "'");
      }
    } catch (const StabilityError& e) {
      csv << "# error: method=" << method << " " << e.what() << "\n";
      log << "dynamics: " << method << " failed: " << e.what() << "\n";
      exit_code = 2;
    }
  }

  const DivisibilityReport report =
      divisibility_check(lambda_fn, spec.div_t, spec.div_s, spec.div_tol);
  csv << "# divisibility: t=" << format_real(spec.div_t)
      << " s=" << format_real(spec.div_s)
      << " residual=" << format_real(report.residual)
      << " divisible=" << (report.divisible ? "true" : "false")
      << " tol=" << format_real(spec.div_tol) << "\n";
  log << "divisibility residual " << format_real(report.residual) << " -> "
      << (report.divisible ? "divisible (Markovian composition law holds)"
                           : "not divisible (memory effects present)")
      << "\n";
  return exit_code;
}

std::string gnuplot_script(const std::string& command,
                           const std::string& csv_path) {
  std::ostringstream gp;
  gp << "# gnuplot script for " << csv_path << "\n";
  gp << "set datafile separator ','\n";
  gp << "set grid\nset xlabel 't'\n";
  if (command == "lambda") {
    gp << "plot '" << csv_path << "' using 1:2 with lines title 'lambda_x', "
       << "'' using 1:3 with lines title 'lambda_y', "
       << "'' using 1:4 with lines title 'lambda_z'\n";
  } else if (command == "kraus") {
    gp << "plot '" << csv_path << "' using 1:2 with lines title 'k0', "
       << "'' using 1:3 with lines title 'k1', "
       << "'' using 1:4 with lines title 'k2', "
       << "'' using 1:5 with lines title 'k3'\n";
  } else if (command == "fidelity") {
    gp << "# m-family runs carry m in column 2 and F in column 3\n";
    gp << "plot '" << csv_path << "' using 1:2 with lines title 'F'\n";
  } else if (command == "oracle") {
    gp << "plot '" << csv_path
       << "' using 1:(strcol(2) eq 'summary' ? $9 : 1/0) with points "
          "title 'max deviation', '' using 1:(strcol(2) eq 'summary' ? "
          "$10 : 1/0) with lines title '3 sigma bound'\n";
  } else if (command == "dynamics") {
    gp << "plot '" << csv_path
       << "' using 1:(strcol(2) eq 'exact-lambda' ? $13 : 1/0) with lines "
          "title 'a_z exact', '' using 1:(strcol(2) eq 'lindblad' ? $13 : "
          "1/0) with lines title 'a_z lindblad', '' using 1:(strcol(2) eq "
          "'memory-kernel' ? $13 : 1/0) with lines title 'a_z kernel'\n";
  }
  return gp.str();
}

}  // namespace qdepol
