#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qdepol/noise.hpp"
#include "qdepol/types.hpp"

namespace qdepol {

struct GridSpec {
  Real t_min = 0;
  Real t_max = 5;
  int points = 101;
};

struct StateSpec {
  enum class Kind { Bloch, TwoQubitPure, MFamily };
  Kind kind = Kind::Bloch;
  Vector3 bloch{0, 0, 1};
  Eigen::Vector4cd amps = Eigen::Vector4cd::Zero();
  std::vector<Real> m_values{0};
};

struct DynamicsSpec {
  Real step = 1e-3;
  std::vector<std::string> methods;  // empty: derived from the model
  std::optional<Real> kernel_constant;
  std::optional<Vector3> exponential_rates;
  Real div_t = 0.5;
  Real div_s = 0.5;
  Real div_tol = 1e-9;
};

struct RunConfig {
  nlohmann::json model_json;
  GridSpec grid;
  StateSpec state;
  long samples = 100000;
  std::uint64_t seed = 12345;
  int threads = 0;
  Real quad_tol = 1e-9;
  Real oracle_floor = 1e-6;  // deviation allowance when sigma vanishes
  std::string out;
  bool gnuplot = false;
  nlohmann::json resolved;  // echoed into every CSV
};

/// Compiled-in named configurations; throws ContractError on unknown names.
nlohmann::json preset(const std::string& name);
std::vector<std::string> preset_names();

RunConfig config_from_json(const nlohmann::json& doc);
NoiseModel model_from_json(const nlohmann::json& doc);

// Each command writes one CSV to `csv` (header comment + column header +
// rows) and human-readable notes to `log`. Returns the process exit code:
// 0 on success with all internal cross-checks passing, 2 on a numeric
// failure (CP violation, non-convergence, oracle mismatch, instability).
int run_lambda(const RunConfig& config, std::ostream& csv, std::ostream& log);
int run_kraus(const RunConfig& config, std::ostream& csv, std::ostream& log);
int run_fidelity(const RunConfig& config, std::ostream& csv, std::ostream& log);
int run_oracle(const RunConfig& config, std::ostream& csv, std::ostream& log);
int run_dynamics(const RunConfig& config, std::ostream& csv, std::ostream& log);

/// Companion gnuplot script for a command's CSV output.
std::string gnuplot_script(const std::string& command,
                           const std::string& csv_path);

std::string format_real(Real x);  // %.17g, locale-independent

}  // namespace qdepol
