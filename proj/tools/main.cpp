#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "qdepol/cli.hpp"
#include "qdepol/errors.hpp"
#include "qdepol/version.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string preset_name;
  std::string out_path;
  long samples = -1;
  long long seed = -1;
  int threads = -1;
  bool gnuplot = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "JSON configuration file");
  cmd->add_option("--preset", opts.preset_name,
                  "built-in configuration (telegraph, lorentzian, fig1-upper, "
                  "fig1-lower, fig2)");
  cmd->add_option("--out", opts.out_path, "CSV output path (default stdout)");
  cmd->add_option("--samples", opts.samples, "Monte-Carlo sample count");
  cmd->add_option("--seed", opts.seed, "random seed");
  cmd->add_option("--threads", opts.threads,
                  "worker threads for sampling (0 = hardware)");
  cmd->add_flag("--gnuplot", opts.gnuplot,
                "also emit a gnuplot script next to the CSV");
}

qdepol::RunConfig build_config(const CommonOpts& opts) {
  nlohmann::json doc = nlohmann::json::object();
  if (!opts.preset_name.empty()) {
    doc = qdepol::preset(opts.preset_name);
  }
  if (!opts.config_path.empty()) {
    std::ifstream in(opts.config_path);
    if (!in) {
      throw qdepol::ContractError("cannot open config file " +
                                  opts.config_path);
    }
    nlohmann::json patch = nlohmann::json::parse(in);
    doc.merge_patch(patch);
  }
  if (opts.samples >= 0) doc["samples"] = opts.samples;
  if (opts.seed >= 0) doc["seed"] = opts.seed;
  if (opts.threads >= 0) doc["threads"] = opts.threads;
  if (!opts.out_path.empty()) doc["out"] = opts.out_path;

  qdepol::RunConfig config = qdepol::config_from_json(doc);
  config.gnuplot = opts.gnuplot;
  return config;
}

int dispatch(const std::string& name, const CommonOpts& opts) {
  const qdepol::RunConfig config = build_config(opts);

  std::ofstream file;
  const bool to_file = !config.out.empty();
  if (to_file) {
    file.open(config.out, std::ios::binary);
    if (!file) {
      throw qdepol::ContractError("cannot open output file " + config.out);
    }
  }
  std::ostream& csv = to_file ? file : std::cout;

  int code = 0;
  if (name == "lambda") {
    code = qdepol::run_lambda(config, csv, std::cerr);
  } else if (name == "kraus") {
    code = qdepol::run_kraus(config, csv, std::cerr);
  } else if (name == "fidelity") {
    code = qdepol::run_fidelity(config, csv, std::cerr);
  } else if (name == "oracle") {
    code = qdepol::run_oracle(config, csv, std::cerr);
  } else if (name == "dynamics") {
    code = qdepol::run_dynamics(config, csv, std::cerr);
  }

  if (config.gnuplot && to_file) {
    std::ofstream gp(config.out + ".gp");
    gp << qdepol::gnuplot_script(name, config.out);
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zero-bandwidth depolarization channel toolkit"};
  app.set_version_flag("--version", qdepol::version_string);
  app.require_subcommand(1);

  const char* descriptions[][2] = {
      {"lambda", "contraction factors lambda_i(t) over a time grid"},
      {"kraus", "Kraus coefficients k_i(t) over a time grid"},
      {"fidelity", "input/output fidelity, closed form vs Uhlmann"},
      {"oracle", "Monte-Carlo cross-check of the analytic channel"},
      {"dynamics", "integrator traces and divisibility report"},
  };

  std::map<std::string, CommonOpts> opts;
  for (const auto& [name, desc] : descriptions) {
    add_common(app.add_subcommand(name, desc), opts[name]);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& [name, desc] : descriptions) {
      if (app.get_subcommand(name)->parsed()) {
        return dispatch(name, opts[name]);
      }
    }
  } catch (const qdepol::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
