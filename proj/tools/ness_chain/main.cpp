#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ness/version.hpp"
#include "ness_chain/commands.hpp"
#include "ness_chain/run_config.hpp"

using namespace ness::cli;

int main(int argc, char** argv) {
  CLI::App app{"Steady-state energy currents in damped oscillator chains"};
  app.set_version_flag("--version", std::string(ness::version_string));
  app.require_subcommand(1);

  std::string config_path, out_path, format;
  auto* currents = app.add_subcommand("currents", "Zeroth- and first-order currents for one config");
  currents->add_option("--config", config_path, "JSON config file")->required();
  currents->add_option("--out", out_path, "Output file (default: stdout)");
  currents->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  std::vector<std::string> vars;
  std::vector<double> from, to;
  std::vector<int> steps;
  auto* sweep = app.add_subcommand("sweep", "CSV table over one or two swept parameters");
  sweep->add_option("--config", config_path, "JSON config file")->required();
  sweep->add_option("--out", out_path, "Output file (default: stdout)");
  sweep->add_option("--var", vars, "Swept parameter: lambda2, strength, gamma, T_C, T_H, omega_r");
  sweep->add_option("--from", from, "Range start, one per --var");
  sweep->add_option("--to", to, "Range end, one per --var");
  sweep->add_option("--steps", steps, "Number of intervals, one per --var");

  auto* verify = app.add_subcommand("verify", "Run the identity suite");
  verify->add_option("--config", config_path, "JSON config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    RunConfig cfg = load_config(config_path);
    if (!out_path.empty()) cfg.output = out_path;
    if (!format.empty()) cfg.format = parse_format(format);

    if (*currents) return cmd_currents(cfg, std::cout, std::cerr);
    if (*sweep) {
      if (!vars.empty()) {
        if (from.size() != vars.size() || to.size() != vars.size() || steps.size() != vars.size())
          throw ConfigError("--var, --from, --to and --steps must be given the same number of times");
        cfg.sweep.clear();
        for (std::size_t i = 0; i < vars.size(); ++i) cfg.sweep.push_back({vars[i], from[i], to[i], steps[i]});
      }
      validate_config(cfg);
      if (cfg.sweep.empty()) throw ConfigError("no swept variable given");
      return cmd_sweep(cfg, std::cout, std::cerr);
    }
    if (*verify) return cmd_verify(cfg, std::cout, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
