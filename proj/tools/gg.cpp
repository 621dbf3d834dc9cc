#include <iostream>

#include <CLI11.hpp>

#include "gg/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Pseudospectral simulator and verification harness for the damped Gear-Grimshaw system"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::vector<std::string> axes;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "Experiment config (JSON)")->required();
    sub->add_option("-o,--out", out_dir, "Output directory (overrides output.directory)");
  };
  auto* run = app.add_subcommand("run", "Evolve the configured initial data and write diagnostics");
  auto* verify = app.add_subcommand("verify", "Run the identity and inequality battery");
  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep and fit decay rates");
  add_common(run);
  add_common(verify);
  add_common(sweep);
  sweep->add_option("--axis", axes, "Sweep axis, e.g. k=0.25,0.5,1.0 (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : gg::kExitConfigError;
  }

  try {
    auto cfg = gg::load_config(config_path);
    for (const auto& a : axes) {
      auto [name, values] = gg::parse_axis(a);
      cfg.sweep[name] = values;
    }
    std::optional<std::filesystem::path> out;
    if (!out_dir.empty()) out = out_dir;
    if (run->parsed()) return gg::cmd_run(cfg, std::cerr, out);
    if (verify->parsed()) return gg::cmd_verify(cfg, std::cerr, out);
    return gg::cmd_sweep(cfg, std::cerr, out);
  } catch (const gg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return gg::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
