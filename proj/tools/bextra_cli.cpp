#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bextra/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Decentralized consensus optimization: EXTRA / bundle EXTRA experiment driver"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int threads = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Config file (flat key = value format)")
        ->required();
    cmd->add_option("--out", out_dir, "Output directory (default: out)");
    cmd->add_option("--seed", seed, "Override the config's master seed");
    cmd->add_option("--threads", threads, "Override the config's thread count");
  };

  CLI::App* run_cmd =
      app.add_subcommand("run", "Run every arm at its configured step size; one CSV per arm");
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Step-size robustness sweep over all (arm, alpha) pairs");
  add_common(run_cmd);
  add_common(sweep_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    bextra::ExperimentSpec spec = bextra::parse_spec_file(config_path);
    CLI::App* active = app.got_subcommand(run_cmd) ? run_cmd : sweep_cmd;
    if (active->count("--seed") > 0) spec.seed = seed;
    if (active->count("--threads") > 0) spec.threads = threads;

    if (active == run_cmd) {
      for (const std::string& path : bextra::cmd_run(spec, out_dir))
        std::cout << path << "\n";
    } else {
      std::cout << bextra::cmd_sweep(spec, out_dir) << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
