#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "viscoctrl/parallel.hpp"
#include "viscoctrl_cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"viscoctrl: modal simulation and boundary control of waves with memory"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  unsigned threads = 1;
  app.add_option("--config", config_path, "YAML run configuration")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides the config)");
  app.add_option("--threads", threads, "worker threads for mode-parallel loops")->check(CLI::PositiveNumber);

  for (const char* verb : {"resolvent", "simulate", "control", "verify", "sweep"}) {
    app.add_subcommand(verb);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    auto config = viscoctrl::cli::load_config(config_path);
    if (seed_opt->count() > 0) config.seed = seed;
    viscoctrl::set_worker_count(threads);
    const auto verb = app.get_subcommands().front()->get_name();
    const auto outputs = viscoctrl::cli::run_verb(verb, config);
    viscoctrl::cli::commit_outputs(out_dir, outputs);
    for (const auto& [name, content] : outputs) std::cout << out_dir << "/" << name << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "viscoctrl: " << e.what() << "\n";
    return viscoctrl::cli::exit_code_for_current_exception();
  }
}
