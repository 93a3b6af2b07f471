#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "adia/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"adiabaticity criteria, rigorous bounds, and exact propagation "
               "for time-dependent N-level Hamiltonians"};
  app.require_subcommand(1);

  std::string config, output_dir, param;
  std::vector<double> values;
  std::uint64_t seed = 0;
  int threads = 1;

  auto add_common = [&](CLI::App* c) {
    c->add_option("config", config, "scenario config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    c->add_option("--output-dir", output_dir, "base directory for results");
    c->add_option("--seed", seed, "override the RNG seed for random models");
    c->add_option("--threads", threads, "worker threads for sweep points")
        ->check(CLI::PositiveNumber);
  };

  CLI::App* cmd_run = app.add_subcommand("run", "run one scenario");
  add_common(cmd_run);
  CLI::App* cmd_sweep =
      app.add_subcommand("sweep", "run a scenario across parameter values");
  add_common(cmd_sweep);
  cmd_sweep->add_option("--param", param, "parameter to sweep")->required();
  cmd_sweep->add_option("--values", values, "comma-separated values")
      ->required()
      ->delimiter(',');
  CLI::App* cmd_list =
      app.add_subcommand("list-families", "list model families and their parameters");

  CLI11_PARSE(app, argc, argv);

  if (cmd_list->parsed()) {
    std::cout << adia::list_families();
    return 0;
  }

  std::string ctx = config;
  try {
    adia::Scenario s = adia::load_scenario(config);
    ctx = s.name;
    CLI::App* active = cmd_run->parsed() ? cmd_run : cmd_sweep;
    if (active->count("--seed") > 0) s.seed_override = seed;
    if (!output_dir.empty())
      s.output_dir = (std::filesystem::path(output_dir) / s.name).string();

    if (cmd_run->parsed()) {
      const adia::DiagnosticReport rep = adia::run(s);
      std::cout << rep.text;
      return 0;
    }
    const std::vector<adia::DiagnosticReport> reps =
        adia::sweep(s, param, values, threads);
    for (const adia::DiagnosticReport& r : reps) std::cout << r.text;
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error [" << ctx << "]: " << e.what() << "\n";
    return 1;
  }
}
