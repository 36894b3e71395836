// Command-line front end: configuration-driven singular elliptic experiments.

#include <CLI11.hpp>

#include <iostream>

#include "selab/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"singular elliptic measure laboratory"};
  app.require_subcommand(1);

  std::string config_path, config_a, config_b, out_dir = "out";
  std::string suite = "basic", configs_dir = "configs";
  std::uint64_t seed = 42;

  auto* solve = app.add_subcommand("solve", "solve -div(A grad u) = sigma / u^lambda");
  solve->add_option("--config", config_path, "experiment config")->required();
  solve->add_option("--out", out_dir, "output directory");

  auto* energy = app.add_subcommand("energy", "energy norm report for the configured measure");
  energy->add_option("--config", config_path, "experiment config")->required();

  auto* distance = app.add_subcommand("distance", "d_lambda between two configured measures");
  distance->add_option("--config-a", config_a, "first config")->required();
  distance->add_option("--config-b", config_b, "second config")->required();

  auto* homogenize = app.add_subcommand("homogenize", "H-convergence experiment");
  homogenize->add_option("--config", config_path, "experiment config")->required();
  homogenize->add_option("--out", out_dir, "output directory");

  auto* verify = app.add_subcommand("verify", "run an invariant suite");
  verify->add_option("--suite", suite, "basic or full");
  verify->add_option("--seed", seed, "seed for randomized checks");
  verify->add_option("--configs", configs_dir, "directory with example configs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed())
      return selab::cli::cmd_solve(config_path, out_dir, std::cout, std::cerr);
    if (energy->parsed()) return selab::cli::cmd_energy(config_path, std::cout, std::cerr);
    if (distance->parsed())
      return selab::cli::cmd_distance(config_a, config_b, std::cout, std::cerr);
    if (homogenize->parsed())
      return selab::cli::cmd_homogenize(config_path, out_dir, std::cout, std::cerr);
    if (verify->parsed())
      return selab::cli::cmd_verify(suite, seed, configs_dir, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return 1;
}
