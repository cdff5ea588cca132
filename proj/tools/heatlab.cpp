#include <CLI11.hpp>
#include <iostream>

#include "heatlab/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"heatlab: uniqueness-class experiments for the heat equation"};
  app.require_subcommand(1, 1);

  heatlab::RunConfig rc;
  std::string config, out = ".";
  for (auto sub : {heatlab::Subcommand::osgood, heatlab::Subcommand::schedule, heatlab::Subcommand::evolve,
                   heatlab::Subcommand::estimate, heatlab::Subcommand::example, heatlab::Subcommand::report}) {
    auto* cmd = app.add_subcommand(heatlab::to_string(sub));
    cmd->add_option("--config", config, "config file")->required();
    cmd->add_option("--out", out, "output directory")->capture_default_str();
    cmd->add_option("--seed", rc.seed, "seed for sampled checks")->capture_default_str();
    cmd->add_option("--threads", rc.threads, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--tol", rc.tol, "relative quadrature tolerance")->capture_default_str()->check(CLI::Range(1e-14, 0.5));
    cmd->callback([&rc, sub] { rc.subcommand = sub; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : heatlab::exit_usage;
  }
  rc.config_path = config;
  rc.out_dir = out;
  const auto outcome = heatlab::run(rc);
  if (outcome.status != heatlab::exit_ok) std::cerr << "heatlab: " << outcome.diagnostic << "\n";
  return outcome.status;
}
