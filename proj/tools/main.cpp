#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Decay experiments for time-fractional equations with CM-preserving schemes"};
  app.require_subcommand(1);

  std::string config;
  cmfrac::cli::RunOptions opts;
  std::string out = ".";
  for (const char* name : {"weights", "ode", "envelope", "pde", "report"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "JSON experiment config")->required();
    sub->add_option("--out", out, "output directory");
    sub->add_option("--threads", opts.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--full-resolution", opts.full_resolution, "PDE runs use h = 1/150");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cmfrac::cli::kConfigFailure;
  }
  opts.out_dir = out;
  const std::string kind = app.get_subcommands().front()->get_name();
  return cmfrac::cli::run_command(kind, config, opts);
}
