#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ampcrit/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"ampcrit: critical-coupling laboratory for the beamlet-driven linear amplifier"};
  app.require_subcommand(1);

  ampcrit::RunnerOptions opts;
  std::uint64_t seed = 0;
  bool seed_set = false;

  const std::vector<std::string> names = {"simulate", "mu", "critical", "slope", "scan", "verify"};
  const std::vector<std::string> descs = {
      "solve the amplifier once and export a field snapshot",
      "optimize mu_{x,t} and export the maximizer profile",
      "compute lambda_q and lambda_bar_q with their spectra",
      "growth-rate ladder along the optimal direction",
      "classify a lambda grid and optionally sample moments",
      "run the invariant battery against the configured model"};
  for (std::size_t i = 0; i < names.size(); ++i) {
    CLI::App* sub = app.add_subcommand(names[i], descs[i]);
    sub->add_option("--config", opts.config_path, "run configuration file")->required();
    sub->add_option("--seed", seed, "override [run] seed")->each([&](const std::string&) {
      seed_set = true;
    });
    sub->add_option("--out", opts.out_dir, "output directory (default: config, then $AMPCRIT_OUT)");
    sub->add_option("--set", opts.overrides, "override a config key as section.key=value");
    sub->callback([&, i]() { opts.subcommand = names[i]; });
  }

  CLI11_PARSE(app, argc, argv);
  if (seed_set) opts.seed = seed;
  return ampcrit::run_subcommand(opts, std::cout, std::cerr);
}
