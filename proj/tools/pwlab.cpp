#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pwlab/cli.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  int threads = 1;
  bool print_defaults = false;
};

CLI::App* add_command(CLI::App& parent, const std::string& name, const std::string& help, Flags& flags) {
  CLI::App* sub = parent.add_subcommand(name, help);
  sub->add_option("--config", flags.config, "flat key = value config file (defaults when omitted)")
      ->check(CLI::ExistingFile);
  sub->add_option("--out", flags.out, "output directory (absent or empty)");
  sub->add_option("--seed", flags.seed, "overrides the seed key");
  sub->add_option("--threads", flags.threads, "recorded; computation is sequential")->check(CLI::PositiveNumber);
  sub->add_flag("--print-defaults", flags.print_defaults, "print the resolved default config and exit");
  return sub;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Plane-wave stability lab: pseudospectral Navier-Stokes and Ginzburg-Landau experiments"};
  app.require_subcommand(1);
  Flags flags;

  const std::pair<const char*, const char*> plain[] = {
      {"simulate2d", "2D Navier-Stokes run with exactness and integral-form checks"},
      {"simulate3d", "3D Navier-Stokes run with divergence and integral-form checks"},
      {"planewave-check", "3D evolution of an embedded profile against the embedded 2D evolution"},
      {"picard", "successive approximations for a perturbation of a plane wave"},
      {"stability", "decay of a localized perturbation of a plane wave"},
      {"heatdecay", "heat-semigroup L^q -> L^p ratios for Gaussian data"},
      {"contraction", "empirical Lipschitz ratio of the perturbation map"},
      {"scan", "amplitude scan of pure L^3 data"},
  };
  std::vector<std::pair<CLI::App*, std::string>> subs;
  for (const auto& [name, help] : plain) subs.emplace_back(add_command(app, name, help, flags), name);

  CLI::App* cgl = app.add_subcommand("cgl", "complex Ginzburg-Landau runs");
  cgl->require_subcommand(1);
  subs.emplace_back(add_command(*cgl, "evolve", "evolution with energy-identity checks", flags), "cgl evolve");
  subs.emplace_back(add_command(*cgl, "planewave-check", "plane-wave commutation", flags), "cgl planewave-check");
  subs.emplace_back(add_command(*cgl, "stability", "decay of a perturbation of a plane wave", flags),
                    "cgl stability");

  CLI11_PARSE(app, argc, argv);

  std::string command;
  for (const auto& [sub, name] : subs) {
    if (sub->parsed()) command = name;
  }
  CLI::App* chosen = nullptr;
  for (const auto& [sub, name] : subs) {
    if (name == command) chosen = sub;
  }

  if (flags.print_defaults) {
    try {
      const auto raw = flags.config.empty() ? pwlab::config::parse_text("", "<defaults>")
                                            : pwlab::config::parse_file(flags.config);
      std::cout << pwlab::cli::render_config(pwlab::config::resolve(raw, pwlab::cli::schema_for(command)));
      return 0;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 2;
    }
  }
  if (flags.out.empty()) {
    std::cerr << "error: --out is required\n";
    return 2;
  }

  pwlab::cli::RunOptions opts;
  opts.command = command;
  opts.config = flags.config;
  opts.out = flags.out;
  if (chosen->count("--seed") > 0) opts.seed = flags.seed;
  opts.threads = flags.threads;
  const pwlab::cli::RunResult r = pwlab::cli::run(opts, &std::cout);
  if (!r.error.empty()) std::cerr << "error: " << r.error << '\n';
  return r.exit_code;
}
