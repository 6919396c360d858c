#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "vexfem/config.hpp"
#include "vexfem/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"vexfem: variable-exponent Sobolev space lab (batch experiments)"};
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  app.add_option("--config", config_path, "experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides the config)");
  app.add_option("--seed", seed, "seed override (fixes every pseudo-random draw)");
  app.add_flag("--quiet", quiet, "suppress run log output");
  CLI11_PARSE(app, argc, argv);

  try {
    const vexfem::Config cfg = vexfem::Config::parse_file(config_path);
    vexfem::ExperimentOptions opts;
    opts.out_dir = out_dir;
    opts.seed = seed;
    opts.quiet = quiet;
    return static_cast<int>(vexfem::run_experiment(cfg, opts));
  } catch (const vexfem::ConfigError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  }
}
