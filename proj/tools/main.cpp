#include "cwave/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using Command = int (*)(const cwave::cli::Settings&, const std::filesystem::path&);

struct Options {
  std::string config;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::string out = ".";
};

int run(const Options& o, Command cmd) {
  try {
    cwave::cli::KeyValues kv = o.config.empty() ? cwave::cli::KeyValues{} : cwave::cli::KeyValues::load(o.config);
    for (const auto& s : o.overrides) kv.set(s);
    if (o.seed) kv.set("seed", std::to_string(*o.seed));
    if (o.workers) kv.set("workers", std::to_string(*o.workers));
    return cmd(cwave::cli::settings_from(kv), o.out);
  } catch (const cwave::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coupled waveguides with a potential step: TDSE, Bohmian ensembles, dwell times"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config, "flat key = value file")->check(CLI::ExistingFile);
  app.add_option("--set", o.overrides, "key=value override, repeatable");
  app.add_option("--seed", o.seed, "ensemble seed");
  app.add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", o.out, "output directory");
  app.add_flag_callback(
      "--print-config", [] { cwave::cli::write_defaults(std::cout); std::exit(0); }, "print every key with its default");

  struct Entry {
    const char* name;
    const char* doc;
    Command cmd;
  };
  const Entry commands[] = {
      {"two-state", "coupled-guide populations at a fixed energy", cwave::cli::cmd_two_state},
      {"stationary", "scattering state and guidance fields on a grid", cwave::cli::cmd_stationary},
      {"evolve", "wave packet through the step", cwave::cli::cmd_evolve},
      {"trajectories", "Bohmian ensemble with jumps", cwave::cli::cmd_trajectories},
      {"dwell", "dwell times in the step region", cwave::cli::cmd_dwell},
      {"sweep", "apparent speed over a detuning list", cwave::cli::cmd_sweep},
  };
  Command chosen = nullptr;
  for (const auto& e : commands) {
    app.add_subcommand(e.name, e.doc)->fallthrough()->callback([&chosen, cmd = e.cmd] { chosen = cmd; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return run(o, chosen);
}
