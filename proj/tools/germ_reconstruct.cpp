#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "cli/commands.hpp"
#include "cli/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Reconstruction of coherent germs: batch experiment driver"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  for (const char* name : {"tweak-check", "coherence", "reconstruct", "young", "besov"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON experiment config")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory")->required();
    sub->add_option("--seed", seed, "dictionary seed override");
    sub->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  }
  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  namespace gc = germrec::cli;
  try {
    gc::ExperimentConfig cfg = gc::load_config(config_path, command);
    gc::apply_overrides(cfg, seed, jobs);
    const int code = gc::run_command(cfg, out_dir);
    if (code == gc::kExitCheckFailed) std::cerr << "check failure; see " << out_dir << "/summary.json\n";
    return code;
  } catch (const germrec::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return gc::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return gc::kExitPrecondition;
  }
}
