// Command-line front end: odlab <subcommand> --config FILE [options]
#include <iostream>

#include <CLI11.hpp>

#include "odlab/config.hpp"
#include "odlab/errors.hpp"
#include "odlab/harness.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kRuntimeFailure = 1;
constexpr int kValidationFailure = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Langevin / overdamped experiment harness"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string out_dir = "out";
  bool allow_heavy_tails = false;

  for (const auto& name : odlab::subcommand_names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " recipe");
    sub->add_option("--config", config_path, "experiment config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", out_dir, "output root")->capture_default_str();
    sub->add_flag("--allow-heavy-tails", allow_heavy_tails, "accept initial momenta violating the moment bound");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidationFailure;
  }

  const auto* chosen = app.get_subcommands().front();
  const auto sub = odlab::parse_subcommand(chosen->get_name());
  if (!sub) {
    std::cerr << "unknown subcommand: " << chosen->get_name() << "\n";
    return kValidationFailure;
  }

  try {
    odlab::ExperimentConfig config = odlab::parse_config(config_path, allow_heavy_tails);
    if (chosen->count("--seed") > 0) config.seed = seed;
    const auto result = odlab::run(*sub, config, {out_dir, workers});
    std::cout << result.dir.string() << "\n";
    for (const auto& f : result.files) std::cout << "  " << f << "\n";
    return kOk;
  } catch (const odlab::ValidationError& e) {
    std::cerr << "invalid configuration:\n";
    for (const auto& v : e.violations()) std::cerr << "  - " << v << "\n";
    return kValidationFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
}
