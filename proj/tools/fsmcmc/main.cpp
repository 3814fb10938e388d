#include <cstdint>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fsmcmc/runner/run.hpp"
#include "fsmcmc/version.hpp"

namespace {

struct SubArgs {
  std::string kind;  // config "kind" this subcommand expects
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out;
  CLI::App* sub = nullptr;
};

int run_subcommand(const SubArgs& args) {
  fsmcmc::ExperimentConfig config;
  try {
    config = fsmcmc::load_config(args.config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (fsmcmc::experiment_kind_name(config.kind) != args.kind) {
    std::cerr << "error: config kind '"
              << fsmcmc::experiment_kind_name(config.kind)
              << "' does not match subcommand '" << args.kind << "'\n";
    return 2;
  }
  if (args.seed_given) config.seed = args.seed;
  if (!args.out.empty()) config.output_dir = args.out;

  const fsmcmc::RunOutcome outcome = fsmcmc::run_experiment(config);
  if (outcome.exit_code != 0)
    std::cerr << "error: " << outcome.message << "\n";
  else
    std::cout << "wrote " << config.output_dir << "\n";
  return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dimension-robust MCMC for Gaussian random-field posteriors"};
  app.set_version_flag("--version", fsmcmc::kVersion);
  app.require_subcommand(1);

  // CLI subcommand "twin" maps to the config kind "twin-generate".
  const std::pair<const char*, const char*> kinds[] = {
      {"sample", "sample"},      {"sweep", "sweep"},
      {"tune", "tune"},          {"compare", "compare"},
      {"twin", "twin-generate"}, {"validate", "validate"}};

  std::vector<std::unique_ptr<SubArgs>> subs;
  for (const auto& [name, kind] : kinds) {
    auto args = std::make_unique<SubArgs>();
    args->kind = kind;
    args->sub = app.add_subcommand(
        name, std::string("Run a ") + kind + " experiment");
    args->sub->add_option("--config", args->config_path,
                          "Experiment config (JSON)")
        ->required();
    args->sub
        ->add_option("--seed", args->seed, "Override the config seed")
        ->trigger_on_parse()
        ->each([a = args.get()](const std::string&) { a->seed_given = true; });
    args->sub->add_option("--out", args->out, "Override the output directory");
    subs.push_back(std::move(args));
  }

  CLI11_PARSE(app, argc, argv);

  for (const auto& args : subs)
    if (args->sub->parsed()) return run_subcommand(*args);
  std::cerr << "error: no subcommand\n";
  return 2;
}
