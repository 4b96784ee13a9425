#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "cvae/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Collective variational autoencoder for top-N recommendation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string workdir;
  std::vector<std::string> overrides;

  using Command = int (*)(const cvae::cli::RunConfig&, std::ostream&);
  const std::vector<std::tuple<const char*, const char*, Command>> commands{
      {"ingest", "Parse ratings and reviews into cached matrices", cvae::cli::cmd_ingest},
      {"train", "Train cvae, fvae or rvae on the cached data", cvae::cli::cmd_train},
      {"eval", "Evaluate a checkpoint with Rec/Pre/MAP@N", cvae::cli::cmd_eval},
      {"gradcheck", "Compare ELBO gradients with finite differences", cvae::cli::cmd_gradcheck},
      {"bench-synth", "Compare methods on synthetic block data", cvae::cli::cmd_bench_synth},
  };

  Command selected = nullptr;
  for (const auto& [name, help, fn] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "key = value configuration file");
    sub->add_option("--set", overrides, "Override a setting (key=value), repeatable");
    sub->add_option("--workdir", workdir, "Directory for inputs/outputs");
    sub->callback([&selected, fn = fn] { selected = fn; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    cvae::cli::RunConfig config =
        config_path.empty() ? cvae::cli::RunConfig{} : cvae::cli::RunConfig::load(config_path);
    for (const auto& kv : overrides) config.set_assignment(kv);
    if (!workdir.empty()) config.set("workdir", workdir);
    return selected(config, std::cout);
  } catch (const cvae::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
