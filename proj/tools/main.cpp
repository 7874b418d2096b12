#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "cli/config.hpp"
#include "cli/experiments.hpp"
#include "cli/presets.hpp"

namespace {

using namespace activemedia::cli;

// Exit codes: 0 success, 1 runtime failure, 2 configuration error.
int run_one(const ExperimentConfig& config) {
  const ExperimentResult result = run_experiment(config);
  const auto record = write_result(config, result);
  std::cout << config.name << ": " << record.string() << '\n';
  return 0;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase oscillators coupled through excitable media: experiments and figure presets"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> run_out;
  auto* run = app.add_subcommand("run", "Run the experiment described by an INI config");
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--out", run_out, "Override output.dir");

  std::string figure;
  PresetOptions preset_options;
  std::optional<std::uint64_t> seed;
  auto* reproduce = app.add_subcommand("reproduce", "Run the desk-scale preset for a figure");
  reproduce->add_option("figure", figure, "Figure id")->required()->check(CLI::IsMember(preset_ids()));
  reproduce->add_option("--out", preset_options.out_dir, "Output directory")->capture_default_str();
  reproduce->add_option("--seed", seed, "Seed for every experiment in the preset");
  reproduce->add_option("--scale", preset_options.scale, "Grid resolution multiplier")->capture_default_str();

  auto* list = app.add_subcommand("list", "List figure ids");

  CLI11_PARSE(app, argc, argv);

  if (*list) {
    for (const auto& id : preset_ids()) std::cout << id << '\n';
    return 0;
  }
  if (*run) {
    return guarded([&] {
      ExperimentConfig config = load_config(config_path);
      if (run_out) config.out_dir = *run_out;
      return run_one(config);
    });
  }
  return guarded([&] {
    preset_options.seed = seed;
    const auto configs = preset(figure, preset_options);
    for (const auto& c : configs) validate(c);
    for (const auto& c : configs) run_one(c);
    return 0;
  });
}
