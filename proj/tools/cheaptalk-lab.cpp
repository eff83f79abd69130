#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "cheaptalk/harness/scenarios.hpp"

namespace ch = cheaptalk::harness;

int main(int argc, char** argv) {
  CLI::App app{"Cheap-talk rating game lab: equilibria, losses, mechanisms and simulations"};
  app.set_version_flag("--version", "cheaptalk-lab 1.0");

  std::string scenario;
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> samples;

  app.add_option("scenario", scenario, "pbe | loss_curve | benchmark | evolving | compare | simulate | figure")
      ->required()
      ->check(CLI::IsMember({"pbe", "loss_curve", "benchmark", "evolving", "compare", "simulate", "figure"}));
  app.add_option("--config", config_path, "JSON experiment configuration")->required();
  app.add_option("--out", out_dir, "output directory (default: $CHEAPTALK_LAB_OUT or .)");
  app.add_option("--seed", seed, "RNG seed for simulations");
  app.add_option("--samples", samples, "Monte Carlo samples or episodes")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = ch::load_experiment(ch::scenario_from_string(scenario), ch::read_json_file(config_path));
    if (seed) cfg.seed = *seed;
    if (samples) cfg.samples = *samples;

    std::filesystem::path dir = ".";
    if (out_dir) {
      dir = *out_dir;
    } else if (const char* env = std::getenv("CHEAPTALK_LAB_OUT"); env && *env) {
      dir = env;
    }

    const auto result = ch::run_scenario(cfg);
    for (const auto& path : ch::write_outputs(cfg, result, dir)) std::cout << path.string() << '\n';
    return 0;
  } catch (const cheaptalk::InvalidConfig& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return 2;
  } catch (const cheaptalk::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}
