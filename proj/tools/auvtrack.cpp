#include <cstdlib>
#include <cstring>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "auvtrack/config.hpp"
#include "auvtrack/sim.hpp"

namespace {

using nlohmann::json;

int report_config_error(const auvtrack::ConfigError& e) {
  json out = {{"ok", false}, {"errors", e.errors()}};
  std::cout << out.dump(2) << '\n';
  return 2;
}

std::vector<int> parse_horizons(const std::string& text) {
  std::vector<int> hs;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) hs.push_back(std::stoi(item));
  }
  return hs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative bearing-only tracking simulator"};
  app.require_subcommand(1);

  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  auto* run = app.add_subcommand("run", "Run one scenario and write rounds.csv and summary.json");
  run->add_option("config", config, "scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "override the master seed");
  run->add_option("--out", out_dir, "output directory");

  std::string horizons = "1,2,3,4";
  int seeds = 10;
  auto* sweep = app.add_subcommand("sweep", "Mean tracking error per planning horizon");
  sweep->add_option("config", config, "scenario file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--horizons", horizons, "comma-separated horizons");
  sweep->add_option("--seeds", seeds, "seeds per horizon")->check(CLI::Range(2, 100000));
  sweep->add_option("--seed", seed, "first seed");

  auto* validate = app.add_subcommand("validate", "Check a scenario file");
  validate->add_option("config", config, "scenario file")->required();

  CLI11_PARSE(app, argc, argv);

  if (const char* level = std::getenv("AUVTRACK_LOG"); level && std::strcmp(level, "quiet") == 0) {
    std::clog.setstate(std::ios::failbit);
  }

  try {
    if (*validate) {
      const auvtrack::ScenarioConfig cfg = auvtrack::load_and_validate(config);
      json out = {{"ok", true},
                  {"name", cfg.name},
                  {"agents", cfg.agents.size()},
                  {"rounds", static_cast<long>(cfg.duration / cfg.round_duration())}};
      std::cout << out.dump(2) << '\n';
      return 0;
    }

    auvtrack::ScenarioConfig cfg = auvtrack::load_and_validate(config);
    if (seed) cfg.seed = *seed;

    if (*run) {
      const auvtrack::RunLog log = auvtrack::run_scenario(cfg);
      auvtrack::write_run(log, out_dir);
      std::cout << log.summary().dump(2) << '\n';
      return 0;
    }

    const auto rows = auvtrack::horizon_sweep(cfg, parse_horizons(horizons), seeds);
    std::cout << "horizon,mean_error";
    for (int s = 0; s < seeds; ++s) std::cout << ",seed_" << cfg.seed + s;
    std::cout << '\n';
    for (const auto& r : rows) {
      std::cout << r.horizon << ',' << r.mean_error;
      for (double e : r.per_seed) std::cout << ',' << e;
      std::cout << '\n';
    }
    return 0;
  } catch (const auvtrack::ConfigError& e) {
    return report_config_error(e);
  } catch (const std::exception& e) {
    json out = {{"ok", false}, {"errors", {e.what()}}};
    std::cout << out.dump(2) << '\n';
    return 1;
  }
}
