#include <gtest/gtest.h>

#include <algorithm>
#include <string>

#include "auvtrack/config.hpp"

using namespace auvtrack;
using nlohmann::json;

#ifndef AUVTRACK_SOURCE_DIR
#define AUVTRACK_SOURCE_DIR "."
#endif

namespace {

json minimal() {
  return json::parse(R"({
    "duration": 60,
    "agents": [{"position": [0, 0]}, {"position": [100, 0]}, {"position": [0, 100]}],
    "target": {"kind": "fixed", "p0": [50, 300]},
    "tdma": {"slot_duration": 2, "slot_order": [0, 1, 2]},
    "sensing": {"sigma_deg": 3.5}
  })");
}

bool mentions(const std::vector<std::string>& errors, const std::string& needle) {
  return std::any_of(errors.begin(), errors.end(),
                     [&](const std::string& e) { return e.find(needle) != std::string::npos; });
}

}  // namespace

TEST(Config, ShippedScenariosValidate) {
  for (const char* name : {"scenario1", "scenario2", "scenario3", "horizon_sweep", "challenging"}) {
    const std::string path = std::string(AUVTRACK_SOURCE_DIR) + "/configs/" + name + ".json";
    EXPECT_NO_THROW(load_and_validate(path)) << path;
  }
}

TEST(Config, MinimalParsesWithDefaults) {
  const ScenarioConfig cfg = scenario_from_json(minimal());
  EXPECT_TRUE(cfg.validate().empty());
  EXPECT_EQ(cfg.agents.size(), 3u);
  EXPECT_DOUBLE_EQ(cfg.planner.step_duration, 6.0);
  EXPECT_NEAR(cfg.sensing.sigma, 3.5 * 3.14159265358979 / 180.0, 1e-12);
  EXPECT_DOUBLE_EQ(cfg.settle_start(), 20.0);
}

TEST(Config, EnumeratesEveryViolation) {
  json j = minimal();
  j["duration"] = 61;
  j["pdr"] = 1.5;
  j["tdma"]["slot_order"] = {0, 0, 1};
  j["failures"] = json::array({{{"agent", 7}, {"time", 10}}});
  j["agents"][1]["position"] = {1, 0};
  const auto errors = scenario_from_json(j).validate();
  EXPECT_TRUE(mentions(errors, "multiple of tdma.slot_duration"));
  EXPECT_TRUE(mentions(errors, "pdr"));
  EXPECT_TRUE(mentions(errors, "permutation"));
  EXPECT_TRUE(mentions(errors, "unknown agent id 7"));
  EXPECT_TRUE(mentions(errors, "safety_distance"));
  EXPECT_GE(errors.size(), 5u);
}

TEST(Config, IntentMustFitBudget) {
  json j = minimal();
  j["planner"]["horizon"] = 5;  // 32 bytes > 30
  EXPECT_TRUE(mentions(scenario_from_json(j).validate(), "intent block"));
}

TEST(Config, HeadingRangeBoundedByTurnRate) {
  json j = minimal();
  j["planner"]["max_heading_change"] = 0.5;  // r_max * 6 s = 0.3
  EXPECT_TRUE(mentions(scenario_from_json(j).validate(), "r_max"));
}

TEST(Config, SchemaErrorsThrow) {
  json j = minimal();
  j["duration"] = "long";
  j["target"]["kind"] = "spiral";
  try {
    scenario_from_json(j);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_GE(e.errors().size(), 2u);
  }
  EXPECT_THROW(load_scenario("/nonexistent.json"), ConfigError);
}

TEST(Config, FailureAfterDurationAccepted) {
  json j = minimal();
  j["failures"] = json::array({{{"agent", 1}, {"time", 1e6}}});
  EXPECT_TRUE(scenario_from_json(j).validate().empty());
}
