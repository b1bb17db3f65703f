#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "auvtrack/channel.hpp"
#include "auvtrack/planner.hpp"
#include "auvtrack/world.hpp"

namespace auvtrack {

struct AgentConfig {
  AgentState initial;
  ModemConfig modem;
};

struct SensingConfig {
  double period = 1.0;        ///< T_m, s
  double sigma = 0.0;         ///< half-width of the uniform bearing noise, rad
  double window = 20.0;       ///< estimator window, s
  std::size_t capacity = 40;  ///< estimator buffer size
};

/// Random start inside a square box (positions respect the safety distance).
struct PlacementConfig {
  Vec2 origin = Vec2::Zero();
  double size = 200.0;
  bool random_agent_heading = true;
  bool random_target_heading = false;
};

struct FailureEvent {
  AgentId agent = 0;
  double time = 0.0;
};

struct ScenarioConfig {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  double duration = 600.0;
  double pdr = 1.0;
  std::vector<AgentConfig> agents;
  TrajectorySpec target;
  TdmaConfig tdma;
  PlannerParams planner;
  SensingConfig sensing;
  std::vector<FailureEvent> failures;
  std::optional<PlacementConfig> placement;
  bool planner_enabled = true;
  bool adaptive_granularity = true;
  double hold_surge = 0.5;        ///< surge used when the planner is disabled
  int neighbor_timeout_rounds = 3;
  double settle_time = -1.0;      ///< start of the post-convergence window; < 0: duration / 3

  double round_duration() const { return tdma.round_duration(); }
  double settle_start() const { return settle_time >= 0.0 ? settle_time : duration / 3.0; }

  /// Every violated invariant, empty when valid.
  std::vector<std::string> validate() const;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

/// Parses without validating; throws ConfigError on schema problems.
ScenarioConfig scenario_from_json(const nlohmann::json& j);
ScenarioConfig load_scenario(const std::string& path);

/// Parse and validate; throws ConfigError listing every problem.
ScenarioConfig load_and_validate(const std::string& path);

}  // namespace auvtrack
