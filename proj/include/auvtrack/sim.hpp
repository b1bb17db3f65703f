#pragma once

/**
 * @file sim.hpp
 * @brief Slot-stepped discrete-event harness.
 *
 * Virtual time advances one TDMA slot at a time. At each slot boundary the
 * packets of the previous slot are delivered, the slot owner refreshes its
 * estimate, replans, and broadcasts its intent with its newest bearings;
 * then every vehicle flies its current action through the slot while all
 * sensors sample every T_m. One record is logged per TDMA round.
 */

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "auvtrack/config.hpp"
#include "auvtrack/estimator.hpp"
#include "auvtrack/world.hpp"

namespace auvtrack {

struct AgentRecord {
  AgentId id = 0;
  bool alive = true;
  AgentState pose;
  bool has_estimate = false;
  Vec4 xi = Vec4::Zero();
  double trace_p = 0.0;
  double tracking_error = 0.0;  ///< NaN without an estimate
  double surge = 0.0;
  std::size_t neighbor_count = 0;
  // Objective terms evaluated on the true scene for this agent's neighbor set.
  double geometry = 0.0;
  double distance = 0.0;
  double connectivity = 0.0;
  double planned_cost = 0.0;  ///< optimum of the agent's last plan
  std::size_t evaluations = 0;  ///< sequences costed by the last plan
  double max_heading_change = 0.0;
};

struct RoundRecord {
  long round = 0;
  double t = 0.0;  ///< end of the round
  TargetState target;
  std::vector<AgentRecord> agents;
  double fiedler = 0.0;          ///< true graph over live agents
  double team_geometry = 0.0;    ///< J^(g) of all live agents on the truth
  double mean_spread = 0.0;      ///< mean pairwise distance of live agents
  std::size_t sent = 0;          ///< link-level transmissions this round
  std::size_t delivered = 0;
  std::size_t evaluations = 0;   ///< sequences costed by all planners
};

struct TransmissionRecord {
  long slot = 0;
  double t = 0.0;
  AgentId sender = 0;
  std::size_t bytes = 0;
  std::size_t measurements = 0;
  std::vector<AgentId> attempted;
  std::vector<AgentId> delivered;
};

struct RunLog {
  std::string scenario;
  std::uint64_t seed = 0;
  std::size_t agent_count = 0;
  double round_duration = 0.0;
  double settle_start = 0.0;
  std::vector<RoundRecord> rounds;
  std::vector<TransmissionRecord> transmissions;

  /// Tidy CSV, one row per (round, agent).
  std::string to_csv() const;
  nlohmann::json summary() const;

  /// Mean tracking error over live agents with estimates, for rounds ending
  /// at or after t_from.
  double mean_tracking_error(double t_from) const;
};

/// Euclidean position error.
double tracking_error(const TargetEstimate& est, const TargetState& truth);

/// Applies random placement (if configured) using the placement stream.
ScenarioConfig resolve_placement(const ScenarioConfig& cfg);

/// Runs one scenario. Throws ConfigError if the config is invalid.
RunLog run_scenario(const ScenarioConfig& cfg);

struct SweepRow {
  int horizon = 0;
  double mean_error = 0.0;
  std::vector<double> per_seed;
};

/// Seed-mean post-convergence tracking error per horizon; seeds are
/// cfg.seed, cfg.seed + 1, ...
std::vector<SweepRow> horizon_sweep(const ScenarioConfig& cfg,
                                    const std::vector<int>& horizons,
                                    int n_seeds);

/// Writes rounds.csv and summary.json into dir (created if needed).
void write_run(const RunLog& log, const std::string& dir);

}  // namespace auvtrack
