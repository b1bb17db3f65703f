#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "auvtrack/sim.hpp"

using namespace auvtrack;

namespace {

ScenarioConfig base_scenario() {
  ScenarioConfig cfg;
  cfg.name = "unit";
  cfg.seed = 5;
  cfg.duration = 120.0;
  cfg.pdr = 0.9;
  cfg.tdma.slot_duration = 2.0;
  cfg.tdma.slot_order = {0, 1, 2};
  ModemConfig modem;
  modem.bitrate = 240.0;
  const std::vector<Vec2> start{Vec2(-17, -23), Vec2(-10, 5), Vec2(20, -3)};
  for (const Vec2& p : start) {
    AgentConfig a;
    a.initial.p = p;
    a.initial.theta = -1.5;
    a.modem = modem;
    cfg.agents.push_back(a);
  }
  cfg.target.kind = TrajectoryKind::ConstantVelocity;
  cfg.target.p0 = Vec2(-30, -100);
  cfg.target.v0 = Vec2(0.3, 0.3);
  cfg.sensing.sigma = 3.5 * 3.14159265358979 / 180.0;
  cfg.sensing.window = 30.0;
  cfg.sensing.capacity = 60;
  cfg.planner.horizon = 2;
  cfg.planner.desired_range = 40.0;
  cfg.planner.max_range = 300.0;
  cfg.planner.step_duration = cfg.round_duration();
  return cfg;
}

}  // namespace

TEST(TrackingError, Euclidean) {
  TargetEstimate e;
  TargetState t;
  EXPECT_DOUBLE_EQ(tracking_error(e, t), 0.0);
  e.xi << 3, 4, 9, 9;
  EXPECT_DOUBLE_EQ(tracking_error(e, t), 5.0);
}

TEST(Sim, DeterministicLog) {
  const ScenarioConfig cfg = base_scenario();
  const RunLog a = run_scenario(cfg), b = run_scenario(cfg);
  EXPECT_EQ(a.to_csv(), b.to_csv());
  EXPECT_EQ(a.summary().dump(), b.summary().dump());
  ScenarioConfig other = cfg;
  other.seed = 6;
  EXPECT_NE(run_scenario(other).to_csv(), a.to_csv());
}

TEST(Sim, RecordStructure) {
  const ScenarioConfig cfg = base_scenario();
  const RunLog log = run_scenario(cfg);
  ASSERT_EQ(log.rounds.size(), 20u);
  for (std::size_t k = 0; k < log.rounds.size(); ++k) {
    EXPECT_EQ(log.rounds[k].round, static_cast<long>(k));
    EXPECT_DOUBLE_EQ(log.rounds[k].t, 6.0 * (k + 1));
    EXPECT_EQ(log.rounds[k].agents.size(), 3u);
  }
  std::set<long> slots;
  for (const auto& tx : log.transmissions) {
    EXPECT_TRUE(slots.insert(tx.slot).second) << "two transmissions in slot " << tx.slot;
    EXPECT_LE(tx.delivered.size(), tx.attempted.size());
    EXPECT_LE(tx.bytes, 1u + 60u);
  }
  EXPECT_EQ(log.transmissions.size(), 60u);
}

TEST(Sim, NoTeleportationAndEvaluationBound) {
  const ScenarioConfig cfg = base_scenario();
  const RunLog log = run_scenario(cfg);
  const double bound = 1.0 * cfg.round_duration() + 1e-9;
  for (std::size_t k = 1; k < log.rounds.size(); ++k) {
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_LE((log.rounds[k].agents[i].pose.p - log.rounds[k - 1].agents[i].pose.p).norm(),
                bound);
    }
    EXPECT_LE(log.rounds[k].evaluations, 3u * 49u);
    EXPECT_LE(log.rounds[k].delivered, log.rounds[k].sent);
  }
}

TEST(Sim, PerfectChannelDeliversEverything) {
  ScenarioConfig cfg = base_scenario();
  cfg.pdr = 1.0;
  const RunLog log = run_scenario(cfg);
  for (const auto& r : log.rounds) EXPECT_EQ(r.delivered, r.sent);
}

TEST(Sim, ZeroNoiseStraightLineConverges) {
  ScenarioConfig cfg = base_scenario();
  cfg.sensing.sigma = 0.0;
  cfg.pdr = 1.0;
  cfg.planner_enabled = false;
  cfg.target.kind = TrajectoryKind::Fixed;
  const RunLog log = run_scenario(cfg);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(log.rounds.back().agents[i].pose.theta, cfg.agents[i].initial.theta, 1e-12);
  }
  for (const auto& a : log.rounds.back().agents) {
    ASSERT_TRUE(a.has_estimate);
    // Shared bearings travel as single precision.
    EXPECT_LT(a.tracking_error, 1e-4);
  }
}

TEST(Sim, FailureStopsAgent) {
  ScenarioConfig cfg = base_scenario();
  cfg.failures = {{1, 30.0}};
  const RunLog log = run_scenario(cfg);
  const Vec2 frozen = log.rounds[5].agents[1].pose.p;
  for (const auto& r : log.rounds) {
    if (r.t <= 30.0) continue;
    EXPECT_FALSE(r.agents[1].alive);
    EXPECT_EQ(r.agents[1].pose.p, frozen);
    EXPECT_EQ(r.agents[0].neighbor_count + r.agents[2].neighbor_count <= 4, true);
  }
  for (const auto& tx : log.transmissions) {
    if (tx.t >= 30.0) {
      EXPECT_NE(tx.sender, 1);
    }
  }
  // After the timeout the survivors no longer count the failed peer.
  EXPECT_EQ(log.rounds.back().agents[0].neighbor_count, 1u);
}

TEST(Sim, LateFailureHasNoEffect) {
  ScenarioConfig cfg = base_scenario();
  const RunLog ref = run_scenario(cfg);
  cfg.failures = {{2, 1e6}};
  EXPECT_EQ(run_scenario(cfg).to_csv(), ref.to_csv());
}

TEST(Sim, SingleSurvivorStillRuns) {
  ScenarioConfig cfg = base_scenario();
  cfg.failures = {{0, 12.0}, {2, 12.0}};
  const RunLog log = run_scenario(cfg);
  EXPECT_EQ(log.rounds.size(), 20u);
  EXPECT_TRUE(log.rounds.back().agents[1].alive);
}

TEST(Sim, InvalidConfigRejected) {
  ScenarioConfig cfg = base_scenario();
  cfg.duration = 121.0;
  EXPECT_THROW(run_scenario(cfg), ConfigError);
}

TEST(Sim, RandomPlacementRespectsSafetyDistance) {
  ScenarioConfig cfg = base_scenario();
  cfg.placement = PlacementConfig{Vec2(0, 0), 200.0, true, true};
  cfg.planner.safety_distance = 100.0;
  const ScenarioConfig placed = resolve_placement(cfg);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_GE(placed.agents[i].initial.p.minCoeff(), 0.0);
    EXPECT_LE(placed.agents[i].initial.p.maxCoeff(), 200.0);
    for (std::size_t j = i + 1; j < 3; ++j) {
      EXPECT_GE((placed.agents[i].initial.p - placed.agents[j].initial.p).norm(), 100.0);
    }
  }
  EXPECT_EQ(resolve_placement(cfg).agents[2].initial.p, placed.agents[2].initial.p);
}

TEST(Sweep, SingleHorizonSingleRowAndDeterministic) {
  ScenarioConfig cfg = base_scenario();
  cfg.duration = 60.0;
  const auto a = horizon_sweep(cfg, {2}, 2);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].per_seed.size(), 2u);
  const auto b = horizon_sweep(cfg, {2}, 2);
  EXPECT_EQ(a[0].mean_error, b[0].mean_error);
  EXPECT_THROW(horizon_sweep(cfg, {2}, 1), std::invalid_argument);
}
