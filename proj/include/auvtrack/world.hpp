#pragma once

/**
 * @file world.hpp
 * @brief Ground-truth kinematics of the tracking agents and the acoustic
 *        source, plus the bounded-noise bearing sensor.
 */

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string>

namespace auvtrack {

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;
using AgentId = std::uint8_t;

/// Position and velocity of the acoustic source in the inertial plane.
struct TargetState {
  Vec2 p = Vec2::Zero();
  Vec2 v = Vec2::Zero();

  Vec4 stacked() const { return (Vec4() << p, v).finished(); }
};

/// Planar pose of one vehicle plus its actuation limits.
struct AgentState {
  Vec2 p = Vec2::Zero();
  double theta = 0.0;  ///< heading, wrapped to (-pi, pi]
  double u_max = 1.0;  ///< max surge, m/s
  double r_max = 0.05; ///< max yaw rate, rad/s
};

/// Kinematic input: surge speed and yaw rate.
struct Control {
  double surge = 0.0;
  double yaw_rate = 0.0;
};

/// Timestamped bearing with the observer position at capture time.
struct Measurement {
  double t = 0.0;
  double bearing = 0.0;
  Vec2 p_obs = Vec2::Zero();
  AgentId source = 0;
};

enum class TrajectoryKind { Fixed, ConstantVelocity, Sinusoid };

TrajectoryKind parse_trajectory_kind(const std::string& name);
std::string to_string(TrajectoryKind kind);

struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::Fixed;
  Vec2 p0 = Vec2::Zero();
  Vec2 v0 = Vec2::Zero();  ///< constant-velocity only
  double v_n = 0.5;        ///< sinusoid track speed / weave amplitude
  double omega = 0.01;     ///< sinusoid angular rate, rad/s
  double heading0 = 0.0;   ///< sinusoid track direction, rad
};

/**
 * @brief Integrates the unicycle model exactly over dt.
 *
 * Controls beyond the agent limits are clamped. Arcs are integrated in
 * closed form so the result does not depend on how dt is subdivided.
 */
AgentState step_agent(const AgentState& s, Control u, double dt);

/// Analytic target state at time t.
TargetState target_truth(const TrajectorySpec& traj, double t);

/// True line-of-sight bearing from sensor to target.
double true_bearing(const Vec2& target_p, const Vec2& sensor_p);

/// Bearing corrupted by noise uniform on [-sigma, +sigma], wrapped.
double measure_bearing(const Vec2& target_p, const Vec2& sensor_p,
                       double sigma, std::mt19937_64& rng);

}  // namespace auvtrack
