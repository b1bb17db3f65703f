#include "auvtrack/world.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <stdexcept>

#include "auvtrack/angles.hpp"

namespace auvtrack {

namespace {

bool finite(const AgentState& s) {
  return std::isfinite(s.p.x()) && std::isfinite(s.p.y()) &&
         std::isfinite(s.theta);
}

// Below this yaw rate the arc is indistinguishable from a line.
constexpr double kStraightYawRate = 1e-12;

}  // namespace

TrajectoryKind parse_trajectory_kind(const std::string& name) {
  if (name == "fixed") return TrajectoryKind::Fixed;
  if (name == "constant-velocity") return TrajectoryKind::ConstantVelocity;
  if (name == "sinusoid") return TrajectoryKind::Sinusoid;
  throw std::invalid_argument("unknown trajectory kind: " + name);
}

std::string to_string(TrajectoryKind kind) {
  switch (kind) {
    case TrajectoryKind::Fixed: return "fixed";
    case TrajectoryKind::ConstantVelocity: return "constant-velocity";
    case TrajectoryKind::Sinusoid: return "sinusoid";
  }
  return "unknown";
}

AgentState step_agent(const AgentState& s, Control u, double dt) {
  if (!finite(s) || !std::isfinite(u.surge) || !std::isfinite(u.yaw_rate)) {
    throw std::invalid_argument("step_agent: non-finite state or control");
  }
  if (!(dt > 0.0)) throw std::invalid_argument("step_agent: dt must be > 0");

  const double surge = std::clamp(u.surge, -s.u_max, s.u_max);
  const double r = std::clamp(u.yaw_rate, -s.r_max, s.r_max);
  if (std::abs(surge - u.surge) > 1e-9 * s.u_max ||
      std::abs(r - u.yaw_rate) > 1e-9 * s.r_max) {
    std::clog << std::setprecision(17) << "[auvtrack] warning: control (" << u.surge << ", "
              << u.yaw_rate << ") clamped to limits\n";
  }

  AgentState out = s;
  const double th0 = s.theta;
  if (std::abs(r) < kStraightYawRate) {
    out.p += surge * dt * Vec2(std::cos(th0), std::sin(th0));
    out.theta = wrap_angle(th0);
  } else {
    const double th1 = th0 + r * dt;
    const double k = surge / r;
    out.p += k * Vec2(std::sin(th1) - std::sin(th0),
                      std::cos(th0) - std::cos(th1));
    out.theta = wrap_angle(th1);
  }
  return out;
}

TargetState target_truth(const TrajectorySpec& traj, double t) {
  if (t < 0.0) throw std::invalid_argument("target_truth: t must be >= 0");
  TargetState x;
  switch (traj.kind) {
    case TrajectoryKind::Fixed:
      x.p = traj.p0;
      break;
    case TrajectoryKind::ConstantVelocity:
      x.p = traj.p0 + traj.v0 * t;
      x.v = traj.v0;
      break;
    case TrajectoryKind::Sinusoid: {
      const double c = std::cos(traj.heading0), s = std::sin(traj.heading0);
      Eigen::Matrix2d rot;
      rot << c, -s, s, c;
      const double phase = traj.omega * t + std::numbers::pi;
      const Vec2 local(traj.v_n * std::sin(phase), traj.v_n * t);
      const Vec2 local_rate(traj.v_n * traj.omega * std::cos(phase), traj.v_n);
      x.p = traj.p0 + rot * local;
      x.v = rot * local_rate;
      break;
    }
  }
  return x;
}

double true_bearing(const Vec2& target_p, const Vec2& sensor_p) {
  const Vec2 d = target_p - sensor_p;
  if (d.x() == 0.0 && d.y() == 0.0) {
    throw std::invalid_argument("bearing undefined for coincident positions");
  }
  return std::atan2(d.y(), d.x());
}

double measure_bearing(const Vec2& target_p, const Vec2& sensor_p,
                       double sigma, std::mt19937_64& rng) {
  const double beta = true_bearing(target_p, sensor_p);
  if (sigma <= 0.0) return wrap_angle(beta);
  std::uniform_real_distribution<double> noise(-sigma, sigma);
  return wrap_angle(beta + noise(rng));
}

}  // namespace auvtrack
