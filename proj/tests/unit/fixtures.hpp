#pragma once

#include <random>

#include "auvtrack/planner.hpp"

namespace auvtrack::fixtures {

inline Mat4 random_psd(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Mat4 a;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = n01(rng);
  return scale * a * a.transpose();
}

// Random three-agent planning instance around a target near the origin.
inline Belief random_belief(std::mt19937_64& rng, int horizon) {
  std::uniform_real_distribution<double> pos(-150.0, 150.0);
  std::uniform_real_distribution<double> ang(-3.14159, 3.14159);
  std::uniform_real_distribution<double> inc(-0.3, 0.3);
  std::uniform_real_distribution<double> vel(-0.5, 0.5);
  Belief b;
  b.id = 0;
  b.time = 60.0;
  b.own.p = Vec2(pos(rng), pos(rng));
  b.own.theta = ang(rng);
  for (AgentId j = 1; j <= 2; ++j) {
    NeighborInfo info;
    info.pose.p = Vec2(pos(rng), pos(rng));
    info.pose.theta = ang(rng);
    info.pose_time = 54.0;
    info.intent.surge = 0.8;
    for (int h = 0; h < horizon; ++h) info.intent.headings.push_back(inc(rng));
    b.neighbors[j] = info;
  }
  TargetEstimate est;
  est.xi << pos(rng) * 0.2, pos(rng) * 0.2, vel(rng), vel(rng);
  est.P = random_psd(rng, 4.0);
  est.P.bottomRightCorner<2, 2>() *= 0.01;
  est.P = 0.5 * (est.P + est.P.transpose());
  est.t_ref = 60.0;
  b.target = est;
  return b;
}

}  // namespace auvtrack::fixtures
