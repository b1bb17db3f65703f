#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "auvtrack/estimator.hpp"

using namespace auvtrack;

namespace {

Measurement bearing_to(const Vec2& target, const Vec2& obs, double t, AgentId src,
                       double noise = 0.0) {
  Measurement m;
  m.t = t;
  m.bearing = std::atan2(target.y() - obs.y(), target.x() - obs.x()) + noise;
  m.p_obs = obs;
  m.source = src;
  return m;
}

}  // namespace

TEST(Pseudolinear, ExactForTrueBearing) {
  const Vec2 target(40, -25), obs(-7, 12);
  const PseudoMeasurement pm = pseudo_measurement(bearing_to(target, obs, 0, 0));
  EXPECT_NEAR(pm.c.dot(target), pm.z, 1e-12);
  EXPECT_NEAR(pm.c.norm(), 1.0, 1e-15);
}

TEST(Estimator, NoiseFreeConstantVelocity) {
  const Vec2 p0(-30, -100), v(0.3, 0.4);
  const std::vector<Vec2> sensors{Vec2(-17, -23), Vec2(20, -3)};
  std::vector<Measurement> ms;
  for (double t : {0.0, 1.0, 2.0}) {
    for (std::size_t s = 0; s < sensors.size(); ++s) {
      ms.push_back(bearing_to(p0 + t * v, sensors[s] + Vec2(t, 0), t, AgentId(s)));
    }
  }
  const EstimateOutcome out = estimate(ms, 2.0, 0.01);
  ASSERT_EQ(out.status, EstimateStatus::Ok);
  EXPECT_LT((out.estimate->position() - (p0 + 2.0 * v)).norm(), 1e-6);
  EXPECT_LT((out.estimate->velocity() - v).norm(), 1e-6);
  EXPECT_DOUBLE_EQ(out.estimate->t_ref, 2.0);
  EXPECT_EQ(out.estimate->m_used, 6u);
}

TEST(Estimator, CovarianceIsScaledInverseInformation) {
  std::vector<Measurement> ms;
  const Vec2 target(10, 50);
  const std::vector<Vec2> sensors{Vec2(-40, 0), Vec2(30, -10), Vec2(0, 90)};
  for (int k = 0; k < 9; ++k) {
    ms.push_back(bearing_to(target, sensors[k % 3] + Vec2(0.5 * k, 0.0), k / 3, AgentId(k % 3)));
  }
  const double sigma = 0.05;
  const EstimateOutcome out = estimate(ms, ms.front().t, sigma);
  ASSERT_EQ(out.status, EstimateStatus::Ok);
  const Regressor r = build_regressor(ms);
  const Mat4 expected = sigma * sigma * (r.phi.transpose() * r.phi).inverse();
  EXPECT_LT((out.estimate->P - expected).norm() / expected.norm(), 1e-8);
}

TEST(Estimator, TooFewMeasurements) {
  std::vector<Measurement> ms;
  for (int k = 0; k < 3; ++k) ms.push_back(bearing_to(Vec2(1, 1), Vec2(k, -k), k, 0));
  const EstimateOutcome out = estimate(ms, 3.0, 0.1);
  EXPECT_EQ(out.status, EstimateStatus::InsufficientData);
  EXPECT_FALSE(out.estimate.has_value());
}

TEST(Estimator, StaticSensorIsIllConditioned) {
  std::vector<Measurement> ms;
  for (int k = 0; k < 10; ++k) ms.push_back(bearing_to(Vec2(50, 50), Vec2(0, 0), k, 0));
  const EstimateOutcome out = estimate(ms, 10.0, 0.1);
  EXPECT_EQ(out.status, EstimateStatus::IllConditioned);
  EXPECT_FALSE(out.estimate.has_value());
}

TEST(Estimator, RmseDecreasesWithMoreMeasurements) {
  std::mt19937_64 rng(99);
  const double sigma = 3.5 * std::numbers::pi / 180.0;
  std::uniform_real_distribution<double> noise(-sigma, sigma);
  const Vec2 p0(0, 0), v(0.3, 0.3);
  const std::vector<Vec2> sensors{Vec2(60, 0), Vec2(-30, 52), Vec2(-30, -52)};
  // M bearings spread evenly over the same 20 s window, round-robin over the
  // sensors; error measured at the end of the window.
  const double span = 20.0;
  auto rmse = [&](int m_total) {
    double se = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<Measurement> ms;
      for (int k = 0; k < m_total; ++k) {
        const double t = span * k / (m_total - 1);
        const std::size_t s = static_cast<std::size_t>(k % 3);
        ms.push_back(bearing_to(p0 + t * v, sensors[s] + Vec2(0.5 * t, -0.2 * t), t,
                                AgentId(s), noise(rng)));
      }
      const EstimateOutcome out = estimate(ms, span, sigma);
      const Vec2 err = out.estimate ? out.estimate->position() - (p0 + span * v)
                                    : Vec2(1e3, 1e3);
      se += err.squaredNorm();
    }
    return std::sqrt(se / 200.0);
  };
  double prev = rmse(4);
  const double first = prev;
  for (int m = 8; m <= 20; m += 4) {
    const double cur = rmse(m);
    EXPECT_LT(cur, prev) << "M=" << m;
    prev = cur;
  }
  EXPECT_LT(prev, 0.5 * first);
}

TEST(Estimator, PropagateForwardOnly) {
  TargetEstimate e;
  e.xi << 1, 2, 0.5, -1;
  e.P = Mat4::Identity();
  e.t_ref = 10.0;
  const TargetEstimate f = propagate(e, 14.0);
  EXPECT_NEAR(f.xi(0), 3.0, 1e-12);
  EXPECT_NEAR(f.xi(1), -2.0, 1e-12);
  EXPECT_NEAR(f.P(0, 0), 17.0, 1e-12);
  EXPECT_NEAR(f.P(0, 2), 4.0, 1e-12);
  EXPECT_THROW(propagate(e, 9.0), std::invalid_argument);
}

TEST(Buffer, OrderingDuplicatesAndWindow) {
  MeasurementBuffer b(10.0, 5);
  Measurement m;
  m.t = 3;
  EXPECT_TRUE(b.add(m));
  m.t = 1;
  EXPECT_TRUE(b.add(m));
  EXPECT_FALSE(b.add(m));
  m.source = 1;
  EXPECT_TRUE(b.add(m));
  m.bearing = NAN;
  EXPECT_FALSE(b.add(m));
  ASSERT_EQ(b.size(), 3u);
  EXPECT_DOUBLE_EQ(b.entries()[0].t, 1.0);
  EXPECT_DOUBLE_EQ(b.entries()[2].t, 3.0);
  b.prune(12.5);
  EXPECT_EQ(b.size(), 1u);
  for (int k = 0; k < 10; ++k) {
    Measurement n;
    n.t = 20 + k;
    b.add(n);
  }
  EXPECT_EQ(b.size(), 5u);
  EXPECT_DOUBLE_EQ(b.entries().front().t, 25.0);
}
