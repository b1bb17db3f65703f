#pragma once

/**
 * @file estimator.hpp
 * @brief Share-and-estimate bearing-only tracker.
 *
 * Bearings are turned into pseudolinear measurements
 *
 *   z = sin(b) * x_obs - cos(b) * y_obs = [sin b, -cos b] * p_target,
 *
 * which are linear in the target position. Under the constant-velocity model
 * p(t) = p(t0) + (t - t0) v, a moving window of such measurements stacks
 * into a linear regression on xi(t0) = (p, v) solved by weighted least
 * squares, then propagated to the query time.
 */

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

#include "auvtrack/world.hpp"

namespace auvtrack {

/// Time-ordered moving window of local and received bearings.
class MeasurementBuffer {
 public:
  MeasurementBuffer(double window_s, std::size_t capacity);

  /// Inserts in time order. Returns false for a duplicate (same source and
  /// timestamp) or a non-finite measurement.
  bool add(const Measurement& m);

  /// Drops everything older than t_now - window.
  void prune(double t_now);

  std::span<const Measurement> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  double window() const { return window_; }
  std::size_t capacity() const { return capacity_; }

 private:
  double window_;
  std::size_t capacity_;
  std::vector<Measurement> entries_;
};

struct TargetEstimate {
  Vec4 xi = Vec4::Zero();  ///< (px, py, vx, vy)
  Mat4 P = Mat4::Zero();
  double t_ref = 0.0;
  std::size_t m_used = 0;

  Vec2 position() const { return xi.head<2>(); }
  Vec2 velocity() const { return xi.tail<2>(); }
};

struct PseudoMeasurement {
  double z = 0.0;
  Vec2 c = Vec2::Zero();
};

PseudoMeasurement pseudo_measurement(const Measurement& m);

struct Regressor {
  Eigen::MatrixXd phi;  ///< M x 4
  Eigen::VectorXd z;    ///< M
  double t0 = 0.0;      ///< earliest timestamp
};

/// Stacks one row [c, (t - t0) c] per measurement. Throws on empty input.
Regressor build_regressor(std::span<const Measurement> measurements);

enum class EstimateStatus { Ok, InsufficientData, IllConditioned };

const char* to_string(EstimateStatus status);

struct EstimateOutcome {
  EstimateStatus status = EstimateStatus::InsufficientData;
  std::optional<TargetEstimate> estimate;
  double min_singular_value = 0.0;
};

inline constexpr std::size_t kMinMeasurements = 4;
inline constexpr double kMinSingularValue = 1e-6;

/**
 * Batch WLS fit of the window with R = sigma^2 I, propagated to t_now.
 * Fewer than four measurements or a regressor whose smallest singular value
 * is below 1e-6 yield a non-Ok status and no estimate.
 */
EstimateOutcome estimate(std::span<const Measurement> measurements,
                         double t_now, double sigma);

/// Constant-velocity state transition over dt.
Mat4 transition(double dt);

/// Advances the estimate to t >= t_ref. Throws if t < t_ref.
TargetEstimate propagate(const TargetEstimate& est, double t);

}  // namespace auvtrack
