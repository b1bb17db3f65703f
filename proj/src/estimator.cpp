#include "auvtrack/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace auvtrack {

MeasurementBuffer::MeasurementBuffer(double window_s, std::size_t capacity)
    : window_(window_s), capacity_(capacity) {
  if (!(window_s > 0.0) || capacity == 0) {
    throw std::invalid_argument("measurement window and capacity must be > 0");
  }
}

bool MeasurementBuffer::add(const Measurement& m) {
  if (!std::isfinite(m.t) || !std::isfinite(m.bearing) ||
      !std::isfinite(m.p_obs.x()) || !std::isfinite(m.p_obs.y())) {
    return false;
  }
  auto earlier = [](const Measurement& a, const Measurement& b) {
    return a.t < b.t || (a.t == b.t && a.source < b.source);
  };
  auto it = std::lower_bound(entries_.begin(), entries_.end(), m, earlier);
  if (it != entries_.end() && it->t == m.t && it->source == m.source) {
    return false;
  }
  entries_.insert(it, m);
  if (entries_.size() > capacity_) {
    entries_.erase(entries_.begin(),
                   entries_.begin() + (entries_.size() - capacity_));
  }
  return true;
}

void MeasurementBuffer::prune(double t_now) {
  const double cutoff = t_now - window_;
  auto first_kept = std::find_if(entries_.begin(), entries_.end(),
                                 [&](const Measurement& m) { return m.t >= cutoff; });
  entries_.erase(entries_.begin(), first_kept);
}

PseudoMeasurement pseudo_measurement(const Measurement& m) {
  const double s = std::sin(m.bearing), c = std::cos(m.bearing);
  return {s * m.p_obs.x() - c * m.p_obs.y(), Vec2(s, -c)};
}

Regressor build_regressor(std::span<const Measurement> measurements) {
  if (measurements.empty()) {
    throw std::invalid_argument("build_regressor: empty buffer");
  }
  Regressor r;
  r.t0 = std::min_element(measurements.begin(), measurements.end(),
                          [](const auto& a, const auto& b) { return a.t < b.t; })
             ->t;
  const auto rows = static_cast<Eigen::Index>(measurements.size());
  r.phi.resize(rows, 4);
  r.z.resize(rows);
  for (Eigen::Index k = 0; k < rows; ++k) {
    const auto& m = measurements[static_cast<std::size_t>(k)];
    const PseudoMeasurement pm = pseudo_measurement(m);
    const double dt = m.t - r.t0;
    r.phi.row(k) << pm.c.x(), pm.c.y(), dt * pm.c.x(), dt * pm.c.y();
    r.z(k) = pm.z;
  }
  return r;
}

const char* to_string(EstimateStatus status) {
  switch (status) {
    case EstimateStatus::Ok: return "ok";
    case EstimateStatus::InsufficientData: return "insufficient-data";
    case EstimateStatus::IllConditioned: return "ill-conditioned";
  }
  return "unknown";
}

Mat4 transition(double dt) {
  Mat4 F = Mat4::Identity();
  F(0, 2) = dt;
  F(1, 3) = dt;
  return F;
}

EstimateOutcome estimate(std::span<const Measurement> measurements,
                         double t_now, double sigma) {
  EstimateOutcome out;
  if (measurements.size() < kMinMeasurements) return out;
  if (!(sigma > 0.0)) throw std::invalid_argument("estimate: sigma must be > 0");

  const Regressor reg = build_regressor(measurements);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(reg.phi,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::Vector4d sv = svd.singularValues();
  out.min_singular_value = sv(3);
  if (sv(3) < kMinSingularValue) {
    out.status = EstimateStatus::IllConditioned;
    return out;
  }

  // With R = sigma^2 I the weights cancel in the mean; the pseudoinverse
  // solution is the WLS solution.
  const Vec4 xi0 = svd.solve(reg.z);
  const Mat4 V = svd.matrixV();
  const Mat4 info_inv =
      sigma * sigma * V * sv.cwiseInverse().cwiseAbs2().asDiagonal() * V.transpose();

  TargetEstimate at_t0;
  at_t0.xi = xi0;
  at_t0.P = 0.5 * (info_inv + info_inv.transpose());
  at_t0.t_ref = reg.t0;
  at_t0.m_used = measurements.size();

  out.status = EstimateStatus::Ok;
  out.estimate = propagate(at_t0, std::max(t_now, reg.t0));
  return out;
}

TargetEstimate propagate(const TargetEstimate& est, double t) {
  if (t < est.t_ref) {
    throw std::invalid_argument("propagate: cannot propagate backwards");
  }
  const Mat4 F = transition(t - est.t_ref);
  TargetEstimate out = est;
  out.xi = F * est.xi;
  const Mat4 P = F * est.P * F.transpose();
  out.P = 0.5 * (P + P.transpose());
  out.t_ref = t;
  return out;
}

}  // namespace auvtrack
