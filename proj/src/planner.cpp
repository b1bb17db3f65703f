#include "auvtrack/planner.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <stdexcept>

namespace auvtrack {

namespace {

// Smallest eigenvalue of the symmetric 2x2 matrix [[xx, xy], [xy, yy]].
double min_eig_2x2(const Eigen::Vector3d& s) {
  const double mean = 0.5 * (s(0) + s(2));
  const double half_diff = 0.5 * (s(0) - s(2));
  return mean - std::hypot(half_diff, s(1));
}

double geometry_from_info(const Eigen::Vector3d& info) {
  const double sigma_min = std::sqrt(std::max(min_eig_2x2(info), 0.0));
  return sigma_min < kSingularTol ? kSentinelCost : 1.0 / sigma_min;
}

// Information contribution of one bearing row, from the sensor-to-target
// vector d: the row (sin b, -cos b) equals (d_y, -d_x) / |d|.
Eigen::Vector3d row_info(const Vec2& d) {
  const double r2 = d.squaredNorm();
  if (r2 == 0.0) return Eigen::Vector3d::Zero();
  return Eigen::Vector3d(d.y() * d.y(), -d.x() * d.y(), d.x() * d.x()) / r2;
}

// Second-smallest eigenvalue of the normalized Laplacian of a symmetric
// gain matrix. Small graphs use closed forms.
double fiedler_of_gains(const Eigen::MatrixXd& gains, double rho_max) {
  const Eigen::Index n = gains.rows();
  double s2 = 0.0;
  if (n < 2) return 0.0;
  if (n == 2) {
    s2 = 2.0 * gains(0, 1) / rho_max;
  } else if (n == 3) {
    // Nonzero spectrum of a triangle Laplacian: roots of
    // x^2 - 2(a+b+c) x + 3(ab+bc+ca).
    const double a = gains(0, 1) / rho_max, b = gains(0, 2) / rho_max,
                 c = gains(1, 2) / rho_max;
    const double tr = 2.0 * (a + b + c);
    const double prod = 3.0 * (a * b + b * c + c * a);
    const double disc = std::max(tr * tr - 4.0 * prod, 0.0);
    // Numerically stable smaller root.
    const double big = 0.5 * (tr + std::sqrt(disc));
    s2 = big > 0.0 ? prod / big : 0.0;
  } else {
    CommGraph g{gains, rho_max};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(laplacian(g),
                                                       Eigen::EigenvaluesOnly);
    s2 = eig.eigenvalues()(1);
  }
  return s2 > kFiedlerZeroTol ? s2 : 0.0;
}

double connectivity_from_gains(const Eigen::MatrixXd& gains, double rho_max,
                               std::size_t self) {
  const Eigen::Index n = gains.rows();
  if (n < 2) return 0.0;
  const double s2 = fiedler_of_gains(gains, rho_max);
  double total = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j == static_cast<Eigen::Index>(self)) continue;
    const bool linked = gains(static_cast<Eigen::Index>(self), j) > 0.0;
    total += (linked && s2 > 0.0) ? 1.0 / s2 : kSentinelCost;
  }
  return total;
}

// Integer distance of an action index from the zero increment.
int deviation(std::span<const int> actions, int center) {
  int dev = 0;
  for (int a : actions) dev += std::abs(a - center);
  return dev;
}

}  // namespace

PlannerMode parse_planner_mode(const std::string& name) {
  if (name == "weighted") return PlannerMode::Weighted;
  if (name == "epsilon-constrained") return PlannerMode::EpsilonConstrained;
  throw std::invalid_argument("unknown planner mode: " + name);
}

std::string to_string(PlannerMode mode) {
  return mode == PlannerMode::Weighted ? "weighted" : "epsilon-constrained";
}

std::vector<std::string> PlannerParams::validate() const {
  std::vector<std::string> errors;
  if (horizon < 1) errors.emplace_back("planner.horizon must be >= 1");
  if (action_count < 1 || action_count % 2 == 0) {
    errors.emplace_back("planner.action_count must be odd and >= 1");
  }
  if (alpha < 0.0 || alpha > 1.0) errors.emplace_back("planner.alpha must be in [0, 1]");
  if (gamma < 0.0 || gamma > 1.0) errors.emplace_back("planner.gamma must be in [0, 1]");
  if (!(desired_range > 0.0)) errors.emplace_back("planner.desired_range must be > 0");
  if (!(desired_range < max_range)) {
    errors.emplace_back("planner.desired_range must be < planner.max_range");
  }
  if (safety_distance < 0.0) errors.emplace_back("planner.safety_distance must be >= 0");
  if (!(min_heading_change > 0.0)) {
    errors.emplace_back("planner.min_heading_change must be > 0");
  }
  if (granularity_step < 0.0) errors.emplace_back("planner.granularity_step must be >= 0");
  if (granularity_window < 1) errors.emplace_back("planner.granularity_window must be >= 1");
  if (center_weight < 0.0 || center_weight >= 1.0) {
    errors.emplace_back("planner.center_weight must be in [0, 1)");
  }
  if (!(step_duration > 0.0)) errors.emplace_back("planner.step_duration must be > 0");
  return errors;
}

IntentPolicy extend_intent(const IntentPolicy& policy) {
  IntentPolicy out = policy;
  if (out.headings.empty()) return out;
  const double base = out.headings.back();
  out.headings.erase(out.headings.begin());
  out.headings.push_back(base);
  return out;
}

AgentState predict_pose(const AgentState& start, const IntentPolicy& policy,
                        double t_from, double t_to, double step_duration) {
  AgentState s = start;
  if (!(t_to > t_from)) return s;
  const double span = t_to - t_from;
  const auto full_steps =
      static_cast<long>(std::floor(span / step_duration + 1e-9));
  IntentPolicy p = policy;
  auto increment = [&]() { return p.headings.empty() ? 0.0 : p.headings.front(); };
  // Received intents carry float32 increments that can sit a rounding step
  // past the turn-rate limit.
  auto control = [&]() -> Control {
    return {std::clamp(p.surge, -s.u_max, s.u_max),
            std::clamp(increment() / step_duration, -s.r_max, s.r_max)};
  };
  for (long k = 0; k < full_steps; ++k) {
    if (p.surge != 0.0 || increment() != 0.0) {
      s = step_agent(s, control(), step_duration);
    }
    p = extend_intent(p);
  }
  const double rest = span - static_cast<double>(full_steps) * step_duration;
  if (rest > 1e-9) {
    s = step_agent(s, control(), rest);
  }
  return s;
}

SigmaSet sigma_points(const TargetEstimate& est, double center_weight) {
  if (!(center_weight < 1.0)) {
    throw std::invalid_argument("sigma_points: center weight must be < 1");
  }
  Mat4 root;
  Eigen::LLT<Mat4> llt(est.P);
  if (llt.info() == Eigen::Success) {
    root = llt.matrixL();
  } else {
    Eigen::SelfAdjointEigenSolver<Mat4> eig(est.P);
    const double scale = std::max(1.0, est.P.cwiseAbs().maxCoeff());
    if (eig.eigenvalues().minCoeff() < -1e-12 * scale) {
      std::clog << "[auvtrack] warning: covariance not PSD, clipping "
                   "negative eigenvalues for sigma points\n";
    }
    root = eig.eigenvectors() *
           eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }

  SigmaSet set;
  const double spread = std::sqrt(kStateDim / (1.0 - center_weight));
  const double wing = (1.0 - center_weight) / (2.0 * kStateDim);
  set.points[0] = est.xi;
  set.weights[0] = center_weight;
  for (int j = 0; j < kStateDim; ++j) {
    const Vec4 offset = spread * root.col(j);
    set.points[1 + j] = est.xi + offset;
    set.points[1 + kStateDim + j] = est.xi - offset;
    set.weights[1 + j] = wing;
    set.weights[1 + kStateDim + j] = wing;
  }
  return set;
}

double geometry_cost(std::span<const double> bearings) {
  if (bearings.empty()) throw std::invalid_argument("geometry_cost: no bearings");
  Eigen::Vector3d info = Eigen::Vector3d::Zero();
  for (double b : bearings) {
    const double s = std::sin(b), c = std::cos(b);
    info += Eigen::Vector3d(s * s, -s * c, c * c);
  }
  return geometry_from_info(info);
}

double distance_cost(double distance, double desired_range) {
  if (!(desired_range > 0.0)) {
    throw std::invalid_argument("distance_cost: desired range must be > 0");
  }
  return distance / desired_range;
}

double connectivity_cost(const CommGraph& g, std::size_t self_index) {
  if (self_index >= g.size()) throw std::out_of_range("connectivity_cost: bad index");
  return connectivity_from_gains(g.gains, g.rho_max, self_index);
}

double surge_heuristic(double distance, double target_speed,
                       double desired_range, double u_max) {
  const double gain = u_max / desired_range;
  return std::clamp(target_speed + gain * (distance - desired_range), 0.0, u_max);
}

std::vector<double> heading_increments(int action_count,
                                       double max_heading_change) {
  std::vector<double> out(static_cast<std::size_t>(action_count), 0.0);
  if (action_count == 1) return out;
  const int center = action_count / 2;
  const double spacing = max_heading_change / center;
  for (int m = 0; m < action_count; ++m) out[m] = (m - center) * spacing;
  return out;
}

double epsilon_threshold(const PlannerParams& params, std::size_t bearings) {
  if (params.epsilon > 0.0) return params.epsilon;
  return 1.0 / (0.7 * std::sqrt(static_cast<double>(bearings) / 2.0));
}

// ---------------------------------------------------------------------------

HorizonProblem::HorizonProblem(const Belief& belief, const PlannerParams& params)
    : params_(params),
      modem_(belief.modem),
      own_(belief.own),
      increments_(heading_increments(params.action_count, params.max_heading_change)) {
  if (auto errors = params.validate(); !errors.empty()) {
    throw std::invalid_argument("invalid planner params: " + errors.front());
  }
  const int H = params.horizon;
  const double dt = params.step_duration;

  for (const auto& [id, info] : belief.neighbors) neighbor_ids_.push_back(id);
  epsilon_ = epsilon_threshold(params, neighbor_ids_.size() + 1);

  nb_pos_.assign(H, std::vector<Vec2>(neighbor_ids_.size()));
  for (int h = 1; h <= H; ++h) {
    const double t = belief.time + h * dt;
    std::size_t j = 0;
    for (const auto& [id, info] : belief.neighbors) {
      nb_pos_[h - 1][j++] =
          predict_pose(info.pose, info.intent, info.pose_time, t, dt).p;
    }
  }

  const auto n_loc = static_cast<Eigen::Index>(neighbor_ids_.size() + 1);
  nb_gains_.assign(H, Eigen::MatrixXd::Zero(n_loc, n_loc));
  for (int h = 0; h < H; ++h) {
    for (Eigen::Index a = 1; a < n_loc; ++a) {
      for (Eigen::Index b = a + 1; b < n_loc; ++b) {
        const double d = (nb_pos_[h][a - 1] - nb_pos_[h][b - 1]).norm();
        const double rho = d > 0.0 ? snr(modem_, d) : modem_.ideal_snr();
        nb_gains_[h](a, b) = nb_gains_[h](b, a) =
            link_gain(rho, modem_.detection_threshold);
      }
    }
  }

  if (!belief.target) return;
  has_target_ = true;
  TargetEstimate est = *belief.target;
  if (belief.time > est.t_ref) est = propagate(est, belief.time);
  sigma_ = sigma_points(est, params.center_weight);
  surge_ = surge_heuristic((est.position() - own_.p).norm(),
                           est.velocity().norm(), params.desired_range,
                           own_.u_max);

  target_pos_.resize(H);
  nb_info_.resize(H);
  for (int h = 1; h <= H; ++h) {
    for (int l = 0; l < kSigmaCount; ++l) {
      const Vec4& x = sigma_.points[l];
      const Vec2 p = x.head<2>() + h * dt * x.tail<2>();
      target_pos_[h - 1][l] = p;
      Eigen::Vector3d info = Eigen::Vector3d::Zero();
      for (const Vec2& q : nb_pos_[h - 1]) info += row_info(p - q);
      nb_info_[h - 1][l] = info;
    }
  }
}

double HorizonProblem::geometry_at(int h, std::size_t l, const Vec2& p) const {
  const Vec2& target = target_pos_[h - 1][l];
  return geometry_from_info(nb_info_[h - 1][l] + row_info(target - p));
}

StageTerms HorizonProblem::stage(int h, const Vec2& p, PlannerMode mode) const {
  StageTerms t;
  for (int l = 0; l < kSigmaCount; ++l) {
    const double w = sigma_.weights[l];
    const double d = (target_pos_[h - 1][l] - p).norm();
    t.geometry += w * geometry_at(h, l, p);
    t.distance += w * distance_cost(d, params_.desired_range);
    if (d <= params_.desired_range || d >= params_.max_range) {
      t.penalty += w * kConstraintPenalty;
    }
  }
  for (const Vec2& q : nb_pos_[h - 1]) {
    if ((q - p).norm() < params_.safety_distance) t.penalty += kConstraintPenalty;
  }
  if (!neighbor_ids_.empty()) {
    Eigen::MatrixXd gains = nb_gains_[h - 1];
    for (Eigen::Index j = 1; j < gains.rows(); ++j) {
      const double d = (nb_pos_[h - 1][j - 1] - p).norm();
      const double rho = d > 0.0 ? snr(modem_, d) : modem_.ideal_snr();
      gains(0, j) = gains(j, 0) = link_gain(rho, modem_.detection_threshold);
    }
    t.connectivity = connectivity_from_gains(gains, modem_.ideal_snr(), 0);
  }
  if (mode == PlannerMode::Weighted) {
    t.cost = params_.alpha * t.geometry + (1.0 - params_.alpha) * t.distance +
             params_.gamma * t.connectivity + t.penalty;
  } else {
    t.cost = t.distance + params_.gamma * t.connectivity + t.penalty;
  }
  return t;
}

double HorizonProblem::evaluate(std::span<const int> actions,
                                PlannerMode mode) const {
  if (static_cast<int>(actions.size()) != params_.horizon) {
    throw std::invalid_argument("evaluate: sequence length must equal H");
  }
  if (!has_target_) return 0.0;
  AgentState s = own_;
  double acc = 0.0;
  double last = 0.0;
  for (int h = 1; h <= params_.horizon; ++h) {
    const double inc = increments_.at(static_cast<std::size_t>(actions[h - 1]));
    s = step_agent(s, {surge_, inc / params_.step_duration}, params_.step_duration);
    last = stage(h, s.p, mode).cost;
    acc += last;
  }
  return acc + last;
}

struct HorizonProblem::SearchState {
  PlannerMode mode = PlannerMode::Weighted;
  double best_cost = std::numeric_limits<double>::infinity();
  int best_dev = 0;
  std::vector<int> best;
  std::size_t leaves = 0;
  std::size_t stages = 0;
};

void HorizonProblem::search(SearchState& st, int depth, const AgentState& own,
                            double acc, std::vector<int>& prefix) const {
  struct Child {
    double acc;
    double stage_cost;
    int action;
    AgentState state;
  };
  const int U = static_cast<int>(increments_.size());
  const int h = depth + 1;
  std::vector<Child> children;
  children.reserve(static_cast<std::size_t>(U));
  for (int a = 0; a < U; ++a) {
    const AgentState next = step_agent(
        own, {surge_, increments_[a] / params_.step_duration}, params_.step_duration);
    const StageTerms terms = stage(h, next.p, st.mode);
    ++st.stages;
    if (st.mode == PlannerMode::EpsilonConstrained && terms.geometry > epsilon_) {
      continue;
    }
    children.push_back({acc + terms.cost, terms.cost, a, next});
  }
  std::stable_sort(children.begin(), children.end(),
                   [](const Child& x, const Child& y) { return x.acc < y.acc; });

  const int center = U / 2;
  for (const Child& c : children) {
    // Stage costs are nonnegative, so the accumulated cost bounds every
    // completion from below. Equal costs are kept for tie-breaking.
    if (c.acc > st.best_cost) break;
    prefix.push_back(c.action);
    if (h == params_.horizon) {
      const double total = c.acc + c.stage_cost;
      ++st.leaves;
      const int dev = deviation(prefix, center);
      const bool better =
          st.best.empty() || total < st.best_cost ||
          (total == st.best_cost &&
           (dev < st.best_dev || (dev == st.best_dev && prefix < st.best)));
      if (better) {
        st.best_cost = total;
        st.best_dev = dev;
        st.best = prefix;
      }
    } else {
      search(st, depth + 1, c.state, c.acc, prefix);
    }
    prefix.pop_back();
  }
}

PlanResult HorizonProblem::solve() const {
  PlanResult out;
  out.policy.surge = surge_;
  out.has_target = has_target_;
  const int H = params_.horizon;
  if (!has_target_) {
    out.policy.headings.assign(static_cast<std::size_t>(H), 0.0);
    out.action_indices.assign(static_cast<std::size_t>(H), params_.action_count / 2);
    return out;
  }

  SearchState st;
  st.mode = params_.mode;
  std::vector<int> prefix;
  prefix.reserve(static_cast<std::size_t>(H));
  search(st, 0, own_, 0.0, prefix);
  PlannerMode used = params_.mode;
  if (st.best.empty()) {
    // No sequence satisfies the geometry cap.
    SearchState fallback;
    fallback.mode = PlannerMode::Weighted;
    fallback.leaves = st.leaves;
    fallback.stages = st.stages;
    search(fallback, 0, own_, 0.0, prefix);
    st = std::move(fallback);
    used = PlannerMode::Weighted;
    out.fell_back_to_weighted = true;
  }

  out.cost = st.best_cost;
  out.action_indices = st.best;
  out.leaf_evaluations = st.leaves;
  out.stage_evaluations = st.stages;
  for (int a : st.best) out.policy.headings.push_back(increments_[a]);
  const AgentState first = step_agent(
      own_, {surge_, out.policy.headings.front() / params_.step_duration},
      params_.step_duration);
  out.first_step = stage(1, first.p, used);
  return out;
}

PlanResult plan(const Belief& belief, const PlannerParams& params) {
  return HorizonProblem(belief, params).solve();
}

std::vector<PlanResult> sma_round(std::vector<Belief>& beliefs_in_order,
                                  const PlannerParams& params, long round,
                                  const std::vector<std::vector<bool>>* delivered) {
  std::vector<PlanResult> results;
  results.reserve(beliefs_in_order.size());
  for (std::size_t k = 0; k < beliefs_in_order.size(); ++k) {
    const Belief& planner = beliefs_in_order[k];
    PlanResult res = plan(planner, params);
    res.policy.issued_at = round;
    for (std::size_t m = 0; m < beliefs_in_order.size(); ++m) {
      if (m == k) continue;
      if (delivered && !(*delivered)[k][m]) continue;
      NeighborInfo info;
      info.pose = planner.own;
      info.pose_time = planner.time;
      info.intent = res.policy;
      info.received_round = round;
      info.age = 0;
      beliefs_in_order[m].neighbors[planner.id] = info;
    }
    results.push_back(std::move(res));
  }
  return results;
}

GranularityAdapter::GranularityAdapter(const PlannerParams& params)
    : action_count_(params.action_count),
      window_(params.granularity_window),
      step_(params.granularity_step),
      floor_(params.min_heading_change),
      max_heading_change_(params.max_heading_change) {}

double GranularityAdapter::update(double chosen_first_increment) {
  history_.push_back(std::abs(chosen_first_increment));
  while (static_cast<int>(history_.size()) > window_) history_.pop_front();
  if (static_cast<int>(history_.size()) < window_ || action_count_ < 3) {
    return max_heading_change_;
  }
  const double smallest_nonzero =
      max_heading_change_ / static_cast<double>(action_count_ / 2);
  const bool all_low = std::all_of(history_.begin(), history_.end(), [&](double v) {
    return v <= smallest_nonzero * (1.0 + 1e-9);
  });
  if (all_low) {
    max_heading_change_ = std::max(max_heading_change_ - step_, floor_);
    history_.clear();
  }
  return max_heading_change_;
}

}  // namespace auvtrack
