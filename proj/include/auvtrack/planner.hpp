#pragma once

/**
 * @file planner.hpp
 * @brief Receding-horizon multi-objective planner over discrete heading
 *        increments, with unscented sampling of the target estimate and
 *        sequential multi-agent coordination through policies of intent.
 *
 * Each agent optimizes only its heading: a policy is a sequence of H heading
 * increments drawn from U equally spaced values in [-dtheta_max,
 * +dtheta_max], applied as constant yaw rates over planning steps of one
 * TDMA round. Surge is set by a range-keeping heuristic and held over the
 * horizon. The stage cost at each predicted step is
 *
 *   alpha * J_geometry + (1 - alpha) * J_distance + gamma * J_connectivity
 *
 * averaged over the sigma points of the target estimate, plus soft
 * constraint penalties.
 */

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "auvtrack/channel.hpp"
#include "auvtrack/estimator.hpp"
#include "auvtrack/graph.hpp"
#include "auvtrack/world.hpp"

namespace auvtrack {

/// Cost returned for degenerate geometry or a disconnected predicted graph.
inline constexpr double kSentinelCost = 1e9;
/// Soft-constraint penalty per violating step.
inline constexpr double kConstraintPenalty = 1e6;
inline constexpr double kSingularTol = 1e-9;

enum class PlannerMode { Weighted, EpsilonConstrained };

PlannerMode parse_planner_mode(const std::string& name);
std::string to_string(PlannerMode mode);

struct PlannerParams {
  int horizon = 4;                  ///< H
  int action_count = 7;             ///< U, odd
  double max_heading_change = 0.3;  ///< dtheta_max, rad per step
  double granularity_step = 0.05;   ///< dtheta decrement, rad
  double min_heading_change = 0.1;  ///< floor for dtheta_max, rad
  int granularity_window = 5;       ///< decisions inspected by adaptation
  double alpha = 0.5;
  double gamma = 0.3;
  double desired_range = 50.0;      ///< d_r, m
  double max_range = 500.0;         ///< d_M, m
  double safety_distance = 25.0;    ///< d_S, m
  double center_weight = 1.0 / 3.0; ///< sigma-point weight of the mean
  double epsilon = 0.0;             ///< geometry cap; <= 0 selects default
  PlannerMode mode = PlannerMode::Weighted;
  double step_duration = 6.0;       ///< seconds per planning step

  /// Human-readable list of violated invariants; empty when valid.
  std::vector<std::string> validate() const;
};

/// Residual heading plan broadcast to neighbors.
struct IntentPolicy {
  std::vector<double> headings;
  double surge = 0.0;
  long issued_at = 0;  ///< round index
};

/// Drops the consumed first increment and repeats the last one.
IntentPolicy extend_intent(const IntentPolicy& policy);

/// What an agent knows about one neighbor.
struct NeighborInfo {
  AgentState pose;          ///< pose reported at pose_time
  double pose_time = 0.0;   ///< start of the neighbor's policy
  IntentPolicy intent;
  long received_round = 0;
  int age = 0;              ///< rounds since the last update
};

struct Belief {
  AgentId id = 0;
  double time = 0.0;  ///< planning instant
  AgentState own;
  std::map<AgentId, NeighborInfo> neighbors;
  std::optional<TargetEstimate> target;
  ModemConfig modem;
};

/**
 * Pose of an agent following a policy from t_from to t_to. Each increment
 * is flown as a constant yaw rate over one step; past the horizon the
 * policy is extended with the base policy (repeat last increment).
 */
AgentState predict_pose(const AgentState& start, const IntentPolicy& policy,
                        double t_from, double t_to, double step_duration);

inline constexpr int kStateDim = 4;
inline constexpr int kSigmaCount = 2 * kStateDim + 1;

struct SigmaSet {
  std::array<Vec4, kSigmaCount> points;
  std::array<double, kSigmaCount> weights;
};

/// Symmetric sigma set; center weight w0, wings (1 - w0) / 8.
SigmaSet sigma_points(const TargetEstimate& est, double center_weight);

/// 1 / smallest singular value of the rows (sin b, -cos b).
double geometry_cost(std::span<const double> bearings);

double distance_cost(double distance, double desired_range);

/**
 * Sum over neighbors of 1 / fiedler(L) for the graph seen from node
 * self_index. Terms whose own link is below threshold, or a disconnected
 * graph, contribute kSentinelCost.
 */
double connectivity_cost(const CommGraph& g, std::size_t self_index);

/// clamp(|v| + (u_max / d_r) * (d - d_r), 0, u_max).
double surge_heuristic(double distance, double target_speed,
                       double desired_range, double u_max);

/// Equally spaced increments over [-dtheta_max, +dtheta_max].
std::vector<double> heading_increments(int action_count,
                                       double max_heading_change);

/// Geometry cap used by the epsilon-constrained mode for m bearings:
/// 1 / (0.7 * sqrt(m / 2)) unless params.epsilon > 0.
double epsilon_threshold(const PlannerParams& params, std::size_t bearings);

struct StageTerms {
  double geometry = 0.0;      ///< UT-weighted J^(g)
  double distance = 0.0;      ///< UT-weighted J^(d)
  double connectivity = 0.0;  ///< J^(c)
  double penalty = 0.0;
  double cost = 0.0;          ///< objective contribution of this step
};

struct PlanResult {
  IntentPolicy policy;
  double cost = 0.0;
  std::vector<int> action_indices;
  StageTerms first_step;
  std::size_t leaf_evaluations = 0;   ///< complete sequences costed
  std::size_t stage_evaluations = 0;  ///< individual stage-cost calls
  bool has_target = false;
  bool fell_back_to_weighted = false;
};

/**
 * Single-agent receding-horizon problem for one belief. Neighbor and target
 * predictions are computed once on construction; evaluate() and the search
 * then only roll the own vehicle forward.
 */
class HorizonProblem {
 public:
  HorizonProblem(const Belief& belief, const PlannerParams& params);

  bool has_target() const { return has_target_; }
  std::span<const double> increments() const { return increments_; }
  double surge() const { return surge_; }
  std::size_t neighbor_count() const { return neighbor_ids_.size(); }

  /// Total objective of a sequence of action indices (stage costs plus the
  /// terminal cost), in the same summation order as the search.
  double evaluate(std::span<const int> actions, PlannerMode mode) const;

  /// Stage terms at step h (1-based) with the own vehicle at p.
  StageTerms stage(int h, const Vec2& p, PlannerMode mode) const;

  /// Branch-and-bound over the U^H sequences.
  PlanResult solve() const;

 private:
  struct SearchState;
  void search(SearchState& st, int depth, const AgentState& own, double acc,
              std::vector<int>& prefix) const;
  double geometry_at(int h, std::size_t l, const Vec2& p) const;

  PlannerParams params_;
  ModemConfig modem_;
  AgentState own_;
  bool has_target_ = false;
  double surge_ = 0.0;
  std::vector<double> increments_;
  std::vector<AgentId> neighbor_ids_;
  SigmaSet sigma_{};
  // [h-1][l]
  std::vector<std::array<Vec2, kSigmaCount>> target_pos_;
  // [h-1][l] partial sums of c c^T over neighbor rows: (xx, xy, yy)
  std::vector<std::array<Eigen::Vector3d, kSigmaCount>> nb_info_;
  // [h-1][j]
  std::vector<std::vector<Vec2>> nb_pos_;
  // [h-1]: gains among neighbors, index j+1 (own node is 0)
  std::vector<Eigen::MatrixXd> nb_gains_;
  double epsilon_ = 0.0;
};

/// Plans for one agent: search, or the hold policy without a target.
PlanResult plan(const Belief& belief, const PlannerParams& params);

/**
 * One decision epoch of sequential planning. Agents plan in the given
 * order; each later agent sees the fresh policies of those before it (when
 * delivered[k][m] allows), and the stored intents of the others.
 */
std::vector<PlanResult> sma_round(
    std::vector<Belief>& beliefs_in_order, const PlannerParams& params,
    long round, const std::vector<std::vector<bool>>* delivered = nullptr);

/// Shrinks the heading range when recent choices stay near zero.
class GranularityAdapter {
 public:
  explicit GranularityAdapter(const PlannerParams& params);

  /// Records the chosen first increment; returns the updated dtheta_max.
  double update(double chosen_first_increment);
  double max_heading_change() const { return max_heading_change_; }

 private:
  int action_count_;
  int window_;
  double step_;
  double floor_;
  double max_heading_change_;
  std::deque<double> history_;
};

}  // namespace auvtrack
