#pragma once

#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "gfdwa/execution.hpp"
#include "gfdwa/geometry.hpp"
#include "gfdwa/gpdf.hpp"
#include "gfdwa/types.hpp"

namespace gfdwa {

/// Absolute control bounds and per-step change bounds.
struct ControlLimits {
  ControlInput u_min{0.0, -1.0};
  ControlInput u_max{1.5, 1.0};
  ControlInput du_minus_max{0.3, 0.16};
  ControlInput du_plus_max{0.3, 0.16};

  void validate() const;
};

struct DynamicWindow {
  ControlInput lower;
  ControlInput upper;
};

/// Candidate grid resolution and the cap on the total candidate count.
struct SamplingConfig {
  double dv = 0.3;
  double domega = 0.08;
  std::size_t cap = 84;

  void validate() const;
};

struct CostWeights {
  double q_col = 1.0;
  double q_col_dist = 1.0;
  double q_col_grad = 0.02;
  double q_ref = 1.0;
  double q_vel = 0.3;
  double q_tar = 0.3;
  double beta = 2.0;
  double dtheta_thre = 2.0 * std::numbers::pi / 3.0;
  /// Collision terms are inactive unless some future state is this close.
  double activation_range = 1.0;

  void validate() const;
};

/// States 0..N from holding one control constant.
struct Trajectory {
  std::vector<RobotState> states;
  ControlInput control;

  const RobotState& back() const { return states.back(); }
  std::size_t horizon() const { return states.empty() ? 0 : states.size() - 1; }
};

struct CandidateEvaluation {
  Trajectory trajectory;
  bool feasible = true;
  double j_col_dist = 0.0;
  double j_col_grad = 0.0;
  double j_ref = 0.0;
  double j_vel = 0.0;
  double j_tar = 0.0;
  double total = 0.0;
};

/// Distance/gradient lookup used by the collision terms.
class FieldSource {
 public:
  virtual ~FieldSource() = default;
  virtual FieldQuery query(const Vec2& p) const = 0;
};

/// Predicted positions of another robot, time-aligned with candidate states
/// (entry n is where that robot is expected when the candidate reaches
/// state n).
using AlignedPrediction = std::vector<Vec2>;

/// Everything plan() needs besides the robot's own state.
struct PlanContext {
  const FieldSource* field = nullptr;
  std::span<const PolygonObstacle> inflated_obstacles;
  /// N positions aligned with candidate states 1..N.
  std::span<const Vec2> reference;
  Vec2 target = Vec2::Zero();
  double v_ref = 1.0;
  CostWeights weights;
  ControlLimits limits;
  SamplingConfig sampling;
  int horizon = 20;
  double dt = 0.2;
  std::span<const AlignedPrediction> fleet;
  double robot_radius = 0.5;
};

RobotState step(const RobotState& state, const ControlInput& u, double dt);

/// Window around the previous control, intersected with the absolute
/// bounds. The previous control is first clamped into the bounds so the
/// window is never empty.
DynamicWindow dynamic_window(const ControlInput& prev, const ControlLimits& limits);

/// Samples per axis after the cap has been applied, as (v, omega).
std::pair<std::size_t, std::size_t> candidate_grid(const DynamicWindow& window,
                                                   const SamplingConfig& sampling);

/// Inclusive linear grid over the window, v-major (index = i * n_omega + j).
std::vector<ControlInput> sample_candidates(const DynamicWindow& window,
                                            const SamplingConfig& sampling);

Trajectory rollout(const RobotState& state, const ControlInput& u, int steps, double dt);

/// `future` holds field queries for states 1..N.
double cost_col_dist(std::span<const FieldQuery> future, const CostWeights& weights);
double cost_col_grad(const Trajectory& traj, std::span<const FieldQuery> future,
                     const CostWeights& weights);
/// Per-state gradient-alignment penalty for a heading error.
double heading_penalty(double dtheta, const CostWeights& weights);
double cost_ref(const Trajectory& traj, std::span<const Vec2> reference);
double cost_vel(const ControlInput& u, double v_ref);
double cost_tar(const Trajectory& traj, const Vec2& target);

/// Exact collision check of states 1..N against inflated obstacles and the
/// other robots' aligned predictions.
bool is_feasible(const Trajectory& traj, const PlanContext& ctx);

CandidateEvaluation evaluate(Trajectory traj, const PlanContext& ctx);

struct PlanDiagnostics {
  DynamicWindow window;
  std::size_t candidate_count = 0;
  std::size_t feasible_count = 0;
  std::size_t selected_index = 0;
  bool all_infeasible = false;
};

struct PlanResult {
  ControlInput control;
  CandidateEvaluation selected;
  PlanDiagnostics diagnostics;
  /// Every evaluated candidate in sample order.
  std::vector<CandidateEvaluation> candidates;
};

class NoCandidates : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// One receding-horizon planning step: evaluates every candidate in the
/// dynamic window and returns the cheapest. Ties go to smaller |omega|,
/// then larger v, then lower sample index. If no candidate has a finite
/// cost the result is the slowest admissible straight-line control.
PlanResult plan(const RobotState& state, const ControlInput& prev, const PlanContext& ctx,
                Execution exec = Execution::Parallel);

}  // namespace gfdwa
