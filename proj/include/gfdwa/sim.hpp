#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gfdwa/dwa.hpp"
#include "gfdwa/execution.hpp"
#include "gfdwa/fleet.hpp"
#include "gfdwa/scenario.hpp"

namespace gfdwa {

enum class RobotStatus { Active, Reached, Collided, Timeout };

std::string to_string(RobotStatus status);

/// One robot at one step: the control it applied and the pose it reached.
struct TraceRecord {
  int step = 0;
  RobotId robot = 0;
  RobotState state;
  ControlInput control;
  std::size_t candidate_count = 0;
  std::size_t feasible_count = 0;
  bool all_infeasible = false;
  double j_col_dist = 0.0;
  double j_col_grad = 0.0;
  double j_ref = 0.0;
  double j_vel = 0.0;
  double j_tar = 0.0;
  double total = 0.0;
  /// Filled only when SimOptions::record_plot_data is set.
  std::vector<Vec2> selected_path;
  std::vector<std::pair<Vec2, bool>> candidate_endpoints;

  bool operator==(const TraceRecord&) const = default;
};

struct RobotOutcome {
  RobotId id = 0;
  RobotStatus status = RobotStatus::Active;
  /// Step count at which the goal was reached.
  std::optional<int> steps_to_goal;
  /// Step at which a collision was adjudicated.
  std::optional<int> collision_step;
  RobotState final_state;
};

struct SimOutcome {
  std::vector<RobotOutcome> robots;
  int steps_run = 0;
  double min_inter_robot_distance = std::numeric_limits<double>::infinity();
  /// Smallest signed gap between a robot disc and a (non-inflated) obstacle.
  double min_obstacle_clearance = std::numeric_limits<double>::infinity();
  std::vector<TraceRecord> trace;
};

struct SimOptions {
  Execution exec = Execution::Parallel;
  bool record_plot_data = false;
};

/// Stepped simulation: every round all active robots plan against the
/// predictions published in the previous round, then all apply their first
/// control, then collisions and arrivals are adjudicated.
SimOutcome run(const Scenario& scenario, const SimOptions& options = {});

struct MetricsSummary {
  bool success = false;
  int max_steps = 0;
  double min_inter_robot_distance = 0.0;
  double min_obstacle_clearance = 0.0;
  std::size_t reached = 0;
  std::size_t collided = 0;
  std::size_t timed_out = 0;
};

/// Success means every robot reached its goal. max_steps is the latest
/// arrival, or the step budget when some robot never arrived.
MetricsSummary metrics(const SimOutcome& outcome, int step_budget);

nlohmann::json trace_record_to_json(const TraceRecord& r);
nlohmann::json metrics_to_json(const MetricsSummary& m, const SimOutcome& outcome);

}  // namespace gfdwa
