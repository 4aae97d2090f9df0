#include "gfdwa/sim.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace gfdwa {

using nlohmann::json;

std::string to_string(RobotStatus status) {
  switch (status) {
    case RobotStatus::Active:
      return "active";
    case RobotStatus::Reached:
      return "reached";
    case RobotStatus::Collided:
      return "collided";
    case RobotStatus::Timeout:
      return "timeout";
  }
  return "unknown";
}

namespace {

struct RobotRuntime {
  const RobotSpec* spec = nullptr;
  RobotState state;
  ControlInput prev;
  RobotStatus status = RobotStatus::Active;
  std::optional<int> steps_to_goal;
  std::optional<int> collision_step;
};

double obstacle_clearance(const Vec2& p, std::span<const PolygonObstacle> obstacles, double radius) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& o : obstacles) {
    const double d = distance_to_boundary(o, p);
    best = std::min(best, contains(o, p) ? -d : d);
  }
  return best - radius;
}

std::vector<Vec2> parked(const Vec2& p, int horizon) {
  return std::vector<Vec2>(static_cast<std::size_t>(horizon) + 1, p);
}

}  // namespace

SimOutcome run(const Scenario& sc, const SimOptions& options) {
  // robots are processed in id order so that file order cannot leak into
  // the results
  std::vector<RobotRuntime> robots;
  for (const auto& spec : sc.robots) robots.push_back({&spec, spec.start, {}, RobotStatus::Active, {}, {}});
  std::sort(robots.begin(), robots.end(),
            [](const RobotRuntime& a, const RobotRuntime& b) { return a.spec->id < b.spec->id; });

  const auto inflated = inflate_all(sc.obstacles, sc.robot_radius);
  std::unique_ptr<GpField> static_field;
  if (!inflated.empty()) {
    const auto samples = sample_boundaries(inflated, sc.boundary_resolution);
    static_field = std::make_unique<GpField>(GpField::fit(samples, sc.kernel));
  }

  SimOutcome out;
  auto track_separation = [&] {
    for (std::size_t i = 0; i < robots.size(); ++i) {
      const Vec2 pi = robots[i].state.position();
      out.min_obstacle_clearance =
          std::min(out.min_obstacle_clearance, obstacle_clearance(pi, sc.obstacles, sc.robot_radius));
      for (std::size_t j = i + 1; j < robots.size(); ++j) {
        out.min_inter_robot_distance =
            std::min(out.min_inter_robot_distance, (pi - robots[j].state.position()).norm());
      }
    }
  };
  track_separation();

  // before any plan exists every robot is assumed to stay where it starts
  PredictionBoard board;
  for (const auto& r : robots) board.publish(r.spec->id, -1, parked(r.state.position(), sc.horizon));

  int k = 0;
  for (; k < sc.step_budget; ++k) {
    const bool any_active = std::any_of(robots.begin(), robots.end(),
                                        [](const RobotRuntime& r) { return r.status == RobotStatus::Active; });
    if (!any_active) break;

    std::vector<std::optional<PlanResult>> plans(robots.size());
    for (std::size_t i = 0; i < robots.size(); ++i) {
      RobotRuntime& r = robots[i];
      if (r.status != RobotStatus::Active) continue;
      const RobotId id = r.spec->id;

      UnifiedField field(static_field.get(), build_fleet_field(board, id, sc.kernel), sc.robot_radius);
      const auto predictions = aligned_predictions(board, id, sc.horizon);
      const auto reference =
          sample_reference(r.spec->reference_path, r.state.position(), r.spec->v_ref, sc.dt, sc.horizon);

      PlanContext ctx;
      ctx.field = &field;
      ctx.inflated_obstacles = inflated;
      ctx.reference = reference;
      ctx.target = r.spec->goal;
      ctx.v_ref = r.spec->v_ref;
      ctx.weights = sc.weights;
      ctx.limits = sc.limits;
      ctx.sampling = sc.sampling;
      ctx.horizon = sc.horizon;
      ctx.dt = sc.dt;
      ctx.fleet = predictions;
      ctx.robot_radius = sc.robot_radius;
      plans[i] = plan(r.state, r.prev, ctx, options.exec);
    }

    // publish after everyone has planned: this round only saw last round
    for (std::size_t i = 0; i < robots.size(); ++i) {
      RobotRuntime& r = robots[i];
      if (plans[i]) {
        board.publish(r.spec->id, k, plans[i]->selected.trajectory);
        r.state = step(r.state, plans[i]->control, sc.dt);
        r.prev = plans[i]->control;
      } else {
        board.publish(r.spec->id, k, parked(r.state.position(), sc.horizon));
      }
    }

    // adjudication
    std::vector<bool> hit(robots.size(), false);
    for (std::size_t i = 0; i < robots.size(); ++i) {
      if (robots[i].status == RobotStatus::Active &&
          point_in_collision(robots[i].state.position(), inflated)) {
        hit[i] = true;
      }
      for (std::size_t j = i + 1; j < robots.size(); ++j) {
        if (robots[i].status != RobotStatus::Active && robots[j].status != RobotStatus::Active) continue;
        if ((robots[i].state.position() - robots[j].state.position()).norm() < 2.0 * sc.robot_radius) {
          if (robots[i].status == RobotStatus::Active) hit[i] = true;
          if (robots[j].status == RobotStatus::Active) hit[j] = true;
        }
      }
    }
    track_separation();

    for (std::size_t i = 0; i < robots.size(); ++i) {
      RobotRuntime& r = robots[i];
      if (!plans[i]) continue;
      if (hit[i]) {
        r.status = RobotStatus::Collided;
        r.collision_step = k + 1;
        r.prev = {};
      } else if ((r.state.position() - r.spec->goal).norm() <= sc.goal_tolerance) {
        r.status = RobotStatus::Reached;
        r.steps_to_goal = k + 1;
        r.prev = {};
      }

      const PlanResult& p = *plans[i];
      TraceRecord rec;
      rec.step = k;
      rec.robot = r.spec->id;
      rec.state = r.state;
      rec.control = p.control;
      rec.candidate_count = p.diagnostics.candidate_count;
      rec.feasible_count = p.diagnostics.feasible_count;
      rec.all_infeasible = p.diagnostics.all_infeasible;
      rec.j_col_dist = p.selected.j_col_dist;
      rec.j_col_grad = p.selected.j_col_grad;
      rec.j_ref = p.selected.j_ref;
      rec.j_vel = p.selected.j_vel;
      rec.j_tar = p.selected.j_tar;
      rec.total = p.selected.total;
      if (options.record_plot_data) {
        for (const auto& s : p.selected.trajectory.states) rec.selected_path.push_back(s.position());
        for (const auto& c : p.candidates) rec.candidate_endpoints.emplace_back(c.trajectory.back().position(), c.feasible);
      }
      out.trace.push_back(std::move(rec));
    }
  }
  out.steps_run = k;

  for (RobotRuntime& r : robots) {
    if (r.status == RobotStatus::Active) r.status = RobotStatus::Timeout;
    out.robots.push_back({r.spec->id, r.status, r.steps_to_goal, r.collision_step, r.state});
  }
  return out;
}

MetricsSummary metrics(const SimOutcome& outcome, int step_budget) {
  MetricsSummary m;
  m.success = !outcome.robots.empty();
  for (const auto& r : outcome.robots) {
    switch (r.status) {
      case RobotStatus::Reached:
        ++m.reached;
        m.max_steps = std::max(m.max_steps, *r.steps_to_goal);
        break;
      case RobotStatus::Collided:
        ++m.collided;
        m.success = false;
        break;
      default:
        ++m.timed_out;
        m.success = false;
        break;
    }
  }
  if (!m.success) m.max_steps = step_budget;
  m.min_inter_robot_distance = outcome.min_inter_robot_distance;
  m.min_obstacle_clearance = outcome.min_obstacle_clearance;
  return m;
}

namespace {

// JSON has no infinity; non-finite values are written as null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json trace_record_to_json(const TraceRecord& r) {
  json j = {{"step", r.step},
            {"robot", r.robot},
            {"state", {r.state.x, r.state.y, r.state.theta}},
            {"control", {r.control.v, r.control.omega}},
            {"candidates", r.candidate_count},
            {"feasible", r.feasible_count},
            {"all_infeasible", r.all_infeasible},
            {"cost",
             {{"col_dist", number(r.j_col_dist)},
              {"col_grad", number(r.j_col_grad)},
              {"ref", number(r.j_ref)},
              {"vel", number(r.j_vel)},
              {"tar", number(r.j_tar)},
              {"total", number(r.total)}}}};
  if (!r.selected_path.empty()) {
    json path = json::array();
    for (const Vec2& p : r.selected_path) path.push_back({p.x(), p.y()});
    j["selected_path"] = std::move(path);
  }
  if (!r.candidate_endpoints.empty()) {
    json ends = json::array();
    for (const auto& [p, ok] : r.candidate_endpoints) ends.push_back({p.x(), p.y(), ok});
    j["candidate_endpoints"] = std::move(ends);
  }
  return j;
}

json metrics_to_json(const MetricsSummary& m, const SimOutcome& outcome) {
  json robots = json::array();
  for (const auto& r : outcome.robots) {
    robots.push_back({{"id", r.id},
                      {"status", to_string(r.status)},
                      {"steps_to_goal", r.steps_to_goal ? json(*r.steps_to_goal) : json(nullptr)},
                      {"collision_step", r.collision_step ? json(*r.collision_step) : json(nullptr)},
                      {"final_state", {r.final_state.x, r.final_state.y, r.final_state.theta}}});
  }
  return {{"success", m.success},
          {"max_steps", m.max_steps},
          {"steps_run", outcome.steps_run},
          {"reached", m.reached},
          {"collided", m.collided},
          {"timed_out", m.timed_out},
          {"min_inter_robot_distance", number(m.min_inter_robot_distance)},
          {"min_obstacle_clearance", number(m.min_obstacle_clearance)},
          {"robots", std::move(robots)}};
}

}  // namespace gfdwa
