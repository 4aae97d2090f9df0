#include "gfdwa/dwa.hpp"

#include <algorithm>
#include <cmath>

namespace gfdwa {

void ControlLimits::validate() const {
  if (u_min.v > u_max.v || u_min.omega > u_max.omega) {
    throw std::invalid_argument("control limits: u_min must not exceed u_max");
  }
  if (du_minus_max.v < 0 || du_minus_max.omega < 0 || du_plus_max.v < 0 || du_plus_max.omega < 0) {
    throw std::invalid_argument("control limits: change bounds must be >= 0");
  }
}

void SamplingConfig::validate() const {
  if (!(dv > 0.0) || !(domega > 0.0)) throw std::invalid_argument("sampling resolution must be > 0");
  if (cap < 1) throw std::invalid_argument("candidate cap must be >= 1");
}

void CostWeights::validate() const {
  for (double w : {q_col, q_col_dist, q_col_grad, q_ref, q_vel, q_tar, beta, activation_range}) {
    if (!(w >= 0.0)) throw std::invalid_argument("cost weights must be >= 0");
  }
  if (!(dtheta_thre > std::numbers::pi / 2.0 && dtheta_thre <= std::numbers::pi)) {
    throw std::invalid_argument("dtheta_thre must lie in (pi/2, pi]");
  }
}

RobotState step(const RobotState& s, const ControlInput& u, double dt) {
  return {s.x + u.v * std::cos(s.theta) * dt, s.y + u.v * std::sin(s.theta) * dt,
          wrap_angle(s.theta + u.omega * dt)};
}

DynamicWindow dynamic_window(const ControlInput& prev, const ControlLimits& lim) {
  const double pv = std::clamp(prev.v, lim.u_min.v, lim.u_max.v);
  const double pw = std::clamp(prev.omega, lim.u_min.omega, lim.u_max.omega);
  DynamicWindow w;
  w.lower = {std::max(lim.u_min.v, pv - lim.du_minus_max.v),
             std::max(lim.u_min.omega, pw - lim.du_minus_max.omega)};
  w.upper = {std::min(lim.u_max.v, pv + lim.du_plus_max.v),
             std::min(lim.u_max.omega, pw + lim.du_plus_max.omega)};
  return w;
}

namespace {

std::size_t axis_samples(double width, double resolution, std::size_t cap) {
  if (!(width > 0.0)) return 1;
  const auto n = static_cast<std::size_t>(std::floor(width / resolution + 1e-9)) + 1;
  // keep both window ends reachable
  return std::min(cap, std::max<std::size_t>(2, n));
}

double axis_value(double lo, double hi, std::size_t i, std::size_t n) {
  if (n == 1) return lo == hi ? lo : 0.5 * (lo + hi);
  if (i + 1 == n) return hi;
  return lo + (static_cast<double>(i) / static_cast<double>(n - 1)) * (hi - lo);
}

}  // namespace

std::pair<std::size_t, std::size_t> candidate_grid(const DynamicWindow& w, const SamplingConfig& s) {
  std::size_t nv = axis_samples(w.upper.v - w.lower.v, s.dv, s.cap);
  std::size_t nw = axis_samples(w.upper.omega - w.lower.omega, s.domega, s.cap);
  while (nv * nw > s.cap) {
    if (nv >= nw) {
      nv = std::max<std::size_t>(1, std::min(nv - 1, s.cap / nw));
    } else {
      nw = std::max<std::size_t>(1, std::min(nw - 1, s.cap / nv));
    }
  }
  return {nv, nw};
}

std::vector<ControlInput> sample_candidates(const DynamicWindow& w, const SamplingConfig& s) {
  const auto [nv, nw] = candidate_grid(w, s);
  std::vector<ControlInput> out;
  out.reserve(nv * nw);
  for (std::size_t i = 0; i < nv; ++i) {
    const double v = axis_value(w.lower.v, w.upper.v, i, nv);
    for (std::size_t j = 0; j < nw; ++j) {
      out.push_back({v, axis_value(w.lower.omega, w.upper.omega, j, nw)});
    }
  }
  return out;
}

Trajectory rollout(const RobotState& state, const ControlInput& u, int steps, double dt) {
  if (steps < 1) throw std::invalid_argument("rollout horizon must be >= 1");
  Trajectory t;
  t.control = u;
  t.states.reserve(static_cast<std::size_t>(steps) + 1);
  t.states.push_back(state);
  for (int n = 0; n < steps; ++n) t.states.push_back(step(t.states.back(), u, dt));
  return t;
}

namespace {

double min_distance(std::span<const FieldQuery> future) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& q : future) m = std::min(m, q.distance);
  return m;
}

}  // namespace

double cost_col_dist(std::span<const FieldQuery> future, const CostWeights& weights) {
  const double d = min_distance(future);
  if (d > weights.activation_range) return 0.0;
  if (d <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / d;
}

double heading_penalty(double dtheta, const CostWeights& weights) {
  const double a = std::abs(dtheta);
  return a >= weights.dtheta_thre ? std::exp(weights.beta * a) - 1.0 : 0.0;
}

double cost_col_grad(const Trajectory& traj, std::span<const FieldQuery> future,
                     const CostWeights& weights) {
  if (min_distance(future) > weights.activation_range) return 0.0;
  double sum = 0.0;
  for (std::size_t n = 0; n < future.size(); ++n) {
    const Vec2& g = future[n].gradient;
    if (g.isZero(0.0)) continue;
    const double heading = traj.states[n + 1].theta;
    sum += heading_penalty(wrap_angle(heading - std::atan2(g.y(), g.x())), weights);
  }
  return sum;
}

double cost_ref(const Trajectory& traj, std::span<const Vec2> reference) {
  const std::size_t n = std::min(traj.horizon(), reference.size());
  if (n == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += (traj.states[i + 1].position() - reference[i]).norm();
  return sum / static_cast<double>(n);
}

double cost_vel(const ControlInput& u, double v_ref) { return std::abs(u.v - v_ref); }

double cost_tar(const Trajectory& traj, const Vec2& target) {
  const Vec2 here = traj.states.front().position();
  const Vec2 to_target = target - here;
  const Vec2 to_end = traj.back().position() - here;
  // bearings are undefined when either point sits on the robot
  if (to_target.norm() < 1e-9 || to_end.norm() < 1e-9) return 0.0;
  return std::abs(wrap_angle(std::atan2(to_target.y(), to_target.x()) -
                             std::atan2(to_end.y(), to_end.x())));
}

bool is_feasible(const Trajectory& traj, const PlanContext& ctx) {
  const double min_sep = 2.0 * ctx.robot_radius;
  for (std::size_t n = 1; n < traj.states.size(); ++n) {
    const Vec2 p = traj.states[n].position();
    if (point_in_collision(p, ctx.inflated_obstacles)) return false;
    for (const AlignedPrediction& other : ctx.fleet) {
      if (other.empty()) continue;
      const Vec2& q = other[std::min(n, other.size() - 1)];
      if ((p - q).norm() < min_sep) return false;
    }
  }
  return true;
}

namespace {

double weighted(double w, double j) { return w == 0.0 ? 0.0 : w * j; }

}  // namespace

CandidateEvaluation evaluate(Trajectory traj, const PlanContext& ctx) {
  CandidateEvaluation e;
  const CostWeights& w = ctx.weights;
  e.feasible = is_feasible(traj, ctx);

  std::vector<FieldQuery> future;
  if (ctx.field != nullptr) {
    future.reserve(traj.horizon());
    for (std::size_t n = 1; n < traj.states.size(); ++n) {
      future.push_back(ctx.field->query(traj.states[n].position()));
    }
    e.j_col_dist = cost_col_dist(future, w);
    e.j_col_grad = cost_col_grad(traj, future, w);
  }
  e.j_ref = cost_ref(traj, ctx.reference);
  e.j_vel = cost_vel(traj.control, ctx.v_ref);
  e.j_tar = cost_tar(traj, ctx.target);

  if (!e.feasible) {
    e.total = std::numeric_limits<double>::infinity();
  } else {
    const double j_col = weighted(w.q_col_dist, e.j_col_dist) + weighted(w.q_col_grad, e.j_col_grad);
    e.total = weighted(w.q_col, j_col) + weighted(w.q_ref, e.j_ref) + weighted(w.q_vel, e.j_vel) +
              weighted(w.q_tar, e.j_tar);
  }
  e.trajectory = std::move(traj);
  return e;
}

namespace {

// Strict "a is preferred over b" for equal-or-unequal totals.
bool preferred(const CandidateEvaluation& a, std::size_t ia, const CandidateEvaluation& b,
               std::size_t ib) {
  if (a.total != b.total) return a.total < b.total;
  const double wa = std::abs(a.trajectory.control.omega);
  const double wb = std::abs(b.trajectory.control.omega);
  if (wa != wb) return wa < wb;
  if (a.trajectory.control.v != b.trajectory.control.v) {
    return a.trajectory.control.v > b.trajectory.control.v;
  }
  return ia < ib;
}

}  // namespace

PlanResult plan(const RobotState& state, const ControlInput& prev, const PlanContext& ctx,
                Execution exec) {
  PlanResult r;
  r.diagnostics.window = dynamic_window(prev, ctx.limits);
  const std::vector<ControlInput> controls = sample_candidates(r.diagnostics.window, ctx.sampling);
  if (controls.empty()) throw NoCandidates("dynamic window produced no candidates");

  const auto n = static_cast<std::ptrdiff_t>(controls.size());
  r.candidates.resize(controls.size());
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      r.candidates[i] = evaluate(rollout(state, controls[i], ctx.horizon, ctx.dt), ctx);
    }
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      r.candidates[i] = evaluate(rollout(state, controls[i], ctx.horizon, ctx.dt), ctx);
    }
  }

  std::ptrdiff_t best = -1;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& c = r.candidates[i];
    if (!c.feasible) continue;
    ++r.diagnostics.feasible_count;
    if (!std::isfinite(c.total)) continue;
    if (best < 0 || preferred(c, static_cast<std::size_t>(i), r.candidates[best],
                              static_cast<std::size_t>(best))) {
      best = i;
    }
  }
  r.diagnostics.candidate_count = controls.size();

  if (best < 0) {
    const DynamicWindow& w = r.diagnostics.window;
    const ControlInput stop{std::clamp(0.0, w.lower.v, w.upper.v),
                            std::clamp(0.0, w.lower.omega, w.upper.omega)};
    r.diagnostics.all_infeasible = true;
    r.diagnostics.selected_index = controls.size();
    r.control = stop;
    r.selected = evaluate(rollout(state, stop, ctx.horizon, ctx.dt), ctx);
    return r;
  }
  r.diagnostics.selected_index = static_cast<std::size_t>(best);
  r.selected = r.candidates[best];
  r.control = r.selected.trajectory.control;
  return r;
}

}  // namespace gfdwa
