// Serial reference against the OpenMP path for the two hot loops: candidate
// evaluation in plan() and batched field queries.
//
//   ./build/bench/gfdwa_bench --benchmark_counters_tabular=true

#include <random>

#include <benchmark/benchmark.h>

#include "gfdwa/dwa.hpp"
#include "gfdwa/fleet.hpp"
#include "support.hpp"

using namespace gfdwa;

namespace {

struct PlanFixture {
  Scenario s = testing::bundled("s3");
  std::vector<PolygonObstacle> inflated = inflate_all(s.obstacles, s.robot_radius);
  GpField static_field = GpField::fit(testing::static_points(s), s.kernel);
  PredictionBoard board;
  std::vector<AlignedPrediction> predictions;
  std::optional<UnifiedField> field;
  std::vector<Vec2> reference;
  PlanContext ctx;

  PlanFixture() {
    for (int r = 1; r <= 3; ++r) {
      board.publish(r, 0, rollout({2.0 + r, -3.0, std::numbers::pi / 2}, {1.0, 0.0}, s.horizon, s.dt));
    }
    predictions = aligned_predictions(board, 0, s.horizon);
    field.emplace(&static_field, build_fleet_field(board, 0, s.kernel), s.robot_radius);
    reference = sample_reference(s.robots[0].reference_path, {1.0, 0.0}, s.robots[0].v_ref, s.dt, s.horizon);
    ctx.field = &*field;
    ctx.inflated_obstacles = inflated;
    ctx.reference = reference;
    ctx.target = s.robots[0].goal;
    ctx.v_ref = s.robots[0].v_ref;
    ctx.weights = s.weights;
    ctx.limits = s.limits;
    ctx.limits.du_minus_max = ctx.limits.du_plus_max = {0.75, 1.0};  // full 84 candidates
    ctx.sampling = s.sampling;
    ctx.horizon = s.horizon;
    ctx.dt = s.dt;
    ctx.fleet = predictions;
    ctx.robot_radius = s.robot_radius;
  }
};

void BM_Plan(benchmark::State& st) {
  static const PlanFixture f;
  const auto exec = st.range(0) ? Execution::Parallel : Execution::Serial;
  std::size_t candidates = 0;
  for (auto _ : st) {
    const PlanResult r = plan({1.0, 0.0, 0.0}, {0.75, 0.0}, f.ctx, exec);
    candidates = r.diagnostics.candidate_count;
    benchmark::DoNotOptimize(r.control);
  }
  st.counters["candidates"] = static_cast<double>(candidates);
  st.SetLabel(st.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_Plan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_QueryBatch(benchmark::State& st) {
  static const Scenario s = testing::bundled("s5");
  static const GpField field = GpField::fit(testing::static_points(s), s.kernel);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 20.0);
  std::vector<Vec2> pts(static_cast<std::size_t>(st.range(1)));
  for (auto& p : pts) p = {u(rng), u(rng)};
  const auto exec = st.range(0) ? Execution::Parallel : Execution::Serial;
  for (auto _ : st) benchmark::DoNotOptimize(query_batch(field, pts, exec));
  st.SetItemsProcessed(st.iterations() * st.range(1));
  st.SetLabel(st.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_QueryBatch)->ArgsProduct({{0, 1}, {1024, 16384}})->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
