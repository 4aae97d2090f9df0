#include "gfdwa/fleet.hpp"

#include <algorithm>
#include <array>
#include <limits>

namespace gfdwa {

void PredictionBoard::publish(RobotId id, int step, std::vector<Vec2> positions) {
  entries_[id] = Entry{step, std::move(positions)};
}

void PredictionBoard::publish(RobotId id, int step, const Trajectory& trajectory) {
  std::vector<Vec2> pos;
  pos.reserve(trajectory.states.size());
  for (const auto& s : trajectory.states) pos.push_back(s.position());
  publish(id, step, std::move(pos));
}

const PredictionBoard::Entry* PredictionBoard::find(RobotId id) const {
  auto it = entries_.find(id);
  return it == entries_.end() ? nullptr : &it->second;
}

std::optional<GpField> build_fleet_field(const PredictionBoard& board, RobotId self_id,
                                         const KernelParams& params) {
  std::vector<Vec2> pts;
  for (const auto& [id, entry] : board.entries()) {
    if (id == self_id) continue;
    pts.insert(pts.end(), entry.positions.begin(), entry.positions.end());
  }
  if (pts.empty()) return std::nullopt;
  const auto unique = dedupe_points(pts);
  return GpField::fit(unique, params);
}

std::vector<AlignedPrediction> aligned_predictions(const PredictionBoard& board, RobotId self_id,
                                                   int horizon) {
  std::vector<AlignedPrediction> out;
  for (const auto& [id, entry] : board.entries()) {
    if (id == self_id || entry.positions.empty()) continue;
    AlignedPrediction a;
    a.reserve(static_cast<std::size_t>(horizon) + 1);
    const std::size_t last = entry.positions.size() - 1;
    for (int n = 0; n <= horizon; ++n) {
      a.push_back(entry.positions[std::min(static_cast<std::size_t>(n) + 1, last)]);
    }
    out.push_back(std::move(a));
  }
  return out;
}

UnifiedField::UnifiedField(const GpField* static_field, std::optional<GpField> fleet_field,
                           double robot_radius)
    : static_field_(static_field), fleet_field_(std::move(fleet_field)), robot_radius_(robot_radius) {}

FieldQuery UnifiedField::query(const Vec2& p) const {
  std::array<FieldLayer, 2> layers;
  std::size_t count = 0;
  if (static_field_ != nullptr) layers[count++] = {static_field_, 0.0};
  if (fleet_field_) layers[count++] = {&*fleet_field_, 2.0 * robot_radius_};
  if (count == 0) {
    FieldQuery far;
    far.distance = std::numeric_limits<double>::infinity();
    return far;
  }
  return compose(std::span<const FieldLayer>(layers.data(), count), p);
}

}  // namespace gfdwa
